#pragma once

// The symmetric cube layer: the 4x4 matrix map GL(2) -> GSp(4), local data
// of sym^3(pi_p) (conductor, representation type, epsilon sign, L-factor),
// and the global assembly of conductor N, paramodular level M and
// Atkin-Lehner signs.

#include "symcube/local.hpp"
#include "symcube/padic.hpp"
#include "symcube/weierstrass.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace symcube {

template <std::size_t N> using SquareMatrix = std::array<std::array<Rational, N>, N>;
using Matrix2 = SquareMatrix<2>;
using Matrix4 = SquareMatrix<4>;

template <std::size_t N> SquareMatrix<N> identity_matrix() {
  SquareMatrix<N> m;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      m[i][j] = i == j ? 1 : 0;
  return m;
}

template <std::size_t N>
SquareMatrix<N> operator*(const SquareMatrix<N> &a, const SquareMatrix<N> &b) {
  SquareMatrix<N> c;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      Rational acc = 0;
      for (std::size_t k = 0; k < N; ++k)
        acc += a[i][k] * b[k][j];
      c[i][j] = acc;
    }
  return c;
}

template <std::size_t N>
SquareMatrix<N> operator*(const Rational &s, const SquareMatrix<N> &a) {
  SquareMatrix<N> c = a;
  for (auto &row : c)
    for (auto &x : row)
      x *= s;
  return c;
}

template <std::size_t N> SquareMatrix<N> transpose(const SquareMatrix<N> &a) {
  SquareMatrix<N> t;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      t[i][j] = a[j][i];
  return t;
}

inline Rational determinant(const Matrix2 &g) { return g[0][0] * g[1][1] - g[0][1] * g[1][0]; }

/// Action of GL(2) on binary cubic forms, normalized so the image preserves
/// a symplectic form up to the similitude factor det(g)^3.
Matrix4 sym3_matrix(const Matrix2 &g);

/// Nonzero antisymmetric J with sym3(g)^T J sym3(g) = det(g)^exponent J.
struct SimilitudeForm {
  Matrix4 form;
  int exponent = 3;
};

/// Solved once from the linear conditions on a spanning set of GL(2);
/// normalized to integer entries with positive first nonzero entry.
/// Throws InternalError if only J = 0 satisfies the conditions.
const SimilitudeForm &sym3_similitude_form();

// ---------------------------------------------------------------------------

enum class RepType { Unramified, I, IVa, VIII, X, Supercuspidal };
std::string to_string(RepType t);

/// The epsilon factor eps(1/2, sym^3 pi_p), which is also the Atkin-Lehner
/// sign at p. The two root-number kinds only occur at p = 3.
struct SignExpr {
  enum class Kind { Plus, Minus, LegendreDeltaTimesRoot, MinusRoot };

  Kind kind = Kind::Plus;
  int legendre_delta = 0; // (D'/3), recorded for LegendreDeltaTimesRoot
  std::optional<int> resolved;

  static SignExpr plus() { return {Kind::Plus, 0, 1}; }
  static SignExpr minus() { return {Kind::Minus, 0, -1}; }
  static SignExpr legendre_times_root(int legendre_delta, std::optional<int> w);
  static SignExpr minus_root(std::optional<int> w);

  /// Numeric value when known.
  std::optional<int> value() const { return resolved; }
  std::string render() const;
};

/// Local spin L-factor descriptor.
struct LFactor {
  enum class Kind {
    One,
    SplitSt,             // 1/(1 - p^(-3/2-s))
    NonsplitSt,          // 1/(1 + p^(-3/2-s))
    AlphaI,              // 1/(1 + p^(-2s))
    UnitaryUndetermined, // 1/((1 - a p^-s)(1 - a^-1 p^-s)), |a| = 1
    Unramified,          // good reduction; depends on a_p
  };

  Kind kind = Kind::One;
  Integer p;

  std::string render() const;
};

struct Sym3LocalData {
  int conductor_exponent = 0; // k
  RepType rep_type = RepType::Unramified;
  SignExpr epsilon;
  LFactor l_factor;
};

/// Conductor of chi^3 for a character of conductor `a` whose restriction to
/// the units has order `unit_order`.
int cube_conductor(int a, int unit_order, const Integer &p);

/// a(sym^3 pi_p) from the general formulas in terms of the character data.
int sym3_conductor_general(const LocalGL2Data &d, const Integer &p);

struct Sym3Context {
  Integer p;
  std::optional<Q3Condition> q3_condition;
  std::optional<int> e;              // 12 / gcd(v(disc), 12), p >= 5
  std::optional<int> legendre_delta; // (D'/3), p = 3
  std::optional<int> root_number_3;  // w(E/Q_3) when supplied
};

/// Specialized table lookup for k, representation type, epsilon and L.
/// Throws ClassificationError on combinations outside the tables.
Sym3LocalData sym3_local(const LocalGL2Data &d, const Sym3Context &ctx);

// ---------------------------------------------------------------------------

struct PrimeAnalysis {
  Integer p;
  long v_disc = 0;
  ReductionType reduction = ReductionType::Good;
  bool j_integral = true; // j in Z_p
  std::variant<LocalGL2Data, Unsupported> gl2;
  std::optional<Q3Condition> q3_condition;
  std::string neron_type; // from the matched p = 3 row, informational
  std::optional<int> e;
  std::optional<int> legendre_delta;
  std::optional<Sym3LocalData> sym3;

  bool supported() const { return std::holds_alternative<LocalGL2Data>(gl2); }
};

/// Classifies one prime dividing the discriminant of a minimal model.
/// Cross-checks the table value of k against the general formula.
PrimeAnalysis analyze_prime(const Curve &minimal, const Invariants &inv, const Integer &p,
                            const RootNumberProvider &root_number);

struct GlobalReport {
  std::optional<Integer> conductor;         // N
  std::optional<Integer> level;             // M
  std::optional<Integer> closed_form_level; // N * prod p^2 over p | N, 4 does not divide v_p
  std::vector<PrimeAnalysis> primes;
  std::vector<std::pair<Integer, SignExpr>> atkin_lehner;
  std::string gamma_factors = "Gamma_C(s+3/2)Gamma_C(s+1/2)";
  std::vector<std::string> warnings;
  bool cm = false;
  bool unsupported_at_2 = false;
};

/// The closed-form level: N * prod_{p | N, v_p(disc) != 0 mod 4} p^2.
Integer closed_form_level(const Integer &conductor, const std::vector<PrimeAnalysis> &primes);

GlobalReport assemble_global(const Invariants &inv, std::vector<PrimeAnalysis> primes);

/// Full pipeline on a model that is globally minimal.
GlobalReport analyze_minimal_curve(const Curve &minimal, const RootNumberProvider &root_number);

/// j is one of the 13 rational CM j-invariants.
bool is_cm(const Rational &j);

} // namespace symcube
