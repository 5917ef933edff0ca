#pragma once

// Per-prime classification: reduction type and the representation of
// GL(2, Q_p) attached to the curve.

#include "symcube/padic.hpp"
#include "symcube/weierstrass.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace symcube {

enum class ReductionType {
  Good,
  SplitMultiplicative,
  NonsplitMultiplicative,
  AdditivePotentiallyMultiplicative,
  AdditivePotentiallyGood,
};

std::string to_string(ReductionType r);

inline bool is_multiplicative(ReductionType r) {
  return r == ReductionType::SplitMultiplicative ||
         r == ReductionType::NonsplitMultiplicative;
}

/// Value of a character at a uniformizer, when the classification fixes it.
enum class UniformizerValue { Plus, Minus, Unknown };

struct UnramifiedGood {
  friend bool operator==(const UnramifiedGood &, const UnramifiedGood &) = default;
};

/// (gamma, .) St
struct TwistedSteinberg {
  QuadCharClass character;
  friend bool operator==(const TwistedSteinberg &, const TwistedSteinberg &) = default;
};

/// chi x chi^-1; chi restricted to the units has order `chi_unit_order`.
struct PrincipalSeries {
  int a_chi = 0;
  int chi_unit_order = 1;
  friend bool operator==(const PrincipalSeries &, const PrincipalSeries &) = default;
};

/// Induced from a character xi of a quadratic extension F.
struct DihedralSupercuspidal {
  bool field_ramified = false;
  int a_xi = 0;
  int xi_unit_order = 1;
  UniformizerValue xi_at_uniformizer = UniformizerValue::Unknown;
  friend bool operator==(const DihedralSupercuspidal &,
                         const DihedralSupercuspidal &) = default;
};

using GL2Kind =
    std::variant<UnramifiedGood, TwistedSteinberg, PrincipalSeries, DihedralSupercuspidal>;

struct LocalGL2Data {
  GL2Kind kind;
  int conductor_exponent = 0; // a(pi_p), as read off the classification table

  friend bool operator==(const LocalGL2Data &, const LocalGL2Data &) = default;
};

/// a(pi_p) computed from the character data alone.
int gl2_conductor_from_parameters(const GL2Kind &kind);

std::string kind_name(const GL2Kind &kind);

/// Additive, potentially good reduction at 2: no classification available.
struct Unsupported {
  std::string reason;
};

ReductionType reduction_type(const Invariants &inv, const Curve &curve, const Integer &p);
/// Same, without re-verifying minimality (caller guarantees it).
ReductionType reduction_type_assuming_minimal(const Invariants &inv, const Integer &p);

/// gamma = -c4/c6. Throws UndefinedGamma when c6 = 0.
Rational gamma_invariant(const Invariants &inv);

/// j not in Z_p, i.e. 3 v(c4) < v(disc).
bool is_potentially_multiplicative(const Invariants &inv, const Integer &p);

LocalGL2Data classify_pot_mult(const Invariants &inv, const Integer &p);

struct LargePrimeClassification {
  LocalGL2Data data;
  int e = 0; // 12 / gcd(v(disc), 12)
};

/// Additive potentially good reduction at p >= 5.
LargePrimeClassification classify_pot_good_large_p(const Invariants &inv,
                                                   const Integer &p);

// ---------------------------------------------------------------------------
// Residue characteristic 3.

enum class Q3Condition { P2, P3, P4, P6, S3, S4, S6, S6prime, S6doubleprime };

std::string to_string(Q3Condition c);

enum class Reducibility {
  None,
  MinusOneSquare,    // -1 is a square in the residue field
  MinusOneNonsquare,
  DiscSquare,        // disc is a square in Q_3
  DiscNonsquare,
};

/// Auxiliary congruence (c6/3^k)^2 + 2 = c4/3^m (mod 9).
enum class AuxCongruence { None, Holds, Fails };

/// Lower-or-exact bound on a valuation.
struct ValuationBound {
  long n = 0;
  bool at_least = false;
  bool matches(Valuation v) const { return at_least ? v >= n : v == n; }
};

struct Q3Row {
  Q3Condition condition;
  Reducibility reducibility;
  long v_disc;
  ValuationBound v_c4;
  ValuationBound v_c6;
  AuxCongruence congruence;
  const char *neron_type;
  int v_conductor;
};

/// All rows of the residue-characteristic-3 condition table.
std::span<const Q3Row> q3_table();

/// Rows that match `inv`. With `check_reducibility` false only the
/// valuation columns and the auxiliary congruence are compared.
std::vector<const Q3Row *> q3_matching_rows(const Invariants &inv,
                                           bool check_reducibility = true);

struct Q3Classification {
  Q3Condition condition;
  LocalGL2Data data;
  const Q3Row *row;
};

Q3Classification classify_q3(const Invariants &inv);

// ---------------------------------------------------------------------------

using P2Classification = std::variant<LocalGL2Data, Unsupported>;

P2Classification classify_p2(const Invariants &inv, const Curve &curve);

/// Source for the local root number w(E/Q_3). Returns nullopt when unknown.
using RootNumberProvider = std::function<std::optional<int>(const Curve &)>;

RootNumberProvider constant_root_number(int w);

/// Returns the configured w(E/Q_3), or nullopt (symbolic) when none.
std::optional<int> local_root_number_3(const Curve &curve,
                                       const RootNumberProvider &provider);

} // namespace symcube
