#pragma once

// Exact arithmetic over Q and Q_p: valuations, unit parts, Legendre symbols,
// square classes and the quadratic character attached to a square class.

#include <gmpxx.h>

#include <compare>
#include <optional>
#include <string>

namespace symcube {

using Integer = mpz_class;
using Rational = mpq_class;

/// p-adic valuation. Infinite exactly for the valuation of zero.
class Valuation {
public:
  constexpr Valuation() = default; // +infinity
  constexpr explicit Valuation(long v) : value_(v) {}

  static constexpr Valuation infinity() { return Valuation(); }

  constexpr bool is_infinite() const { return !value_.has_value(); }
  /// Finite value. Throws std::bad_optional_access when infinite.
  constexpr long value() const { return value_.value(); }

  friend constexpr Valuation operator+(Valuation a, Valuation b) {
    if (a.is_infinite() || b.is_infinite())
      return infinity();
    return Valuation(*a.value_ + *b.value_);
  }

  friend constexpr bool operator==(Valuation a, Valuation b) = default;
  friend constexpr bool operator==(Valuation a, long b) { return a.value_ == b; }

  // +infinity compares greater than every finite value.
  friend constexpr std::strong_ordering operator<=>(Valuation a, Valuation b) {
    if (a.is_infinite())
      return b.is_infinite() ? std::strong_ordering::equal
                             : std::strong_ordering::greater;
    if (b.is_infinite())
      return std::strong_ordering::less;
    return *a.value_ <=> *b.value_;
  }
  friend constexpr std::strong_ordering operator<=>(Valuation a, long b) {
    return a <=> Valuation(b);
  }

  std::string to_string() const;

private:
  std::optional<long> value_;
};

bool is_prime(const Integer &n);

/// v_p(x). Throws InputError when p is not prime.
Valuation valuation(const Rational &x, const Integer &p);
Valuation valuation(const Integer &x, const Integer &p);

/// x * p^(-v_p(x)). Throws InputError for x = 0.
Rational unit_part(const Rational &x, const Integer &p);

/// Legendre symbol (u/p) for an odd prime p.
int legendre(const Integer &u, const Integer &p);

/// Smallest positive quadratic nonresidue modulo an odd prime.
Integer smallest_nonresidue(const Integer &p);

/// Class of x in Q_p^x / (Q_p^x)^2.
///
/// `unit_class` is 1 or the smallest nonresidue for odd p, and one of
/// {1, 3, 5, 7} for p = 2.
struct SquareClass {
  int parity = 0;
  Integer unit_class = 1;

  bool is_square() const { return parity == 0 && unit_class == 1; }
  friend bool operator==(const SquareClass &, const SquareClass &) = default;
};

SquareClass square_class(const Rational &x, const Integer &p);

/// x is a nonzero square in Q_p.
bool is_square_in_qp(const Rational &x, const Integer &p);

enum class CharKind { Trivial, UnramifiedNontrivial, Ramified };

/// The quadratic character (gamma, .) of Q_p^x, up to what determines its
/// conductor. `conductor_exponent` is 0 unless the character is ramified.
struct QuadCharClass {
  CharKind kind = CharKind::Trivial;
  int conductor_exponent = 0;

  bool is_unramified() const { return kind != CharKind::Ramified; }
  friend bool operator==(const QuadCharClass &, const QuadCharClass &) = default;
};

QuadCharClass quad_char_class(const Rational &gamma, const Integer &p);

std::string to_string(CharKind kind);

} // namespace symcube
