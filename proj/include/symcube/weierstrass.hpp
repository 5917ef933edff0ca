#pragma once

// Weierstrass models y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over Z:
// invariants, changes of coordinates, minimality and global minimization.

#include "symcube/padic.hpp"

#include <optional>
#include <string>
#include <vector>

namespace symcube {

struct Curve {
  Integer a1, a2, a3, a4, a6;

  /// "[a1,a2,a3,a4,a6]"
  std::string to_string() const;
  friend bool operator==(const Curve &, const Curve &) = default;
};

struct Invariants {
  Integer b2, b4, b6, b8;
  Integer c4, c6;
  Integer disc;
  Rational j;
};

/// Throws SingularCurve when the discriminant vanishes.
Invariants invariants(const Curve &curve);

/// Discriminant only; zero for singular models.
Integer discriminant(const Curve &curve);

/// Change of coordinates x = u^2 x' + r, y = u^3 y' + s u^2 x' + t.
struct Transformation {
  Rational u = 1, r = 0, s = 0, t = 0;

  static Transformation identity() { return {}; }

  /// The transformation equal to applying *this and then `next`.
  Transformation then(const Transformation &next) const;
  Transformation inverse() const;
  bool is_identity() const { return u == 1 && r == 0 && s == 0 && t == 0; }

  friend bool operator==(const Transformation &, const Transformation &) = default;
};

/// Applies the substitution. Throws NonIntegralModel when the resulting
/// coefficients are not integers, InputError when u = 0.
Curve transform(const Curve &curve, const Transformation &t);

/// Rational coefficients of the transformed model, with no integrality check.
struct RationalCurve {
  Rational a1, a2, a3, a4, a6;
  bool is_integral() const;
};
RationalCurve transform_rational(const Curve &curve, const Transformation &t);

/// A transformation with u = p producing an integral model, if any exists.
std::optional<Transformation> find_descent(const Curve &curve, const Integer &p);

bool is_minimal_at(const Curve &curve, const Integer &p);

struct Minimization {
  Curve curve;
  Transformation applied;
};

/// Global minimal model. `applied` maps the input model to the result.
Minimization minimize(const Curve &curve);

} // namespace symcube
