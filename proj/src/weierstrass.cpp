#include "symcube/weierstrass.hpp"

#include "symcube/errors.hpp"
#include "symcube/factor.hpp"

namespace symcube {

namespace {

bool is_integer(const Rational &q) { return q.get_den() == 1; }

Integer mod(const Integer &a, const Integer &m) {
  Integer r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

// All residues x in [0, m) with a*x = b (mod m).
std::vector<Integer> solve_linear(const Integer &a, const Integer &b, const Integer &m) {
  Integer g;
  Integer am = mod(a, m);
  mpz_gcd(g.get_mpz_t(), am.get_mpz_t(), m.get_mpz_t());
  if (am == 0)
    g = m;
  if (mod(b, g) != 0)
    return {};
  const Integer step = m / g;
  Integer x0 = 0;
  if (step > 1) {
    Integer inv;
    Integer ag = am / g;
    mpz_invert(inv.get_mpz_t(), ag.get_mpz_t(), step.get_mpz_t());
    x0 = mod(Integer(b / g) * inv, step);
  }
  std::vector<Integer> xs;
  for (Integer k = 0; k < g; ++k)
    xs.push_back(x0 + k * step);
  return xs;
}

} // namespace

std::string Curve::to_string() const {
  return "[" + a1.get_str() + "," + a2.get_str() + "," + a3.get_str() + "," +
         a4.get_str() + "," + a6.get_str() + "]";
}

Integer discriminant(const Curve &c) {
  const Integer b2 = c.a1 * c.a1 + 4 * c.a2;
  const Integer b4 = 2 * c.a4 + c.a1 * c.a3;
  const Integer b6 = c.a3 * c.a3 + 4 * c.a6;
  const Integer b8 = c.a1 * c.a1 * c.a6 + 4 * c.a2 * c.a6 - c.a1 * c.a3 * c.a4 +
                     c.a2 * c.a3 * c.a3 - c.a4 * c.a4;
  return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
}

Invariants invariants(const Curve &c) {
  Invariants inv;
  inv.b2 = c.a1 * c.a1 + 4 * c.a2;
  inv.b4 = 2 * c.a4 + c.a1 * c.a3;
  inv.b6 = c.a3 * c.a3 + 4 * c.a6;
  inv.b8 = c.a1 * c.a1 * c.a6 + 4 * c.a2 * c.a6 - c.a1 * c.a3 * c.a4 +
           c.a2 * c.a3 * c.a3 - c.a4 * c.a4;
  inv.c4 = inv.b2 * inv.b2 - 24 * inv.b4;
  inv.c6 = -inv.b2 * inv.b2 * inv.b2 + 36 * inv.b2 * inv.b4 - 216 * inv.b6;
  inv.disc = -inv.b2 * inv.b2 * inv.b8 - 8 * inv.b4 * inv.b4 * inv.b4 -
             27 * inv.b6 * inv.b6 + 9 * inv.b2 * inv.b4 * inv.b6;
  if (inv.disc == 0)
    throw SingularCurve();
  inv.j = Rational(inv.c4 * inv.c4 * inv.c4, inv.disc);
  inv.j.canonicalize();
  return inv;
}

Transformation Transformation::then(const Transformation &next) const {
  Transformation out;
  out.u = u * next.u;
  out.r = r + u * u * next.r;
  out.s = s + u * next.s;
  out.t = t + u * u * u * next.t + s * u * u * next.r;
  return out;
}

Transformation Transformation::inverse() const {
  if (u == 0)
    throw InputError("transformation with u = 0");
  Transformation out;
  out.u = 1 / u;
  out.r = -r / (u * u);
  out.s = -s / u;
  out.t = (r * s - t) / (u * u * u);
  return out;
}

bool RationalCurve::is_integral() const {
  return is_integer(a1) && is_integer(a2) && is_integer(a3) && is_integer(a4) &&
         is_integer(a6);
}

RationalCurve transform_rational(const Curve &c, const Transformation &tr) {
  if (tr.u == 0)
    throw InputError("transformation with u = 0");
  const Rational a1(c.a1), a2(c.a2), a3(c.a3), a4(c.a4), a6(c.a6);
  const Rational &u = tr.u, &r = tr.r, &s = tr.s, &t = tr.t;
  const Rational u2 = u * u, u3 = u2 * u, u4 = u2 * u2, u6 = u3 * u3;

  RationalCurve out;
  out.a1 = (a1 + 2 * s) / u;
  out.a2 = (a2 - s * a1 + 3 * r - s * s) / u2;
  out.a3 = (a3 + r * a1 + 2 * t) / u3;
  out.a4 = (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u4;
  out.a6 = (a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1) / u6;
  return out;
}

Curve transform(const Curve &c, const Transformation &tr) {
  const RationalCurve rc = transform_rational(c, tr);
  if (!rc.is_integral())
    throw NonIntegralModel("transformed model is not integral");
  return {rc.a1.get_num(), rc.a2.get_num(), rc.a3.get_num(), rc.a4.get_num(),
          rc.a6.get_num()};
}

std::optional<Transformation> find_descent(const Curve &c, const Integer &p) {
  const Invariants inv = invariants(c);
  if (valuation(inv.disc, p) < 12 || valuation(inv.c4, p) < 4 ||
      valuation(inv.c6, p) < 6)
    return std::nullopt;

  // Exhaustive over s mod p, r mod p^2, t mod p^3, pruned by requiring
  // a1', a2', a3' integral before the full check.
  const Integer p2 = p * p, p3 = p2 * p;
  for (const Integer &s : solve_linear(2, -c.a1, p)) {
    for (const Integer &r : solve_linear(3, s * s + s * c.a1 - c.a2, p2)) {
      for (const Integer &t : solve_linear(2, -(c.a3 + r * c.a1), p3)) {
        Transformation tr{Rational(p), Rational(r), Rational(s), Rational(t)};
        if (transform_rational(c, tr).is_integral())
          return tr;
      }
    }
  }
  return std::nullopt;
}

bool is_minimal_at(const Curve &c, const Integer &p) {
  if (!is_prime(p))
    throw InputError("not a prime: " + p.get_str());
  return !find_descent(c, p).has_value();
}

Minimization minimize(const Curve &c) {
  const Invariants inv = invariants(c);
  Minimization out{c, Transformation::identity()};
  for (const PrimePower &pp : factorize(inv.disc)) {
    if (pp.exponent < 12)
      continue;
    while (auto step = find_descent(out.curve, pp.prime)) {
      out.curve = transform(out.curve, *step);
      out.applied = out.applied.then(*step);
    }
  }
  return out;
}

} // namespace symcube
