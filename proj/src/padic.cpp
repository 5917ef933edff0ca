#include "symcube/padic.hpp"

#include "symcube/errors.hpp"

namespace symcube {

namespace {

void require_prime(const Integer &p) {
  if (!is_prime(p))
    throw InputError("not a prime: " + p.get_str());
}

// Removes every factor p from x and returns how many were removed.
long strip(Integer &x, const Integer &p) {
  if (x == 0)
    return 0;
  return static_cast<long>(mpz_remove(x.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t()));
}

// For a p-adic unit u = a/b, an integer congruent to u modulo p (p odd) or
// modulo 8 (p = 2). a*b works in both cases since b^2 is a square unit.
Integer unit_residue_rep(const Rational &u) { return u.get_num() * u.get_den(); }

} // namespace

std::string Valuation::to_string() const {
  return is_infinite() ? std::string("+inf") : std::to_string(value());
}

bool is_prime(const Integer &n) {
  if (n < 2)
    return false;
  return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0;
}

Valuation valuation(const Integer &x, const Integer &p) {
  require_prime(p);
  if (x == 0)
    return Valuation::infinity();
  Integer y = x;
  return Valuation(strip(y, p));
}

Valuation valuation(const Rational &x, const Integer &p) {
  require_prime(p);
  if (x == 0)
    return Valuation::infinity();
  Integer num = x.get_num();
  Integer den = x.get_den();
  return Valuation(strip(num, p) - strip(den, p));
}

Rational unit_part(const Rational &x, const Integer &p) {
  require_prime(p);
  if (x == 0)
    throw InputError("unit part of zero");
  Integer num = x.get_num();
  Integer den = x.get_den();
  strip(num, p);
  strip(den, p);
  Rational u(num, den);
  u.canonicalize();
  return u;
}

int legendre(const Integer &u, const Integer &p) {
  if (p == 2)
    throw InputError("legendre symbol needs an odd prime");
  require_prime(p);
  Integer r = u % p;
  if (r < 0)
    r += p;
  return mpz_legendre(r.get_mpz_t(), p.get_mpz_t());
}

Integer smallest_nonresidue(const Integer &p) {
  if (p == 2)
    throw InputError("no quadratic nonresidue modulo 2");
  require_prime(p);
  Integer n = 2;
  while (mpz_legendre(n.get_mpz_t(), p.get_mpz_t()) != -1)
    ++n;
  return n;
}

SquareClass square_class(const Rational &x, const Integer &p) {
  if (x == 0)
    throw InputError("square class of zero");
  const Valuation v = valuation(x, p);
  const Rational u = unit_part(x, p);
  const Integer rep = unit_residue_rep(u);

  SquareClass sc;
  sc.parity = static_cast<int>(((v.value() % 2) + 2) % 2);
  if (p == 2) {
    Integer m = rep % 8;
    if (m < 0)
      m += 8;
    sc.unit_class = m;
  } else {
    sc.unit_class = legendre(rep, p) == 1 ? Integer(1) : smallest_nonresidue(p);
  }
  return sc;
}

bool is_square_in_qp(const Rational &x, const Integer &p) {
  return square_class(x, p).is_square();
}

QuadCharClass quad_char_class(const Rational &gamma, const Integer &p) {
  if (gamma == 0)
    throw InputError("quadratic character of zero");
  const SquareClass sc = square_class(gamma, p);
  if (sc.is_square())
    return {CharKind::Trivial, 0};

  if (p != 2) {
    if (sc.parity == 0)
      return {CharKind::UnramifiedNontrivial, 0};
    return {CharKind::Ramified, 1};
  }

  // Q_2: the unramified quadratic extension is Q_2(sqrt 5); Q_2(sqrt 3),
  // Q_2(sqrt 7) have discriminant exponent 2, and every odd-valuation class
  // has discriminant exponent 3.
  if (sc.parity == 1)
    return {CharKind::Ramified, 3};
  if (sc.unit_class == 5)
    return {CharKind::UnramifiedNontrivial, 0};
  return {CharKind::Ramified, 2};
}

std::string to_string(CharKind kind) {
  switch (kind) {
  case CharKind::Trivial:
    return "trivial";
  case CharKind::UnramifiedNontrivial:
    return "unramified-nontrivial";
  case CharKind::Ramified:
    return "ramified";
  }
  return "?";
}

} // namespace symcube
