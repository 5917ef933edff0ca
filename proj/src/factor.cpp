#include "symcube/factor.hpp"

#include "symcube/errors.hpp"

#include <algorithm>
#include <map>

namespace symcube {

namespace {

// Brent's variant of Pollard rho. Returns a nontrivial factor of the odd
// composite n.
Integer rho_factor(const Integer &n) {
  for (unsigned long c = 1;; ++c) {
    Integer y = 2, x, q = 1, g = 1, ys;
    unsigned long r = 1;
    constexpr unsigned long batch = 128;
    auto step = [&](const Integer &v) {
      Integer w = v * v + c;
      mpz_mod(w.get_mpz_t(), w.get_mpz_t(), n.get_mpz_t());
      return w;
    };
    do {
      x = y;
      for (unsigned long i = 0; i < r; ++i)
        y = step(y);
      unsigned long k = 0;
      do {
        ys = y;
        for (unsigned long i = 0; i < std::min(batch, r - k); ++i) {
          y = step(y);
          Integer d = abs(x - y);
          q = q * d % n;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += batch;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);

    if (g == n) {
      // The batch overshot; redo it one step at a time.
      do {
        ys = step(ys);
        Integer d = abs(x - ys);
        mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n)
      return g;
  }
}

void split(const Integer &n, std::map<Integer, long> &out) {
  if (n == 1)
    return;
  if (is_prime(n)) {
    ++out[n];
    return;
  }
  // Perfect powers defeat rho's cycle detection rarely, but cheaply caught.
  if (mpz_perfect_power_p(n.get_mpz_t())) {
    for (unsigned long k = 2;; ++k) {
      Integer root;
      if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k)) {
        std::map<Integer, long> sub;
        split(root, sub);
        for (const auto &[p, e] : sub)
          out[p] += e * static_cast<long>(k);
        return;
      }
    }
  }
  const Integer d = rho_factor(n);
  split(d, out);
  split(n / d, out);
}

} // namespace

std::vector<PrimePower> factorize(const Integer &n) {
  if (n == 0)
    throw InputError("cannot factor zero");
  Integer m = abs(n);
  std::map<Integer, long> found;

  for (unsigned long p : {2UL, 3UL, 5UL, 7UL, 11UL, 13UL}) {
    while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
      m /= p;
      ++found[Integer(p)];
    }
  }
  for (unsigned long p = 17; p < 10000 && m > 1; p += 2) {
    if (Integer(p) * p > m)
      break;
    while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
      m /= p;
      ++found[Integer(p)];
    }
  }
  split(m, found);

  std::vector<PrimePower> result;
  result.reserve(found.size());
  for (const auto &[p, e] : found)
    result.push_back({p, e});
  return result;
}

} // namespace symcube
