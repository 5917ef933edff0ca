#pragma once

#include "symcube/padic.hpp"

#include <utility>
#include <vector>

namespace symcube {

struct PrimePower {
  Integer prime;
  long exponent = 0;
};

/// Prime factorization of |n| with primes in increasing order.
/// Throws InputError for n = 0.
std::vector<PrimePower> factorize(const Integer &n);

} // namespace symcube
