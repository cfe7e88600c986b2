#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace cyclotower {

// Calls visit(q) for every prime q in [from, to), in increasing order, using a
// segmented sieve of Eratosthenes with a fixed segment size.
void for_each_prime(uint64_t from, uint64_t to, const std::function<void(uint64_t)> & visit);

std::vector<uint64_t> primes_in_range(uint64_t from, uint64_t to);

}
