#include "cyclotower/sieve.hpp"

#include <algorithm>
#include <cmath>

namespace cyclotower {

namespace {

constexpr uint64_t kSegment = uint64_t(1) << 16;

std::vector<uint64_t> base_primes(uint64_t limit)
{
	std::vector<bool> composite(limit + 1, false);
	std::vector<uint64_t> out;
	for (uint64_t i = 2; i <= limit; ++i)
	{
		if (composite[i]) continue;
		out.push_back(i);
		for (uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
	}
	return out;
}

}

void for_each_prime(uint64_t from, uint64_t to, const std::function<void(uint64_t)> & visit)
{
	if (to <= from) return;
	from = std::max<uint64_t>(from, 2);
	uint64_t root = uint64_t(std::sqrt(double(to)));
	while (root * root < to) ++root;
	const std::vector<uint64_t> small = base_primes(root);

	std::vector<char> sieve(kSegment);
	for (uint64_t lo = from; lo < to; lo += kSegment)
	{
		const uint64_t hi = std::min(lo + kSegment, to);
		std::fill(sieve.begin(), sieve.end(), 1);
		for (const uint64_t q : small)
		{
			if (q * q >= hi) break;
			uint64_t start = std::max(q * q, (lo + q - 1) / q * q);
			for (uint64_t j = start; j < hi; j += q) sieve[j - lo] = 0;
		}
		for (uint64_t x = lo; x < hi; ++x)
			if (sieve[x - lo]) visit(x);
	}
}

std::vector<uint64_t> primes_in_range(uint64_t from, uint64_t to)
{
	std::vector<uint64_t> out;
	for_each_prime(from, to, [&out](uint64_t q) { out.push_back(q); });
	return out;
}

}
