#pragma once

#include <cstdint>

// Word-sized modular arithmetic shared by the kernels. Moduli must be < 2^63.
namespace cyclotower::modarith {

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m)
{
	return uint64_t(__uint128_t(a) * b % m);
}

inline uint64_t addmod(uint64_t a, uint64_t b, uint64_t m)
{
	const uint64_t s = a + b;
	return (s >= m) ? s - m : s;
}

inline uint64_t submod(uint64_t a, uint64_t b, uint64_t m)
{
	return (a >= b) ? a - b : a + m - b;
}

uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m);

// Inverse of a modulo m; a must be a unit.
uint64_t invmod(uint64_t a, uint64_t m);

// a mod m for signed a.
inline uint64_t reduce_signed(int64_t a, uint64_t m)
{
	const int64_t r = a % int64_t(m);
	return uint64_t(r < 0 ? r + int64_t(m) : r);
}

// Deterministic Miller-Rabin; the fixed base set is exact for n < 3.3 * 10^24.
bool is_prime(uint64_t n);

// Smallest primitive root modulo the odd prime p.
uint64_t primitive_root(uint64_t p);

// p^e, or 0 when the result does not fit in 63 bits.
uint64_t checked_pow(uint64_t p, unsigned e);

}
