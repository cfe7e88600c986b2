#include "cyclotower/modarith.hpp"

#include <stdexcept>
#include <vector>

namespace cyclotower::modarith {

uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m)
{
	uint64_t r = 1 % m, b = base % m;
	while (exp != 0)
	{
		if (exp & 1) r = mulmod(r, b, m);
		b = mulmod(b, b, m);
		exp >>= 1;
	}
	return r;
}

uint64_t invmod(uint64_t a, uint64_t m)
{
	__int128 t = 0, nt = 1;
	__int128 r = m, nr = a % m;
	while (nr != 0)
	{
		const __int128 q = r / nr;
		__int128 tmp = t - q * nt; t = nt; nt = tmp;
		tmp = r - q * nr; r = nr; nr = tmp;
	}
	if (r != 1) throw std::domain_error("invmod: argument is not a unit");
	if (t < 0) t += m;
	return uint64_t(t);
}

bool is_prime(uint64_t n)
{
	if (n < 2) return false;
	static constexpr uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
	for (const uint64_t q : small)
	{
		if (n == q) return true;
		if (n % q == 0) return false;
	}
	uint64_t d = n - 1;
	int s = 0;
	while ((d & 1) == 0) { d >>= 1; ++s; }

	for (const uint64_t a : small)
	{
		uint64_t x = powmod(a, d, n);
		if (x == 1 || x == n - 1) continue;
		bool composite = true;
		for (int i = 1; i < s; ++i)
		{
			x = mulmod(x, x, n);
			if (x == n - 1) { composite = false; break; }
		}
		if (composite) return false;
	}
	return true;
}

uint64_t primitive_root(uint64_t p)
{
	std::vector<uint64_t> factors;
	uint64_t m = p - 1;
	for (uint64_t q = 2; q * q <= m; ++q)
	{
		if (m % q == 0)
		{
			factors.push_back(q);
			while (m % q == 0) m /= q;
		}
	}
	if (m > 1) factors.push_back(m);

	for (uint64_t g = 2; g < p; ++g)
	{
		bool ok = true;
		for (const uint64_t q : factors)
		{
			if (powmod(g, (p - 1) / q, p) == 1) { ok = false; break; }
		}
		if (ok) return g;
	}
	throw std::domain_error("primitive_root: no generator (argument not prime?)");
}

uint64_t checked_pow(uint64_t p, unsigned e)
{
	__uint128_t r = 1;
	for (unsigned i = 0; i < e; ++i)
	{
		r *= p;
		if (r >= (__uint128_t(1) << 63)) return 0;
	}
	return uint64_t(r);
}

}
