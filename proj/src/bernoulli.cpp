#include "cyclotower/bernoulli.hpp"

#include <mutex>
#include <stdexcept>
#include <string>

#include "cyclotower/modarith.hpp"

namespace cyclotower {

std::vector<ExactRational> bernoulli_exact_table(unsigned n_max)
{
	std::vector<ExactRational> B(n_max + 1);
	B[0] = 1;
	if (n_max >= 1) B[1] = ExactRational(-1, 2);
	for (unsigned n = 2; n <= n_max; ++n)
	{
		if (n & 1) { B[n] = 0; continue; }
		mpz_class c = 1;	// C(n+1, j)
		ExactRational s = 0;
		for (unsigned j = 0; j < n; ++j)
		{
			if (j == 1 || (j & 1) == 0) s += c * B[j];
			c = c * (n + 1 - j) / (j + 1);
		}
		B[n] = -s / (n + 1);
		B[n].canonicalize();
	}
	return B;
}

ExactRational bernoulli_exact(unsigned n, unsigned oracle_bound)
{
	if (n > oracle_bound)
		throw std::out_of_range("bernoulli_exact: n = " + std::to_string(n) + " exceeds oracle bound " + std::to_string(oracle_bound));

	static std::mutex mutex;
	static std::vector<ExactRational> cache;
	std::lock_guard<std::mutex> lock(mutex);
	if (n >= cache.size()) cache = bernoulli_exact_table(std::max(n, 2 * unsigned(cache.size())));
	return cache[n];
}

uint32_t BernoulliModTable::at(unsigned k) const
{
	if ((k & 1) != 0 || k < 2 || k + 3 > _p)
		throw std::out_of_range("BernoulliModTable::at: k must be even in [2, p-3]");
	return _residues[(k - 2) / 2];
}

BernoulliModTable bernoulli_mod_p(uint64_t p)
{
	require_odd_prime(p, "bernoulli_mod_p");
	if (p >= (uint64_t(1) << 21)) throw std::invalid_argument("bernoulli_mod_p: p too large for the word-sized kernel");

	// x coth x = C(u)/S(u), u = x^2, C_n = 1/(2n)!, S_n = 1/(2n+1)!;
	// B_{2n} = (2n)! Q_n / 4^n where Q = C/S.
	const size_t L = (p - 3) / 2 + 1;	// Q_0 .. Q_{(p-3)/2}
	std::vector<uint64_t> fact(p - 1), inv_fact(p - 1);
	fact[0] = 1;
	for (uint64_t i = 1; i < p - 1; ++i) fact[i] = fact[i - 1] * i % p;
	inv_fact[p - 2] = modarith::invmod(fact[p - 2], p);
	for (uint64_t i = p - 2; i > 0; --i) inv_fact[i - 1] = inv_fact[i] * i % p;

	// S stored reversed so the convolution walks both arrays forwards.
	std::vector<uint32_t> Q(L), Srev(L);
	for (size_t n = 0; n < L; ++n) Srev[L - 1 - n] = uint32_t(inv_fact[2 * n + 1]);

	Q[0] = 1;
	for (size_t n = 1; n < L; ++n)
	{
		// sum_{m=0}^{n-1} Q_m S_{n-m}; p^3/2 < 2^64 for p < 2^21, so no overflow.
		const uint32_t * s = &Srev[L - 1 - n];
		uint64_t acc = 0;
		for (size_t m = 0; m < n; ++m) acc += uint64_t(Q[m]) * s[m];
		const uint64_t c = inv_fact[2 * n];
		Q[n] = uint32_t(modarith::submod(c, acc % p, p));
	}

	std::vector<uint32_t> residues(L - 1);
	const uint64_t inv4 = modarith::invmod(4, p);
	uint64_t inv4n = 1;
	for (size_t n = 1; n < L; ++n)
	{
		inv4n = inv4n * inv4 % p;
		residues[n - 1] = uint32_t(fact[2 * n] * Q[n] % p * inv4n % p);
	}
	return BernoulliModTable(p, std::move(residues));
}

uint32_t bernoulli_single_mod_p(uint64_t p, unsigned k)
{
	require_odd_prime(p, "bernoulli_single_mod_p");
	if ((k & 1) != 0 || k < 2 || k + 3 > p) throw std::invalid_argument("bernoulli_single_mod_p: k must be even in [2, p-3]");
	const uint64_t p2 = p * p;
	uint64_t s = 0;
	for (uint64_t a = 1; a < p; ++a) s = modarith::addmod(s, modarith::powmod(a, k, p2), p2);
	if (s % p != 0) throw std::logic_error("bernoulli_single_mod_p: power sum not divisible by p");
	return uint32_t(s / p);
}

IrregularPairSet irregular_pairs(const BernoulliModTable & table)
{
	IrregularPairSet set{table.p(), {}};
	const auto & r = table.residues();
	for (size_t i = 0; i < r.size(); ++i)
		if (r[i] == 0) set.indices.push_back(unsigned(2 * i + 2));
	return set;
}

IrregularPairSet irregular_pairs(uint64_t p)
{
	return irregular_pairs(bernoulli_mod_p(p));
}

ResidueInt gen_bernoulli(uint64_t p, long i, unsigned n, unsigned N)
{
	require_odd_prime(p, "gen_bernoulli");
	if (n == 0 || N == 0) throw std::invalid_argument("gen_bernoulli: weight and precision must be >= 1");
	const long e = long(modarith::reduce_signed(i, p - 1));
	if (e == 0) throw std::invalid_argument("gen_bernoulli: trivial character has conductor 1, not p");

	// B_{n,chi} = (1/p) sum_{a=1}^{p-1} chi(a) X_a with X_a = p^n B_n(a/p)
	//           = sum_j C(n,j) B_j a^(n-j) p^j, a p-integral rational.
	const unsigned work = N + n + 1;
	const mpz_class m = ipow(p, work);
	std::vector<mpz_class> Bj(n + 1);
	std::vector<mpz_class> binom(n + 1);
	{
		mpz_class c = 1, pj = 1;
		for (unsigned j = 0; j <= n; ++j)
		{
			// C(n,j) B_j p^j reduced to Z/p^work.
			const ExactRational term = ExactRational(c * pj) * bernoulli_exact(j, std::max(n, kDefaultOracleBound));
			Bj[j] = residue_of(term, p, work).value();
			c = c * (n - j) / (j + 1);
			pj *= p;
		}
	}

	mpz_class sum = 0;
	for (uint64_t a = 1; a < p; ++a)
	{
		const ResidueInt w = teichmuller(mpz_class(static_cast<unsigned long>(a)), p, work).pow(mpz_class(e));
		mpz_class x = 0, apow = 1;	// a^(n-j) built from j = n downwards
		for (unsigned j = n + 1; j-- > 0;)
		{
			x += Bj[j] * apow;
			apow *= a;
		}
		sum += w.value() * x;
		mpz_fdiv_r(sum.get_mpz_t(), sum.get_mpz_t(), m.get_mpz_t());
	}
	if (!mpz_divisible_ui_p(sum.get_mpz_t(), p))
		throw std::domain_error("gen_bernoulli: B_{" + std::to_string(n) + ",omega^" + std::to_string(e) + "} is not p-integral");
	return ResidueInt(p, N, mpz_class(sum / p));
}

}
