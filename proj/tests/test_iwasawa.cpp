#include <doctest.h>

#include "cyclotower/bernoulli.hpp"
#include "cyclotower/iwasawa.hpp"
#include "cyclotower/modarith.hpp"
#include "cyclotower/sieve.hpp"

using namespace cyclotower;

namespace {

// Straight from the definition: d_i = -(1/p^(n+1)) sum_{i(a) = i} a omega(a)^(k-1) mod p^N.
std::vector<mpz_class> naive_group_ring(uint64_t p, unsigned k, unsigned n, unsigned N)
{
	const uint64_t P = modarith::checked_pow(p, n + 1), pn = P / p;
	const unsigned work = N + n + 1;
	const mpz_class Q = ipow(p, work), PN = ipow(p, N);
	std::vector<mpz_class> d(pn, 0);
	for (uint64_t a = 1; a < P; ++a)
	{
		if (a % p == 0) continue;
		const ResidueInt w = teichmuller(a, p, work).pow(k - 1);
		const uint64_t i = decompose(a, p, n).index.get_ui();
		d[i] += w.value() * static_cast<unsigned long>(a);
	}
	for (mpz_class & x : d)
	{
		x %= Q;
		REQUIRE(x % mpz_class(static_cast<unsigned long>(P)) == 0);
		x = -(x / static_cast<unsigned long>(P));
		mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), PN.get_mpz_t());
	}
	return d;
}

ResidueInt interpolation_target(uint64_t p, unsigned weight, unsigned N)
{
	const ExactRational euler = 1 - ExactRational(ipow(p, weight - 1));
	return residue_of(-euler * bernoulli_exact(weight) / weight, p, N);
}

}

TEST_CASE("pinned orientation")
{
	const Orientation & o = pinned_orientation();
	CHECK(o.twist == CharacterTwist::KMinusOne);
	CHECK(o.exponent_sign == -1);
	CHECK(o.overall_sign == 1);
	CHECK(candidate_orientations().size() == 8);
	for (const auto & [p, k] : std::vector<std::pair<uint64_t, unsigned>>{{5, 2}, {7, 4}, {11, 6}, {13, 10}, {37, 32}, {59, 44}})
		CHECK(pin_convention(p, k) == o);
}

TEST_CASE("build_series preconditions")
{
	CHECK_THROWS_AS(build_series(37, 3, 1, 2, 4), std::invalid_argument);
	CHECK_THROWS_AS(build_series(37, 36, 1, 2, 4), std::invalid_argument);
	CHECK_THROWS_AS(build_series(37, 0, 1, 2, 4), std::invalid_argument);
	CHECK_THROWS_AS(build_series(37, 32, 1, 2, 38), std::invalid_argument);
	CHECK_THROWS_AS(build_series(37, 32, 0, 2, 4), std::invalid_argument);
	CHECK_THROWS_AS(build_series(37, 32, 1, 0, 4), std::invalid_argument);
	CHECK_THROWS_AS(build_series(36, 32, 1, 2, 4), std::invalid_argument);
	CHECK_THROWS_AS(build_series(19997, 2, 2, 2, 4), std::length_error);
}

TEST_CASE("c_0 of regular and irregular branches")
{
	CHECK(build_series(5, 2, 1, 2, 4).coefficients[0].valuation() == 0);
	CHECK(gen_bernoulli(5, 1, 1, 1).value() != 0);
	CHECK(build_series(37, 32, 1, 2, 4).coefficients[0].valuation() >= 1);
}

TEST_CASE("kernel matches the defining sum")
{
	for (const uint64_t p : {5, 7, 11, 13})
		for (unsigned k = 2; k + 3 <= p; k += 2)
			for (unsigned n = 1; n <= 2; ++n)
				for (unsigned N : {1u, 3u, 6u})
				{
					const TruncatedSeries s = build_series(p, k, n, N, default_truncation(p, n));
					CHECK(s.group_ring == naive_group_ring(p, k, n, N));
				}
	// A multi-limb modulus (p^(N+n+1) > 2^64).
	CHECK(build_series(37, 32, 1, 12, 8).group_ring == naive_group_ring(37, 32, 1, 12));
}

TEST_CASE("batch equals single branches")
{
	const auto batch = build_series_batch(157, {62, 110}, 1, 3, 16, pinned_orientation());
	CHECK(batch[0].group_ring == build_series(157, 62, 1, 3, 16).group_ring);
	CHECK(batch[1].group_ring == build_series(157, 110, 1, 3, 16).group_ring);
}

TEST_CASE("f(0) = -B_{1,omega^(k-1)} exactly")
{
	for (const uint64_t p : {5, 7, 11, 37, 59, 67})
		for (unsigned k = 2; k + 3 <= p; k += 2)
		{
			const TruncatedSeries s = build_series(p, k, 1, 4, default_truncation(p, 1));
			CHECK(s.coefficients[0] == -gen_bernoulli(p, long(k) - 1, 1, 4));
		}
}

TEST_CASE("interpolation at negative integers")
{
	const TruncatedSeries s5 = build_series(5, 2, 1, 2, 4);
	CHECK(lp_eval(s5, -1) == residue_of(ExactRational(1, 3), 5, effective_precision(s5)));
	CHECK(lp_eval(s5, -1).reduce_to(1).value() == 2);
	CHECK(lp_eval(build_series(7, 2, 1, 2, 7), -1).reduce_to(1).value() == 4);

	for (const uint64_t p : {5, 7, 11, 13, 17})
		for (unsigned k = 2; k + 3 <= p; k += 2)
		{
			const TruncatedSeries s = build_series(p, k, 2, 3, default_truncation(p, 2));
			const unsigned Ne = effective_precision(s);
			CHECK(Ne == 3);
			for (unsigned w = k; w <= 40; w += unsigned(p - 1))
				CHECK(lp_eval(s, 1 - long(w)) == interpolation_target(p, w, Ne));
		}
}

TEST_CASE("lp_eval at s = 1 unfolds the series at T = p")
{
	const TruncatedSeries s = build_series(37, 32, 1, 2, 8);
	ResidueInt acc(37, 2, 0L), pw(37, 2, 1L);
	for (const ResidueInt & c : s.coefficients)
	{
		acc += c * pw;
		pw *= ResidueInt(37, 2, 37L);
	}
	CHECK(lp_eval(s, 1) == acc);
}

TEST_CASE("level stabilization")
{
	for (const uint64_t p : {37, 59, 67})
	{
		for (const unsigned k : irregular_pairs(p).indices)
		{
			const TruncatedSeries lo = build_series(p, k, 1, 3, 8), hi = build_series(p, k, 2, 3, 8);
			const mpz_class PN = ipow(p, 3);
			for (uint64_t i = 0; i < p; ++i)
			{
				mpz_class sum = 0;
				for (uint64_t j = i; j < p * p; j += p) sum += hi.group_ring[j];
				CHECK(sum % PN == lo.group_ring[i]);
			}
			// Coefficients agree to p^(n - floor(log_p j)) = p for j < p.
			for (unsigned j = 0; j < 8; ++j) CHECK(lo.coefficients[j].reduce_to(1) == hi.coefficients[j].reduce_to(1));
		}
	}
}

TEST_CASE("invariants examples")
{
	const BranchInvariants i37 = invariants(build_series(37, 32, 1, 2, 32));
	CHECK(i37.mu == 0);
	CHECK(i37.lambda == 1);
	CHECK(i37.a == 1);
	CHECK(i37.m == 1);
	REQUIRE(i37.c_mod_p.has_value());

	const BranchInvariants i5 = invariants(build_series(5, 2, 1, 2, 5));
	CHECK(i5.mu == 0);
	CHECK(i5.lambda == 0);
	CHECK(i5.a == 0);
	CHECK(i5.m == 0);
	CHECK_FALSE(i5.c_mod_p.has_value());

	TruncatedSeries zero = build_series(37, 32, 1, 1, 4);
	for (ResidueInt & c : zero.coefficients) c = ResidueInt(37, 1, 0L);
	CHECK_THROWS_AS(invariants(zero), EscalationRequest);
}

TEST_CASE("Newton root and c")
{
	for (const uint64_t p : {37, 59, 67, 101, 103, 131, 149})
	{
		for (const unsigned k : irregular_pairs(p).indices)
		{
			const TruncatedSeries s = build_series(p, k, 1, 2, 32);
			const auto theta = newton_root(s);
			REQUIRE(theta.has_value());
			CHECK(evaluate(s, *theta).is_zero());
			CHECK(theta->valuation() >= 1);
			const BranchInvariants inv = invariants(s);
			REQUIRE(inv.c_mod_p.has_value());
			const uint64_t c = *inv.c_mod_p;
			// theta = -c p^a mod p^(a+1).
			CHECK(mpz_class(theta->value() / ipow(p, unsigned(inv.a)) % static_cast<unsigned long>(p)) == (p - c) % p);
		}
	}
}

TEST_CASE("branch_invariants escalation policy")
{
	const std::vector<BranchInvariants> inv = branch_invariants(157, {62, 110});
	REQUIRE(inv.size() == 2);
	for (const BranchInvariants & x : inv)
	{
		CHECK(x.lambda == 1);
		CHECK(x.level_used == 1);
		CHECK(x.precision_used == 2);
	}
	// Forcing N = 1 cannot determine a; the first escalation (N = 2, level 2) does.
	PrecisionPolicy tight;
	tight.precision = 1;
	const BranchInvariants e = branch_invariants(37, {32}, tight).front();
	CHECK(e.level_used == 2);
	CHECK(e.a == 1);

	tight.max_escalations = 0;
	CHECK_THROWS_AS(branch_invariants(37, {32}, tight), std::runtime_error);
	PrecisionPolicy huge;
	huge.level = 2;
	CHECK_THROWS_AS(branch_invariants(19997, {2}, huge), std::runtime_error);
}
