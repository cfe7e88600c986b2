#include <doctest.h>

#include "cyclotower/bernoulli.hpp"
#include "cyclotower/modarith.hpp"
#include "cyclotower/vandiver.hpp"

using namespace cyclotower;

TEST_CASE("witness primes")
{
	CHECK(find_witness_primes(5, 1) == std::vector<uint64_t>{11});
	CHECK(find_witness_primes(37, 2) == std::vector<uint64_t>{149, 223});
	CHECK(find_witness_primes(101, 1) == std::vector<uint64_t>{607});

	// Oracle: trial division over q = r p + 1, r even.
	for (const uint64_t p : {37ULL, 157ULL, 1999ULL})
	{
		std::vector<uint64_t> expect;
		for (uint64_t r = 2; expect.size() < 8; r += 2)
		{
			const uint64_t q = r * p + 1;
			bool prime = true;
			for (uint64_t d = 2; d * d <= q && prime; ++d) prime = q % d != 0;
			if (prime) expect.push_back(q);
		}
		CHECK(find_witness_primes(p, 8) == expect);
	}
	CHECK_THROWS(find_witness_primes(37, 8, 4));
}

TEST_CASE("Vandiver test examples")
{
	const WitnessReport r37 = vandiver_test(37, 32, 4);
	CHECK(r37.status == VandiverStatus::Verified);
	CHECK(r37.weight == kPinnedEigenWeight);
	REQUIRE_FALSE(r37.witnesses.empty());
	CHECK_FALSE(r37.witnesses.back().is_pth_power);
	CHECK(vandiver_test(59, 44, 4).status == VandiverStatus::Verified);
	CHECK_THROWS_AS(vandiver_test(5, 2, 1), std::invalid_argument);
	CHECK_THROWS_AS(vandiver_test(37, 30, 4), std::invalid_argument);
	CHECK_THROWS_AS(vandiver_test(37, 32, 0), std::invalid_argument);
	CHECK_THROWS_AS(unit_is_pth_power(37, 32, 151), std::invalid_argument);
}

TEST_CASE("early exit keeps witnesses in scan order")
{
	const WitnessReport r = vandiver_test(157, 62, 8);
	const std::vector<uint64_t> qs = find_witness_primes(157, unsigned(r.witnesses.size()));
	for (size_t i = 0; i < r.witnesses.size(); ++i)
	{
		CHECK(r.witnesses[i].q == qs[i]);
		CHECK(r.witnesses[i].is_pth_power == (i + 1 < r.witnesses.size()));
	}
}

TEST_CASE("a p-th power answer is consistent across weights that coincide")
{
	// omega^k and omega^(k - (p-1)) are the same character, so the answers must agree.
	for (const uint64_t q : find_witness_primes(37, 4))
		CHECK(unit_is_pth_power(37, 32, q, EigenWeight::OmegaK) == unit_is_pth_power(37, 32 + 36, q, EigenWeight::OmegaK));
}

TEST_CASE("pinned weight verifies every pair below 400")
{
	const auto cal = calibrate_eigenweights(400);
	bool found = false;
	for (const EigenWeightCalibration & c : cal)
	{
		if (c.weight != kPinnedEigenWeight) continue;
		found = true;
		CHECK(c.pairs > 0);
		CHECK(c.verified == c.pairs);
		CHECK(c.inconclusive == 0);
	}
	CHECK(found);
	CHECK(to_string(VandiverStatus::Verified) == "VERIFIED");
	CHECK(to_string(VandiverStatus::Inconclusive) == "INCONCLUSIVE");
}
