#include "cyclotower/vandiver.hpp"

#include <stdexcept>

#include "cyclotower/bernoulli.hpp"
#include "cyclotower/modarith.hpp"
#include "cyclotower/sieve.hpp"

namespace cyclotower {

using modarith::mulmod;
using modarith::powmod;

std::string to_string(VandiverStatus s)
{
	return s == VandiverStatus::Verified ? "VERIFIED" : "INCONCLUSIVE";
}

std::string to_string(EigenWeight w)
{
	switch (w)
	{
	case EigenWeight::OmegaK: return "omega^k";
	case EigenWeight::OmegaMinusK: return "omega^-k";
	case EigenWeight::OmegaOneMinusK: return "omega^(1-k)";
	case EigenWeight::OmegaKMinusOne: return "omega^(k-1)";
	}
	return "?";
}

static int64_t weight_exponent(EigenWeight w, unsigned k)
{
	switch (w)
	{
	case EigenWeight::OmegaK: return int64_t(k);
	case EigenWeight::OmegaMinusK: return -int64_t(k);
	case EigenWeight::OmegaOneMinusK: return 1 - int64_t(k);
	case EigenWeight::OmegaKMinusOne: return int64_t(k) - 1;
	}
	return 0;
}

std::vector<uint64_t> find_witness_primes(uint64_t p, unsigned count, uint64_t ceiling)
{
	require_odd_prime(p, "find_witness_primes");
	std::vector<uint64_t> out;
	for (uint64_t r = 2; out.size() < count; r += 2)
	{
		if (r > ceiling) throw std::runtime_error("find_witness_primes: scan ceiling reached for p = " + std::to_string(p));
		const uint64_t q = r * p + 1;
		if (modarith::is_prime(q)) out.push_back(q);
	}
	return out;
}

bool unit_is_pth_power(uint64_t p, unsigned k, uint64_t q, EigenWeight weight)
{
	if (q % p != 1 || !modarith::is_prime(q)) throw std::invalid_argument("unit_is_pth_power: q must be a prime = 1 mod p");

	// zeta of order p in F_q.
	uint64_t zeta = 1;
	for (uint64_t h = 2; zeta == 1; ++h) zeta = powmod(h, (q - 1) / p, q);

	std::vector<uint64_t> zpow(p);
	zpow[0] = 1;
	for (uint64_t j = 1; j < p; ++j) zpow[j] = mulmod(zpow[j - 1], zeta, q);

	const uint64_t g = modarith::primitive_root(p);
	const uint64_t g_inv_x = powmod(modarith::invmod(g, p), modarith::reduce_signed(weight_exponent(weight, k), p - 1), p);
	const uint64_t inv2 = (p + 1) / 2;
	const uint64_t shift = mulmod(modarith::submod(1, g, p), inv2, p);	// (1-g)/2 mod p

	// eta = prod_t sigma_{g^t}(xi)^{e_t}, xi = zeta^((1-g)/2) (1 - zeta^g) / (1 - zeta) real.
	uint64_t num = 1, den = 1;
	uint64_t c = 1, e = 1;	// c = g^t mod p, e = g^(-x t) mod p
	for (uint64_t t = 0; t <= (p - 3) / 2; ++t)
	{
		const uint64_t top = mulmod(zpow[mulmod(c, shift, p)], modarith::submod(1, zpow[mulmod(c, g, p)], q), q);
		const uint64_t bottom = modarith::submod(1, zpow[c], q);
		num = mulmod(num, powmod(top, e, q), q);
		den = mulmod(den, powmod(bottom, e, q), q);
		c = mulmod(c, g, p);
		e = mulmod(e, g_inv_x, p);
	}
	if (num == 0 || den == 0) throw std::logic_error("unit_is_pth_power: projected unit vanished in F_q (zeta of wrong order)");
	const uint64_t eta = mulmod(num, modarith::invmod(den, q), q);
	return powmod(eta, (q - 1) / p, q) == 1;
}

WitnessReport vandiver_test(uint64_t p, unsigned k, unsigned max_witnesses, EigenWeight weight)
{
	require_odd_prime(p, "vandiver_test");
	if (max_witnesses == 0) throw std::invalid_argument("vandiver_test: max_witnesses must be positive");
	if ((k & 1) != 0 || k < 2 || k + 3 > p || bernoulli_single_mod_p(p, k) != 0)
		throw std::invalid_argument("vandiver_test: (" + std::to_string(p) + ", " + std::to_string(k) + ") is not an irregular pair");

	WitnessReport report{p, k, VandiverStatus::Inconclusive, {}, weight};
	for (const uint64_t q : find_witness_primes(p, max_witnesses))
	{
		const bool power = unit_is_pth_power(p, k, q, weight);
		report.witnesses.push_back(Witness{q, power});
		if (!power)
		{
			report.status = VandiverStatus::Verified;
			break;
		}
	}
	return report;
}

std::vector<EigenWeightCalibration> calibrate_eigenweights(uint64_t max_p, unsigned max_witnesses)
{
	std::vector<EigenWeightCalibration> out;
	for (const EigenWeight w : {EigenWeight::OmegaK, EigenWeight::OmegaMinusK, EigenWeight::OmegaOneMinusK, EigenWeight::OmegaKMinusOne})
		out.push_back(EigenWeightCalibration{w});

	for (const uint64_t p : primes_in_range(5, max_p))
	{
		for (const unsigned k : irregular_pairs(p).indices)
		{
			for (auto & cal : out)
			{
				const WitnessReport r = vandiver_test(p, k, max_witnesses, cal.weight);
				++cal.pairs;
				if (r.status == VandiverStatus::Verified) ++cal.verified;
				else ++cal.inconclusive;
			}
		}
	}
	return out;
}

}
