#pragma once

#include <cstdint>
#include <string>
#include <vector>

// One-sided test of Vandiver's conjecture at an irregular pair (p, k): the
// omega^k-component of the cyclotomic units is reduced modulo primes q = 1 (mod p);
// a non-p-th power in F_q proves the component is not a global p-th power.
namespace cyclotower {

enum class VandiverStatus { Verified, Inconclusive };

// Projection weight: sigma_{g^t} is raised to omega^(-x)(g^t) = g^(-x t) mod p,
// so the product transforms under Galois by omega^x.
enum class EigenWeight
{
	OmegaK,			// x = k  (pinned)
	OmegaMinusK,	// x = -k
	OmegaOneMinusK,	// x = 1 - k
	OmegaKMinusOne	// x = k - 1
};

inline constexpr EigenWeight kPinnedEigenWeight = EigenWeight::OmegaK;
inline constexpr unsigned kDefaultMaxWitnesses = 8;
inline constexpr uint64_t kWitnessScanCeiling = 1'000'000;	// largest multiplier r in q = r p + 1

std::string to_string(VandiverStatus s);
std::string to_string(EigenWeight w);

struct Witness
{
	uint64_t q;
	bool is_pth_power;
};

struct WitnessReport
{
	uint64_t p;
	unsigned k;
	VandiverStatus status;
	std::vector<Witness> witnesses;
	EigenWeight weight;
};

// The count smallest primes q = r p + 1, r = 2, 4, 6, ...
std::vector<uint64_t> find_witness_primes(uint64_t p, unsigned count, uint64_t ceiling = kWitnessScanCeiling);

// Whether the projected cyclotomic unit is a p-th power in F_q.
bool unit_is_pth_power(uint64_t p, unsigned k, uint64_t q, EigenWeight weight = kPinnedEigenWeight);

// Rejects pairs that are not irregular.
WitnessReport vandiver_test(uint64_t p, unsigned k, unsigned max_witnesses = kDefaultMaxWitnesses, EigenWeight weight = kPinnedEigenWeight);

struct EigenWeightCalibration
{
	EigenWeight weight;
	unsigned pairs = 0;
	unsigned verified = 0;
	unsigned inconclusive = 0;
};

// Runs every candidate weight over all irregular pairs with p < max_p.
std::vector<EigenWeightCalibration> calibrate_eigenweights(uint64_t max_p, unsigned max_witnesses = kDefaultMaxWitnesses);

}
