#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cyclotower/iwasawa.hpp"
#include "cyclotower/vandiver.hpp"

// Per-prime verdict on the three hypotheses (Vandiver, lambda_p = 1, m <= a)
// that certify the pseudo-null conjecture along the whole tower Q(zeta_{p^n}).
namespace cyclotower {

inline constexpr int kSchemaVersion = 1;

enum class Condition { Vandiver, Lambda, MLeA, Inconclusive };

std::string to_string(Condition c);

struct IrregularPairData
{
	unsigned k;	// even Bernoulli index
	unsigned j;	// odd companion p - k; omega^(1-j) = omega^k
	BranchInvariants invariants;
	WitnessReport vandiver;
};

struct Lemma2Row
{
	unsigned n;
	uint64_t g;
	uint64_t s;
	uint64_t r2;
};

struct Theorem1Verdict
{
	bool applies = false;
	std::string reason;
	std::vector<Condition> failed_conditions;
};

struct PrimeCertificate
{
	uint64_t p = 0;
	bool is_regular = true;
	unsigned index_of_irregularity = 0;
	std::vector<IrregularPairData> pairs;
	unsigned lambda_p = 0;
	unsigned alpha = 0;
	bool alpha_conditional = false;
	Theorem1Verdict theorem1;
	std::vector<Lemma2Row> lemma2_table;
	std::optional<std::string> theorem2_note;
	int schema_version = kSchemaVersion;
};

struct CertifyConfig
{
	PrecisionPolicy precision;
	unsigned max_witnesses = kDefaultMaxWitnesses;
	unsigned n_max = 3;
};

PrimeCertificate certify(uint64_t p, const CertifyConfig & config = {});

// g = r_2 + 1 + alpha, s = alpha with r_2 = (p^n - p^(n-1))/2.
Lemma2Row lemma2_gs(uint64_t p, unsigned n, unsigned alpha);

// The formulas as printed: r_2 = (p^n + p^(n-1))/2, g = (p^n + p^(n-1) + 2)/2 + alpha.
Lemma2Row lemma2_gs_printed(uint64_t p, unsigned n, unsigned alpha);

// Whether the p-class group of Q(zeta_{p^n}) is certified cyclic.
bool corollary2_check(const PrimeCertificate & cert, unsigned n);

// Consequence for G_K, K = Q(zeta_p); throws std::domain_error unless theorem1.applies.
std::string theorem2_note(const PrimeCertificate & cert);

// Exit-code class of a verdict: applies, definite failure, or inconclusive.
enum class VerdictClass { Applies, Fails, Inconclusive };
VerdictClass classify(const PrimeCertificate & cert);

// Canonical JSON (schema_version 1), with the sha256 integrity field.
nlohmann::json to_json(const PrimeCertificate & cert);

// Keys left out of the integrity hash.
bool is_timing_field(const std::string & key);

// SHA-256 over the compact dump of j without "sha256" and timing fields.
std::string integrity_hash(const nlohmann::json & j);
bool verify_integrity(const nlohmann::json & j);
void seal(nlohmann::json & j);

std::string sha256_hex(const std::string & data);

}
