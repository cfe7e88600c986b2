#include "cyclotower/certificates.hpp"

#include <algorithm>
#include <stdexcept>

#include <openssl/evp.h>

#include "cyclotower/bernoulli.hpp"
#include "cyclotower/modarith.hpp"

namespace cyclotower {

std::string to_string(Condition c)
{
	switch (c)
	{
	case Condition::Vandiver: return "VANDIVER";
	case Condition::Lambda: return "LAMBDA";
	case Condition::MLeA: return "M_LE_A";
	case Condition::Inconclusive: return "INCONCLUSIVE";
	}
	return "?";
}

static uint64_t checked_power(uint64_t p, unsigned n, const char * where)
{
	const uint64_t r = modarith::checked_pow(p, n);
	if (r == 0) throw std::overflow_error(std::string(where) + ": p^n does not fit in 63 bits");
	return r;
}

Lemma2Row lemma2_gs(uint64_t p, unsigned n, unsigned alpha)
{
	require_odd_prime(p, "lemma2_gs");
	if (n == 0) throw std::invalid_argument("lemma2_gs: n must be >= 1");
	const uint64_t pn = checked_power(p, n, "lemma2_gs");
	const uint64_t r2 = (pn - pn / p) / 2;	// phi(p^n) / 2 complex places
	return Lemma2Row{n, r2 + 1 + alpha, alpha, r2};
}

Lemma2Row lemma2_gs_printed(uint64_t p, unsigned n, unsigned alpha)
{
	require_odd_prime(p, "lemma2_gs");
	if (n == 0) throw std::invalid_argument("lemma2_gs: n must be >= 1");
	const uint64_t pn = checked_power(p, n, "lemma2_gs");
	const uint64_t r2 = (pn + pn / p) / 2;
	return Lemma2Row{n, r2 + 1 + alpha, alpha, r2};
}

PrimeCertificate certify(uint64_t p, const CertifyConfig & config)
{
	require_odd_prime(p, "certify");

	PrimeCertificate cert;
	cert.p = p;
	const IrregularPairSet set = irregular_pairs(bernoulli_mod_p(p));
	cert.is_regular = set.regular();
	cert.index_of_irregularity = unsigned(set.index_of_irregularity());

	if (!cert.is_regular)
	{
		const std::vector<BranchInvariants> invs = branch_invariants(p, set.indices, config.precision);
		for (size_t r = 0; r < set.indices.size(); ++r)
		{
			const unsigned k = set.indices[r];
			cert.pairs.push_back(IrregularPairData{k, unsigned(p) - k, invs[r], vandiver_test(p, k, config.max_witnesses)});
		}
	}

	bool all_verified = true;
	for (const auto & pair : cert.pairs)
	{
		cert.lambda_p += pair.invariants.lambda;
		all_verified = all_verified && pair.vandiver.status == VandiverStatus::Verified;
	}
	cert.alpha = cert.index_of_irregularity;
	cert.alpha_conditional = !all_verified;

	Theorem1Verdict & v = cert.theorem1;
	if (cert.is_regular)
	{
		v.applies = true;
		v.reason = "regular";
	}
	else
	{
		if (!all_verified) v.failed_conditions.push_back(Condition::Inconclusive);
		if (cert.lambda_p != 1) v.failed_conditions.push_back(Condition::Lambda);
		if (std::any_of(cert.pairs.begin(), cert.pairs.end(), [](const IrregularPairData & d) { return d.invariants.m > d.invariants.a; }))
			v.failed_conditions.push_back(Condition::MLeA);
		v.applies = v.failed_conditions.empty();
		if (v.applies) v.reason = "conditions (1)-(3) verified";
		else
		{
			v.reason = "failed:";
			for (const Condition c : v.failed_conditions) v.reason += " " + to_string(c);
		}
	}

	for (unsigned n = 1; n <= config.n_max; ++n) cert.lemma2_table.push_back(lemma2_gs(p, n, cert.alpha));
	if (v.applies) cert.theorem2_note = theorem2_note(cert);
	return cert;
}

bool corollary2_check(const PrimeCertificate & cert, unsigned n)
{
	if (n == 0) throw std::invalid_argument("corollary2_check: n must be >= 1");
	// The prime above p is totally ramified in the tower (hence non-split) and the fields
	// are abelian, so Leopoldt holds; only cyclicity of the p-class group is left.
	if (cert.is_regular) return true;
	// A_n = Z/p^(a+n) under Vandiver and lambda_p = 1.
	return cert.index_of_irregularity == 1 && cert.lambda_p == 1
		&& std::all_of(cert.pairs.begin(), cert.pairs.end(), [](const IrregularPairData & d) { return d.vandiver.status == VandiverStatus::Verified; });
}

std::string theorem2_note(const PrimeCertificate & cert)
{
	if (!cert.theorem1.applies)
		throw std::domain_error("theorem2_note: the pseudo-null conjecture is not certified for p = " + std::to_string(cert.p));
	const uint64_t rank = lemma2_gs(cert.p, 1, 0).r2 + 1;
	const std::string ps = std::to_string(cert.p), rs = std::to_string(rank);
	if (cert.is_regular)
		return "free of rank " + rs + ": G_K for K = Q(zeta_" + ps + ") is a free pro-" + ps + " group on r_2 + 1 = " + rs + " generators (s = 0)";
	return "no free pro-p quotient of rank " + rs + ": p = " + ps + " is irregular and the pseudo-null conjecture holds for Q(zeta_" + ps + ")";
}

VerdictClass classify(const PrimeCertificate & cert)
{
	if (cert.theorem1.applies) return VerdictClass::Applies;
	const auto & f = cert.theorem1.failed_conditions;
	const bool definite = std::any_of(f.begin(), f.end(), [](Condition c) { return c != Condition::Inconclusive; });
	return definite ? VerdictClass::Fails : VerdictClass::Inconclusive;
}

nlohmann::json to_json(const PrimeCertificate & cert)
{
	using nlohmann::json;
	json j;
	j["schema_version"] = cert.schema_version;
	j["p"] = cert.p;
	j["is_regular"] = cert.is_regular;
	j["index_of_irregularity"] = cert.index_of_irregularity;

	json pairs = json::array();
	json m_le_a = json::array();
	json vandiver = json::array();
	for (const auto & d : cert.pairs)
	{
		const BranchInvariants & inv = d.invariants;
		json w = json::array();
		for (const Witness & x : d.vandiver.witnesses) w.push_back({{"q", x.q}, {"is_pth_power", x.is_pth_power}});
		pairs.push_back({
			{"k", d.k},
			{"j", d.j},
			{"invariants", {
				{"mu", inv.mu}, {"lambda", inv.lambda}, {"a", inv.a}, {"m", inv.m},
				{"c_mod_p", inv.c_mod_p ? json(*inv.c_mod_p) : json(nullptr)},
				{"precision_used", inv.precision_used}, {"level_used", inv.level_used}}},
			{"vandiver", {{"status", to_string(d.vandiver.status)}, {"witnesses", w}}},
		});
		m_le_a.push_back({{"k", d.k}, {"m", inv.m}, {"a", inv.a}, {"holds", inv.m <= inv.a}});
		vandiver.push_back({{"k", d.k}, {"status", to_string(d.vandiver.status)}});
	}
	j["pairs"] = pairs;
	j["lambda_p"] = cert.lambda_p;
	j["lambda_p_label"] = "lambda_p (minus part, under Vandiver)";
	j["alpha"] = cert.alpha;
	j["alpha_conditional"] = cert.alpha_conditional;

	json failed = json::array();
	for (const Condition c : cert.theorem1.failed_conditions) failed.push_back(to_string(c));
	json t1 = {{"applies", cert.theorem1.applies}, {"reason", cert.theorem1.reason}, {"failed_conditions", failed}};
	if (!cert.is_regular)
	{
		t1["support"] = {
			{"vandiver", vandiver},
			{"lambda_p_equals_1", {{"lambda_p", cert.lambda_p}, {"holds", cert.lambda_p == 1}}},
			{"m_le_a", m_le_a},
		};
	}
	j["theorem1"] = t1;

	json rows = json::array();
	for (const Lemma2Row & r : cert.lemma2_table) rows.push_back({{"n", r.n}, {"g", r.g}, {"s", r.s}, {"r_2", r.r2}});
	j["lemma2_table"] = rows;
	j["theorem2_note"] = cert.theorem2_note ? json(*cert.theorem2_note) : json(nullptr);
	j["conventions"] = {
		{"series", pinned_orientation().describe()},
		{"branch", "k = p - j, omega^(1-j) = omega^k"},
		{"vandiver_eigenweight", to_string(kPinnedEigenWeight)},
		{"r_2", "(p^n - p^(n-1))/2"},
	};
	seal(j);
	return j;
}

bool is_timing_field(const std::string & key)
{
	return key == "elapsed_ms" || key == "elapsed_seconds";
}

std::string sha256_hex(const std::string & data)
{
	unsigned char digest[EVP_MAX_MD_SIZE];
	unsigned int len = 0;
	if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
		throw std::runtime_error("sha256: digest failed");
	static const char hex[] = "0123456789abcdef";
	std::string out;
	for (unsigned int i = 0; i < len; ++i)
	{
		out.push_back(hex[digest[i] >> 4]);
		out.push_back(hex[digest[i] & 15]);
	}
	return out;
}

std::string integrity_hash(const nlohmann::json & j)
{
	nlohmann::json copy = j;
	copy.erase("sha256");
	for (auto it = copy.begin(); it != copy.end();)
	{
		if (is_timing_field(it.key())) it = copy.erase(it);
		else ++it;
	}
	return sha256_hex(copy.dump());
}

bool verify_integrity(const nlohmann::json & j)
{
	return j.is_object() && j.contains("sha256") && j["sha256"].is_string() && j["sha256"].get<std::string>() == integrity_hash(j);
}

void seal(nlohmann::json & j)
{
	j["sha256"] = integrity_hash(j);
}

}
