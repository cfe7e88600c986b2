#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cyclotower/certificates.hpp"

// Checkpointed sweep over a prime range. Certificates go to a JSONL file in
// ascending p; a sidecar <out>.ckpt holds {"frontier", "schema_version"}, the
// largest prime whose line is complete, and is replaced by atomic rename.
namespace cyclotower {

// A certificate line fails its hash or the file contradicts its checkpoint.
class IntegrityError : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

struct ScanOptions
{
	uint64_t from = 5;
	uint64_t to = 0;
	unsigned jobs = 1;
	std::string out_path;
	std::string checkpoint_path;	// empty: out_path + ".ckpt"
	CertifyConfig config;
	uint64_t max_new_primes = 0;	// stop after this many new lines (0: no limit)
	bool overwrite = false;
};

struct ScanSummary
{
	uint64_t from = 0;
	uint64_t to = 0;
	uint64_t primes_processed = 0;
	uint64_t irregular_count = 0;
	std::map<unsigned, uint64_t> index_histogram;	// i(p) -> count, irregular p only
	uint64_t lambda1_count = 0;
	double lambda1_fraction = 0;
	std::vector<std::pair<uint64_t, unsigned>> c_minus_one_hits;	// (p, k) with a = 1, c = -1 mod p
	std::vector<uint64_t> inconclusive;
	double elapsed_seconds = 0;
	bool complete = false;	// every prime of the range has a line
};

// Folds one certificate line into the summary (lines must arrive in ascending p).
void accumulate(ScanSummary & summary, const nlohmann::json & cert);

nlohmann::json to_json(const ScanSummary & summary);

ScanSummary scan(const ScanOptions & options);

std::string checkpoint_path_for(const ScanOptions & options);

enum class ReportFormat { Csv, Markdown };

// Reads and validates every line (hash, schema_version, ascending p).
std::vector<nlohmann::json> read_certificates(const std::string & in_path);

std::string report(const std::string & in_path, ReportFormat format);

}
