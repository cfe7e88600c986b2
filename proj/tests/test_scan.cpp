#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cyclotower/bernoulli.hpp"
#include "cyclotower/scan.hpp"
#include "cyclotower/sieve.hpp"

using namespace cyclotower;
namespace fs = std::filesystem;

namespace {

struct TempDir
{
	fs::path path;
	TempDir()
	{
		std::random_device rd;
		path = fs::temp_directory_path() / ("cyclotower_scan_" + std::to_string(rd()) + std::to_string(rd()));
		fs::create_directories(path);
	}
	~TempDir() { fs::remove_all(path); }
	std::string file(const std::string & name) const { return (path / name).string(); }
};

std::string slurp(const std::string & path)
{
	std::ifstream in(path, std::ios::binary);
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

// The certificate stream with timing fields removed.
std::string stripped(const std::string & path)
{
	std::istringstream in(slurp(path));
	std::string line, out;
	while (std::getline(in, line))
	{
		nlohmann::json j = nlohmann::json::parse(line);
		j.erase("elapsed_ms");
		out += j.dump() + "\n";
	}
	return out;
}

ScanOptions options(uint64_t from, uint64_t to, unsigned jobs, const std::string & out)
{
	ScanOptions o;
	o.from = from;
	o.to = to;
	o.jobs = jobs;
	o.out_path = out;
	return o;
}

size_t count_lines(const std::string & s)
{
	return size_t(std::count(s.begin(), s.end(), '\n'));
}

}

TEST_CASE("no irregular primes below 37")
{
	TempDir tmp;
	const ScanSummary s = scan(options(5, 37, 4, tmp.file("a.jsonl")));
	CHECK(s.irregular_count == 0);
	CHECK(s.primes_processed == 9);
	CHECK(s.complete);
	CHECK(s.lambda1_fraction == 0.0);
}

TEST_CASE("irregular primes below 200 against the exact oracle")
{
	// Oracle: exact Bernoulli numbers reduced mod p.
	std::map<unsigned, uint64_t> hist;
	uint64_t irregular = 0;
	for (const uint64_t p : primes_in_range(5, 200))
	{
		unsigned i = 0;
		for (unsigned k = 2; k + 3 <= p; k += 2)
			if (residue_of(bernoulli_exact(k), p, 1).is_zero()) ++i;
		if (i) ++hist[i], ++irregular;
	}
	CHECK(irregular == 8);

	TempDir tmp;
	const ScanSummary s = scan(options(5, 200, 2, tmp.file("b.jsonl")));
	CHECK(s.irregular_count == irregular);
	CHECK(s.index_histogram == hist);
	CHECK(s.lambda1_count == 7);
	CHECK(s.c_minus_one_hits.empty());
	CHECK(s.inconclusive.empty());

	const nlohmann::json j = to_json(s);
	CHECK(j["range"] == nlohmann::json::array({5, 200}));
	CHECK(j["index_histogram"]["2"] == 1);
}

TEST_CASE("certificate stream does not depend on jobs")
{
	TempDir tmp;
	scan(options(5, 600, 1, tmp.file("j1.jsonl")));
	scan(options(5, 600, 5, tmp.file("j5.jsonl")));
	CHECK(stripped(tmp.file("j1.jsonl")) == stripped(tmp.file("j5.jsonl")));
	CHECK(count_lines(slurp(tmp.file("j1.jsonl"))) == primes_in_range(5, 600).size());
	const nlohmann::json ck = nlohmann::json::parse(slurp(tmp.file("j1.jsonl.ckpt")));
	CHECK(ck["frontier"] == 599);
	CHECK(ck["schema_version"] == kSchemaVersion);
}

TEST_CASE("interrupted scan resumes to the same stream")
{
	TempDir tmp;
	scan(options(5, 400, 1, tmp.file("full.jsonl")));

	ScanOptions o = options(5, 400, 3, tmp.file("part.jsonl"));
	o.max_new_primes = 20;
	const ScanSummary first = scan(o);
	CHECK_FALSE(first.complete);
	CHECK(first.primes_processed == 20);
	CHECK(nlohmann::json::parse(slurp(tmp.file("part.jsonl.ckpt")))["frontier"] == 79);

	// A torn line after the frontier, as left by a crash mid-write.
	{
		std::ofstream torn(tmp.file("part.jsonl"), std::ios::app);
		torn << "{\"p\":83,\"is_reg";
	}
	o.max_new_primes = 0;
	const ScanSummary second = scan(o);
	CHECK(second.complete);
	CHECK(second.primes_processed == primes_in_range(5, 400).size());
	CHECK(stripped(tmp.file("part.jsonl")) == stripped(tmp.file("full.jsonl")));

	// Resuming a complete scan is a no-op.
	const ScanSummary third = scan(o);
	CHECK(third.complete);
	CHECK(third.irregular_count == second.irregular_count);
	CHECK(stripped(tmp.file("part.jsonl")) == stripped(tmp.file("full.jsonl")));
}

TEST_CASE("corruption before the frontier is refused")
{
	TempDir tmp;
	const std::string out = tmp.file("c.jsonl");
	scan(options(5, 100, 1, out));
	std::string text = slurp(out);
	const size_t pos = text.find("\"lambda_p\":0");
	REQUIRE(pos != std::string::npos);
	text.replace(pos, 12, "\"lambda_p\":7");
	std::ofstream(out, std::ios::binary) << text;
	CHECK_THROWS_AS(scan(options(5, 100, 1, out)), IntegrityError);
	CHECK_THROWS_AS(read_certificates(out), IntegrityError);

	// A dropped line is caught by the prime sequence check.
	scan([&] { auto o = options(5, 100, 1, out); o.overwrite = true; return o; }());
	text = slurp(out);
	const size_t nl = text.find('\n');
	std::ofstream(out, std::ios::binary) << text.substr(nl + 1);
	CHECK_THROWS_AS(scan(options(5, 100, 1, out)), IntegrityError);

	// A checkpoint for a different range.
	scan([&] { auto o = options(5, 100, 1, out); o.overwrite = true; return o; }());
	CHECK_THROWS_AS(scan(options(7, 100, 1, out)), IntegrityError);
}

TEST_CASE("existing output without a checkpoint needs --overwrite")
{
	TempDir tmp;
	const std::string out = tmp.file("d.jsonl");
	std::ofstream(out) << "junk\n";
	CHECK_THROWS_AS(scan(options(5, 50, 1, out)), std::runtime_error);
	ScanOptions o = options(5, 50, 1, out);
	o.overwrite = true;
	CHECK(scan(o).primes_processed == 13);

	CHECK_THROWS_AS(scan(options(5, 50, 1, tmp.file("missing/dir/x.jsonl"))), std::runtime_error);
	CHECK_THROWS_AS(scan(options(4, 50, 1, out)), std::invalid_argument);
	CHECK_THROWS_AS(scan(options(50, 50, 1, out)), std::invalid_argument);
	CHECK_THROWS_AS(scan(options(5, 50, 0, out)), std::invalid_argument);
}

TEST_CASE("reports")
{
	TempDir tmp;
	const std::string out = tmp.file("r.jsonl");
	scan(options(5, 200, 2, out));

	const std::string csv = report(out, ReportFormat::Csv);
	std::istringstream rows(csv);
	std::string line;
	std::getline(rows, line);
	CHECK(line == "p,regular,i,lambda_p,a,m,c_mod_p,vandiver,applies,failed\r");
	size_t n = 0;
	while (std::getline(rows, line))
	{
		++n;
		CHECK(std::count(line.begin(), line.end(), ',') == 9);
		if (line.rfind("157,", 0) == 0) CHECK(line.find("false,LAMBDA") != std::string::npos);
	}
	CHECK(n == primes_in_range(5, 200).size());

	const std::string md = report(out, ReportFormat::Markdown);
	size_t table_rows = 0;
	std::istringstream mdin(md);
	while (std::getline(mdin, line))
		if (line.rfind("| ", 0) == 0 && line.find(" p |") == std::string::npos) ++table_rows;
	CHECK(table_rows == 8);
	CHECK(md.find("- irregular: 8") != std::string::npos);

	const std::string empty = tmp.file("empty.jsonl");
	std::ofstream(empty).close();
	CHECK(report(empty, ReportFormat::Csv) == "p,regular,i,lambda_p,a,m,c_mod_p,vandiver,applies,failed\r\n");
	CHECK(count_lines(report(empty, ReportFormat::Markdown)) == 2);

	// Mixed schema versions.
	std::istringstream in(slurp(out));
	std::string l1, l2;
	std::getline(in, l1);
	std::getline(in, l2);
	nlohmann::json j2 = nlohmann::json::parse(l2);
	j2["schema_version"] = 2;
	seal(j2);
	const std::string mixed = tmp.file("mixed.jsonl");
	std::ofstream(mixed) << l1 << "\n" << j2.dump() << "\n";
	try
	{
		report(mixed, ReportFormat::Csv);
		FAIL("mixed schema accepted");
	}
	catch (const std::runtime_error & e)
	{
		const std::string what = e.what();
		CHECK(what.find("1 and 2") != std::string::npos);
	}
}
