#include "cyclotower/scan.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <unistd.h>

#include "cyclotower/sieve.hpp"

namespace cyclotower {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Pulls primes of [from, to) one sieve chunk at a time.
class PrimeCursor
{
public:
	PrimeCursor(uint64_t from, uint64_t to) : _lo(from), _to(to) {}

	std::optional<uint64_t> next()
	{
		while (_pos == _buf.size())
		{
			if (_lo >= _to) return std::nullopt;
			const uint64_t hi = std::min(_to, _lo + kChunk);
			_buf = primes_in_range(_lo, hi);
			_pos = 0;
			_lo = hi;
		}
		return _buf[_pos++];
	}

private:
	static constexpr uint64_t kChunk = uint64_t(1) << 16;
	uint64_t _lo, _to;
	std::vector<uint64_t> _buf;
	size_t _pos = 0;
};

class Fd
{
public:
	explicit Fd(int fd) : _fd(fd) {}
	~Fd() { if (_fd >= 0) ::close(_fd); }
	Fd(const Fd &) = delete;
	Fd & operator=(const Fd &) = delete;
	int get() const { return _fd; }

private:
	int _fd;
};

void write_all(int fd, const std::string & data, const std::string & path)
{
	size_t done = 0;
	while (done < data.size())
	{
		const ssize_t w = ::write(fd, data.data() + done, data.size() - done);
		if (w < 0) throw std::runtime_error("cannot write " + path);
		done += size_t(w);
	}
}

void write_checkpoint(const std::string & path, uint64_t frontier)
{
	const std::string tmp = path + ".tmp";
	const std::string body = json{{"frontier", frontier}, {"schema_version", kSchemaVersion}}.dump() + "\n";
	{
		Fd fd(::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644));
		if (fd.get() < 0) throw std::runtime_error("cannot write checkpoint " + tmp);
		write_all(fd.get(), body, tmp);
		::fsync(fd.get());
	}
	if (::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("cannot rename checkpoint to " + path);
}

uint64_t read_checkpoint(const std::string & path)
{
	std::ifstream in(path);
	std::string line;
	std::getline(in, line);
	json j;
	try
	{
		j = json::parse(line);
	}
	catch (const json::exception &)
	{
		throw IntegrityError("checkpoint " + path + " is unreadable; re-run with --overwrite");
	}
	if (!j.is_object() || !j.contains("frontier") || !j["frontier"].is_number_unsigned())
		throw IntegrityError("checkpoint " + path + " has no frontier; re-run with --overwrite");
	const int version = j.value("schema_version", -1);
	if (version != kSchemaVersion)
		throw IntegrityError("checkpoint " + path + " has schema_version " + std::to_string(version) + ", this build writes "
			+ std::to_string(kSchemaVersion) + "; re-run with --overwrite");
	return j["frontier"].get<uint64_t>();
}

std::string corrupted(const std::string & path, size_t line_no, const std::string & why)
{
	return path + ":" + std::to_string(line_no) + ": " + why + "; the scan output is corrupted, re-run with --overwrite";
}

// Validates the lines up to the checkpoint frontier, folds them into the
// summary and truncates anything after them. Returns the frontier.
uint64_t resume(const ScanOptions & o, const std::string & ckpt, ScanSummary & summary)
{
	const uint64_t frontier = read_checkpoint(ckpt);
	std::ifstream in(o.out_path, std::ios::binary);
	if (!in) throw std::runtime_error("cannot read " + o.out_path);

	PrimeCursor expected(o.from, o.to);
	uint64_t keep = 0, last = 0;
	size_t line_no = 0;
	std::string line;
	while (last < frontier && std::getline(in, line))
	{
		++line_no;
		if (in.eof()) throw IntegrityError(corrupted(o.out_path, line_no, "incomplete line before the checkpoint frontier"));
		json j;
		try
		{
			j = json::parse(line);
		}
		catch (const json::exception &)
		{
			throw IntegrityError(corrupted(o.out_path, line_no, "unparsable certificate"));
		}
		if (!verify_integrity(j)) throw IntegrityError(corrupted(o.out_path, line_no, "sha256 mismatch"));
		const std::optional<uint64_t> want = expected.next();
		const uint64_t p = j.value("p", uint64_t(0));
		if (!want || p != *want)
			throw IntegrityError(corrupted(o.out_path, line_no, "found p = " + std::to_string(p) + " where the range [" + std::to_string(o.from)
				+ ", " + std::to_string(o.to) + ") expects " + (want ? std::to_string(*want) : std::string("no more primes"))));
		accumulate(summary, j);
		last = p;
		keep += line.size() + 1;
	}
	if (last != frontier)
		throw IntegrityError(o.out_path + ": checkpoint frontier " + std::to_string(frontier) + " is not a complete line; re-run with --overwrite");
	in.close();

	std::error_code ec;
	fs::resize_file(o.out_path, keep, ec);
	if (ec) throw std::runtime_error("cannot truncate " + o.out_path + ": " + ec.message());
	return frontier;
}

}

std::string checkpoint_path_for(const ScanOptions & options)
{
	return options.checkpoint_path.empty() ? options.out_path + ".ckpt" : options.checkpoint_path;
}

void accumulate(ScanSummary & s, const json & cert)
{
	const uint64_t p = cert.at("p").get<uint64_t>();
	++s.primes_processed;
	if (!cert.at("is_regular").get<bool>())
	{
		++s.irregular_count;
		++s.index_histogram[cert.at("index_of_irregularity").get<unsigned>()];
		if (cert.at("lambda_p").get<unsigned>() == 1) ++s.lambda1_count;
		for (const json & pair : cert.at("pairs"))
		{
			const json & inv = pair.at("invariants");
			if (inv.at("a").get<int>() == 1 && inv.at("c_mod_p").is_number() && inv.at("c_mod_p").get<uint64_t>() == p - 1)
				s.c_minus_one_hits.emplace_back(p, pair.at("k").get<unsigned>());
		}
	}
	for (const json & c : cert.at("theorem1").at("failed_conditions"))
		if (c.get<std::string>() == to_string(Condition::Inconclusive)) s.inconclusive.push_back(p);
	s.lambda1_fraction = s.irregular_count ? double(s.lambda1_count) / double(s.irregular_count) : 0.0;
}

json to_json(const ScanSummary & s)
{
	json hist = json::object();
	for (const auto & [i, n] : s.index_histogram) hist[std::to_string(i)] = n;
	json hits = json::array();
	for (const auto & [p, k] : s.c_minus_one_hits) hits.push_back({{"p", p}, {"k", k}});
	return {
		{"range", {s.from, s.to}},
		{"primes_processed", s.primes_processed},
		{"irregular_count", s.irregular_count},
		{"index_histogram", hist},
		{"lambda1_count", s.lambda1_count},
		{"lambda1_fraction", s.lambda1_fraction},
		{"c_minus_one_hits", hits},
		{"inconclusive", s.inconclusive},
		{"elapsed_seconds", s.elapsed_seconds},
		{"complete", s.complete},
	};
}

ScanSummary scan(const ScanOptions & o)
{
	if (o.from < 5 || o.to <= o.from) throw std::invalid_argument("scan: need 5 <= from < to");
	if (o.jobs == 0) throw std::invalid_argument("scan: jobs must be >= 1");
	if (o.out_path.empty()) throw std::invalid_argument("scan: no output path");
	const auto t0 = std::chrono::steady_clock::now();

	ScanSummary summary;
	summary.from = o.from;
	summary.to = o.to;

	const std::string ckpt = checkpoint_path_for(o);
	const bool have_out = fs::exists(o.out_path), have_ckpt = fs::exists(ckpt);
	uint64_t frontier = 0;
	if (o.overwrite || (!have_out && !have_ckpt))
	{
		Fd fd(::open(o.out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644));
		if (fd.get() < 0) throw std::runtime_error("cannot write " + o.out_path);
		write_checkpoint(ckpt, 0);
	}
	else if (have_out && !have_ckpt)
		throw std::runtime_error(o.out_path + " exists without checkpoint " + ckpt + "; pass --overwrite to start over");
	else if (!have_out)
		throw IntegrityError("checkpoint " + ckpt + " exists without " + o.out_path + "; re-run with --overwrite");
	else
		frontier = resume(o, ckpt, summary);

	Fd out(::open(o.out_path.c_str(), O_WRONLY | O_APPEND));
	if (out.get() < 0) throw std::runtime_error("cannot append to " + o.out_path);

	PrimeCursor cursor(std::max(o.from, frontier + 1), o.to);
	const uint64_t window = 4 * uint64_t(o.jobs) + 16;

	std::mutex mutex;
	std::condition_variable ready_cv, slot_cv;
	std::map<uint64_t, std::pair<uint64_t, std::string>> ready;	// seq -> (p, line)
	uint64_t next_seq = 0, write_seq = 0;
	unsigned running = o.jobs;
	bool exhausted = false, stop = false;
	std::exception_ptr error;

	auto worker = [&] {
		for (;;)
		{
			uint64_t seq, p;
			{
				std::unique_lock lock(mutex);
				slot_cv.wait(lock, [&] { return stop || next_seq < write_seq + window; });
				if (stop || exhausted) break;
				if (o.max_new_primes && next_seq >= o.max_new_primes) break;
				const std::optional<uint64_t> q = cursor.next();
				if (!q)
				{
					exhausted = true;
					break;
				}
				p = *q;
				seq = next_seq++;
			}
			try
			{
				const auto t = std::chrono::steady_clock::now();
				json j = to_json(certify(p, o.config));
				j["elapsed_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t).count();
				std::string line = j.dump() + "\n";
				std::lock_guard lock(mutex);
				ready.emplace(seq, std::make_pair(p, std::move(line)));
			}
			catch (const std::exception & e)
			{
				std::lock_guard lock(mutex);
				if (!error)
					error = std::make_exception_ptr(std::runtime_error("scan: p = " + std::to_string(p) + ": " + e.what()));
				stop = true;
				slot_cv.notify_all();
			}
			ready_cv.notify_one();
		}
		std::lock_guard lock(mutex);
		--running;
		ready_cv.notify_one();
	};

	std::vector<std::thread> pool;
	for (unsigned t = 0; t < o.jobs; ++t) pool.emplace_back(worker);

	// Single writer: lines leave in sequence order, each followed by a checkpoint.
	try
	{
		for (;;)
		{
			std::pair<uint64_t, std::string> item;
			{
				std::unique_lock lock(mutex);
				ready_cv.wait(lock, [&] { return stop || ready.count(write_seq) || running == 0; });
				auto it = ready.find(write_seq);
				if (stop || it == ready.end()) break;
				item = std::move(it->second);
				ready.erase(it);
			}
			write_all(out.get(), item.second, o.out_path);
			::fdatasync(out.get());
			write_checkpoint(ckpt, item.first);
			accumulate(summary, json::parse(item.second));
			std::lock_guard lock(mutex);
			++write_seq;
			slot_cv.notify_all();
		}
	}
	catch (...)
	{
		std::lock_guard lock(mutex);
		if (!error) error = std::current_exception();
		stop = true;
		slot_cv.notify_all();
	}
	for (auto & t : pool) t.join();
	if (error) std::rethrow_exception(error);

	summary.complete = exhausted && write_seq == next_seq;
	summary.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
	return summary;
}

std::vector<json> read_certificates(const std::string & in_path)
{
	std::ifstream in(in_path, std::ios::binary);
	if (!in) throw std::runtime_error("cannot read " + in_path);
	std::vector<json> certs;
	std::string line;
	size_t line_no = 0;
	while (std::getline(in, line))
	{
		++line_no;
		if (line.empty()) continue;
		try
		{
			certs.push_back(json::parse(line));
		}
		catch (const json::exception &)
		{
			throw IntegrityError(in_path + ":" + std::to_string(line_no) + ": unparsable certificate");
		}
	}

	std::set<int> versions;
	for (const json & c : certs) versions.insert(c.value("schema_version", -1));
	if (versions.size() > 1)
	{
		std::string list;
		for (const int v : versions) list += (list.empty() ? "" : " and ") + std::to_string(v);
		throw std::runtime_error(in_path + ": mixed schema_version values " + list + "; refusing to merge");
	}
	if (versions.size() == 1 && *versions.begin() != kSchemaVersion)
		throw std::runtime_error(in_path + ": schema_version " + std::to_string(*versions.begin()) + " found, this build reads "
			+ std::to_string(kSchemaVersion));

	uint64_t last = 0;
	for (size_t i = 0; i < certs.size(); ++i)
	{
		if (!verify_integrity(certs[i])) throw IntegrityError(in_path + ": certificate " + std::to_string(i + 1) + " fails its sha256");
		const uint64_t p = certs[i].at("p").get<uint64_t>();
		if (p <= last) throw IntegrityError(in_path + ": certificates are not in ascending p at p = " + std::to_string(p));
		last = p;
	}
	return certs;
}

namespace {

std::string csv_field(const std::string & s)
{
	if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
	std::string out = "\"";
	for (const char c : s)
	{
		if (c == '"') out += '"';
		out += c;
	}
	return out + "\"";
}

// Per-pair values joined with ';', in the order of the pairs.
std::string pair_column(const json & cert, const std::string & key)
{
	std::string out;
	for (const json & pair : cert.at("pairs"))
	{
		const json & v = key == "vandiver" ? pair.at("vandiver").at("status") : pair.at("invariants").at(key);
		if (!out.empty()) out += ';';
		out += v.is_null() ? "" : v.is_string() ? v.get<std::string>() : v.dump();
	}
	return out;
}

std::string failed_column(const json & cert)
{
	std::string out;
	for (const json & c : cert.at("theorem1").at("failed_conditions")) out += (out.empty() ? "" : ";") + c.get<std::string>();
	return out;
}

}

std::string report(const std::string & in_path, ReportFormat format)
{
	const std::vector<json> certs = read_certificates(in_path);
	std::ostringstream out;

	if (format == ReportFormat::Csv)
	{
		out << "p,regular,i,lambda_p,a,m,c_mod_p,vandiver,applies,failed\r\n";
		for (const json & c : certs)
		{
			const std::vector<std::string> row = {
				c.at("p").dump(), c.at("is_regular").dump(), c.at("index_of_irregularity").dump(), c.at("lambda_p").dump(),
				pair_column(c, "a"), pair_column(c, "m"), pair_column(c, "c_mod_p"), pair_column(c, "vandiver"),
				c.at("theorem1").at("applies").dump(), failed_column(c)};
			for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
			out << "\r\n";
		}
		return out.str();
	}

	out << "| p | i(p) | lambda_p | a | m | c mod p | vandiver | applies |\n";
	out << "|---:|---:|---:|---|---|---|---|---|\n";
	if (certs.empty()) return out.str();

	ScanSummary s;
	for (const json & c : certs)
	{
		accumulate(s, c);
		if (c.at("is_regular").get<bool>()) continue;
		out << "| " << c.at("p") << " | " << c.at("index_of_irregularity") << " | " << c.at("lambda_p") << " | " << pair_column(c, "a")
			<< " | " << pair_column(c, "m") << " | " << pair_column(c, "c_mod_p") << " | " << pair_column(c, "vandiver") << " | "
			<< (c.at("theorem1").at("applies").get<bool>() ? "yes" : "no") << " |\n";
	}

	out << "\n## Summary\n\n";
	out << "- primes: " << s.primes_processed << " (" << certs.front().at("p") << " to " << certs.back().at("p") << ")\n";
	out << "- irregular: " << s.irregular_count << "\n";
	out << "- index histogram:";
	for (const auto & [i, n] : s.index_histogram) out << " i=" << i << ": " << n << ";";
	out << "\n";
	char frac[32];
	std::snprintf(frac, sizeof frac, "%.4f", s.lambda1_fraction);
	out << "- lambda_p = 1: " << s.lambda1_count << " of " << s.irregular_count << " (" << frac << ")\n";
	out << "- a = 1 and c = -1 mod p:";
	if (s.c_minus_one_hits.empty()) out << " none";
	for (const auto & [p, k] : s.c_minus_one_hits) out << " (" << p << ", " << k << ")";
	out << "\n- inconclusive:";
	if (s.inconclusive.empty()) out << " none";
	for (const uint64_t p : s.inconclusive) out << " " << p;
	out << "\n";
	return out.str();
}

}
