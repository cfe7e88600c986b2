#include "cli.hpp"

#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "cyclotower/certificates.hpp"
#include "cyclotower/iwasawa.hpp"
#include "cyclotower/modarith.hpp"
#include "cyclotower/scan.hpp"

namespace cyclotower::cli {

namespace {

struct Flags
{
	unsigned precision = 0;	// 0: module default
	unsigned level = 0;
	unsigned truncation = 0;
	unsigned max_escalations = PrecisionPolicy{}.max_escalations;
	unsigned max_witnesses = kDefaultMaxWitnesses;
	unsigned n_max = 3;
};

void add_precision_flags(CLI::App * cmd, Flags & f)
{
	cmd->add_option("--prec", f.precision, "p-adic precision N of the series coefficients")->check(CLI::PositiveNumber);
	cmd->add_option("--level", f.level, "tower level n of the Stickelberger sum")->check(CLI::PositiveNumber);
	cmd->add_option("--trunc", f.truncation, "number M of T-coefficients kept")->check(CLI::PositiveNumber);
}

void add_certify_flags(CLI::App * cmd, Flags & f)
{
	add_precision_flags(cmd, f);
	cmd->add_option("--max-escalations", f.max_escalations, "precision escalations before giving up");
	cmd->add_option("--max-witnesses", f.max_witnesses, "witness primes per Vandiver test")->check(CLI::PositiveNumber);
	cmd->add_option("--nmax", f.n_max, "levels in the (g, s) table")->check(CLI::PositiveNumber);
}

void require_prime(uint64_t p)
{
	if (p < 5 || !modarith::is_prime(p)) throw CLI::ValidationError("p", std::to_string(p) + " is not a prime >= 5");
}

CertifyConfig certify_config(uint64_t p, const Flags & f)
{
	CertifyConfig c;
	if (f.level) c.precision.level = f.level;
	if (f.precision) c.precision.precision = f.precision;
	if (f.truncation)
	{
		const uint64_t pn = modarith::checked_pow(p, c.precision.level);
		if (pn != 0 && f.truncation > pn)
			throw CLI::ValidationError("--trunc", "must not exceed p^level = " + std::to_string(pn));
		c.precision.truncation = f.truncation;
	}
	c.precision.max_escalations = f.max_escalations;
	c.max_witnesses = f.max_witnesses;
	c.n_max = f.n_max;
	return c;
}

int exit_code(const PrimeCertificate & cert)
{
	switch (classify(cert))
	{
	case VerdictClass::Applies: return kApplies;
	case VerdictClass::Fails: return kFails;
	case VerdictClass::Inconclusive: return kInconclusive;
	}
	return kError;
}

std::string join_witnesses(const WitnessReport & r)
{
	std::string s;
	for (const Witness & w : r.witnesses) s += (s.empty() ? "" : ",") + std::to_string(w.q) + (w.is_pth_power ? "*" : "");
	return s;
}

void print_table(std::ostream & out, const PrimeCertificate & cert)
{
	auto row = [&out](const std::string & key, const std::string & value) { out << std::left << std::setw(18) << key << value << "\n"; };
	row("p", std::to_string(cert.p));
	row("regular", cert.is_regular ? "yes" : "no");
	row("i(p)", std::to_string(cert.index_of_irregularity));
	row("lambda_p", std::to_string(cert.lambda_p) + (cert.is_regular ? "" : "  (minus part, under Vandiver)"));
	row("alpha", std::to_string(cert.alpha) + (cert.alpha_conditional ? "  (conditional)" : ""));
	row("verdict", std::string(cert.theorem1.applies ? "applies" : "does not apply") + "  (" + cert.theorem1.reason + ")");

	if (!cert.pairs.empty())
	{
		out << "\n" << std::right
			<< std::setw(8) << "k" << std::setw(8) << "j" << std::setw(4) << "mu" << std::setw(8) << "lambda"
			<< std::setw(4) << "a" << std::setw(4) << "m" << std::setw(9) << "c mod p" << std::setw(7) << "level"
			<< std::setw(4) << "N" << "  " << std::left << std::setw(13) << "vandiver" << "witnesses\n";
		for (const IrregularPairData & d : cert.pairs)
		{
			const BranchInvariants & v = d.invariants;
			out << std::right << std::setw(8) << d.k << std::setw(8) << d.j << std::setw(4) << v.mu << std::setw(8) << v.lambda
				<< std::setw(4) << v.a << std::setw(4) << v.m << std::setw(9) << (v.c_mod_p ? std::to_string(*v.c_mod_p) : "-")
				<< std::setw(7) << v.level_used << std::setw(4) << v.precision_used << "  " << std::left << std::setw(13)
				<< to_string(d.vandiver.status) << join_witnesses(d.vandiver) << "\n";
		}
	}

	out << "\n" << std::right << std::setw(4) << "n" << std::setw(22) << "r_2" << std::setw(22) << "g" << std::setw(6) << "s" << "\n";
	for (const Lemma2Row & r : cert.lemma2_table)
		out << std::setw(4) << r.n << std::setw(22) << r.r2 << std::setw(22) << r.g << std::setw(6) << r.s << "\n";
	if (cert.theorem2_note) out << "\n" << *cert.theorem2_note << "\n";
	out << std::left;
}

}

int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
	CLI::App app{"Verifier for the pseudo-null conjecture over Q(zeta_{p^n})", "cyclotower"};
	app.require_subcommand(1);

	Flags flags;

	uint64_t check_p = 0;
	bool check_json = false;
	CLI::App * check = app.add_subcommand("check", "certify one prime; exit 0 applies, 3 fails, 4 inconclusive");
	check->add_option("p", check_p, "odd prime >= 5")->required();
	check->add_flag("--json", check_json, "print the certificate as canonical JSON");
	add_certify_flags(check, flags);

	ScanOptions scan_opts;
	CLI::App * scan_cmd = app.add_subcommand("scan", "certify every prime in [from, to) into a JSONL file");
	scan_cmd->add_option("--from", scan_opts.from, "first candidate (>= 5)")->required();
	scan_cmd->add_option("--to", scan_opts.to, "end of the range, exclusive")->required();
	scan_cmd->add_option("--jobs", scan_opts.jobs, "worker threads")->check(CLI::PositiveNumber);
	scan_cmd->add_option("--out", scan_opts.out_path, "certificate file (JSONL)")->required();
	scan_cmd->add_option("--checkpoint", scan_opts.checkpoint_path, "checkpoint sidecar (default <out>.ckpt)");
	scan_cmd->add_flag("--overwrite", scan_opts.overwrite, "discard existing output instead of resuming");
	add_certify_flags(scan_cmd, flags);

	uint64_t series_p = 0;
	unsigned series_k = 0;
	CLI::App * series = app.add_subcommand("series", "dump the Iwasawa series coefficients: index value valuation");
	series->add_option("p", series_p, "odd prime >= 5")->required();
	series->add_option("k", series_k, "even branch index in [2, p-3]")->required();
	add_precision_flags(series, flags);

	uint64_t gs_p = 0;
	unsigned gs_n = 0, gs_alpha = 0;
	bool verbatim = false;
	CLI::App * gs = app.add_subcommand("gs", "generator and relation ranks (g, s) at level n");
	gs->add_option("p", gs_p, "odd prime")->required();
	gs->add_option("n", gs_n, "level n >= 1")->required()->check(CLI::PositiveNumber);
	gs->add_option("--alpha", gs_alpha, "p-rank of the class group")->required();
	gs->add_flag("--paper-verbatim", verbatim, "use r_2 = (p^n + p^(n-1))/2 as printed");

	std::string report_in, report_format = "csv";
	CLI::App * report_cmd = app.add_subcommand("report", "render a certificate file as CSV or Markdown");
	report_cmd->add_option("in", report_in, "certificate file")->required();
	report_cmd->add_option("--format", report_format, "csv or markdown")->check(CLI::IsMember({"csv", "markdown"}));

	std::vector<std::string> argv_store{"cyclotower"};
	argv_store.insert(argv_store.end(), args.begin(), args.end());
	std::vector<const char *> argv;
	for (const std::string & a : argv_store) argv.push_back(a.c_str());

	try
	{
		app.parse(int(argv.size()), argv.data());

		if (*check)
		{
			require_prime(check_p);
			const PrimeCertificate cert = certify(check_p, certify_config(check_p, flags));
			if (check_json) out << to_json(cert).dump() << "\n";
			else print_table(out, cert);
			return exit_code(cert);
		}
		if (*scan_cmd)
		{
			if (scan_opts.from < 5 || scan_opts.to <= scan_opts.from) throw CLI::ValidationError("--from/--to", "need 5 <= from < to");
			scan_opts.config = certify_config(scan_opts.from, flags);
			out << to_json(scan(scan_opts)).dump() << "\n";
			return kApplies;
		}
		if (*series)
		{
			require_prime(series_p);
			const unsigned level = flags.level ? flags.level : PrecisionPolicy{}.level;
			const unsigned N = flags.precision ? flags.precision : PrecisionPolicy{}.precision;
			const unsigned M = flags.truncation ? flags.truncation : default_truncation(series_p, level);
			const TruncatedSeries s = build_series(series_p, series_k, level, N, M);
			for (size_t j = 0; j < s.coefficients.size(); ++j)
			{
				const int v = s.coefficients[j].valuation();
				out << j << " " << s.coefficients[j].value().get_str() << " " << (v >= int(N) ? "inf" : std::to_string(v)) << "\n";
			}
			return kApplies;
		}
		if (*gs)
		{
			const Lemma2Row r = verbatim ? lemma2_gs_printed(gs_p, gs_n, gs_alpha) : lemma2_gs(gs_p, gs_n, gs_alpha);
			out << "g=" << r.g << " s=" << r.s << " r2=" << r.r2 << "\n";
			if (!verbatim)
				out << "note: r_2 = (p^n - p^(n-1))/2 = phi(p^n)/2 complex places; --paper-verbatim uses (p^n + p^(n-1))/2\n";
			return kApplies;
		}
		if (*report_cmd)
		{
			out << report(report_in, report_format == "markdown" ? ReportFormat::Markdown : ReportFormat::Csv);
			return kApplies;
		}
	}
	catch (const CLI::CallForHelp & e)
	{
		return app.exit(e, out, err);
	}
	catch (const CLI::CallForAllHelp & e)
	{
		return app.exit(e, out, err);
	}
	catch (const CLI::ParseError & e)
	{
		err << "error: " << e.what() << "\n";
		return kError;
	}
	catch (const std::exception & e)
	{
		err << "error: " << e.what() << "\n";
		return kError;
	}
	return kError;
}

}
