#include "cyclotower/iwasawa.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

#include "cyclotower/bernoulli.hpp"
#include "cyclotower/modarith.hpp"

namespace cyclotower {

namespace {

void check_branch(uint64_t p, unsigned k)
{
	require_odd_prime(p, "build_series");
	if ((k & 1) != 0) throw std::invalid_argument("build_series: branch k must be even (got " + std::to_string(k) + ")");
	if (k < 2 || k + 3 > p) throw std::invalid_argument("build_series: branch k must lie in [2, p-3]");
}

uint64_t character_exponent(const Orientation & o, uint64_t p, unsigned k)
{
	const int64_t e = (o.twist == CharacterTwist::KMinusOne) ? int64_t(k) - 1 : -int64_t(k);
	return modarith::reduce_signed(e, p - 1);
}

// (1+T)-basis coefficients g_m, m in [0, p^n), to T-basis c_0..c_{M-1} by Horner in (1+T).
template <typename Value, typename Add>
std::vector<Value> horner_shift(const std::vector<Value> & g, unsigned M, Add add)
{
	std::vector<Value> c(M, Value(0));
	for (size_t m = g.size(); m-- > 0;)
	{
		for (unsigned j = M - 1; j >= 1; --j) c[j] = add(c[j], c[j - 1]);
		c[0] = add(c[0], g[m]);
	}
	return c;
}

std::vector<mpz_class> to_t_basis(const std::vector<mpz_class> & group_ring, uint64_t p, unsigned N, unsigned M, int exponent_sign)
{
	const size_t pn = group_ring.size();
	const mpz_class modulus = ipow(p, N);
	const uint64_t word_modulus = modarith::checked_pow(p, N);

	auto coefficient_of_power = [&](size_t m) -> const mpz_class & {
		return (exponent_sign > 0) ? group_ring[m] : group_ring[(pn - m) % pn];
	};

	std::vector<mpz_class> out(M);
	if (word_modulus != 0)
	{
		std::vector<uint64_t> g(pn);
		for (size_t m = 0; m < pn; ++m) g[m] = coefficient_of_power(m).get_ui();
		const auto c = horner_shift(g, M, [word_modulus](uint64_t x, uint64_t y) { return modarith::addmod(x, y, word_modulus); });
		for (unsigned j = 0; j < M; ++j) out[j] = mpz_class(static_cast<unsigned long>(c[j]));
	}
	else
	{
		std::vector<mpz_class> g(pn);
		for (size_t m = 0; m < pn; ++m) g[m] = coefficient_of_power(m);
		out = horner_shift(g, M, [&modulus](const mpz_class & x, const mpz_class & y) {
			mpz_class s = x + y;
			if (s >= modulus) s -= modulus;
			return s;
		});
	}
	return out;
}

// Group-ring coefficients d_i (gamma = 1+p) of the level-n Stickelberger element for each branch.
//
// Writing a = b + p t with b in [1, p), the class i(a) runs over [0, p^n) exactly once
// as t does, so S_i = sum_b W_b (b + p t_i(b)) = U + p sum_b W_b t_i(b).
// W_b is split into 32-bit limbs and the inner sums are exact 64-bit accumulations.
std::vector<std::vector<mpz_class>> stickelberger_group_ring(uint64_t p, const std::vector<unsigned> & ks,
	unsigned n, unsigned N, const Orientation & orientation)
{
	const uint64_t P = modarith::checked_pow(p, n + 1);
	if (P == 0 || P >= kMaxEnumeration)
		throw std::length_error("Stickelberger sum at level " + std::to_string(n) + " for p = " + std::to_string(p)
			+ " exceeds the enumeration budget p^(n+1) < 2^32");
	const uint64_t pn = P / p;
	const unsigned work = N + n + 1;
	const mpz_class Q = ipow(p, work);
	const uint64_t Qword = modarith::checked_pow(p, work);
	const size_t limbs = (mpz_sizeinbase(Q.get_mpz_t(), 2) + 31) / 32;
	const size_t K = ks.size();

	std::vector<uint64_t> exponents(K);
	for (size_t r = 0; r < K; ++r) exponents[r] = character_exponent(orientation, p, ks[r]);

	std::vector<mpz_class> U(K, 0);
	std::vector<uint64_t> acc(K * limbs * pn, 0);
	std::vector<uint32_t> t_row(pn);
	std::vector<uint32_t> w_limbs(K * limbs);

	for (uint64_t b = 1; b < p; ++b)
	{
		mpz_class omega;
		if (Qword != 0) omega = mpz_class(static_cast<unsigned long>(teichmuller_word(b, p, Qword, work)));
		else omega = teichmuller(mpz_class(static_cast<unsigned long>(b)), p, work).value();

		for (size_t r = 0; r < K; ++r)
		{
			mpz_class w;
			mpz_powm_ui(w.get_mpz_t(), omega.get_mpz_t(), exponents[r], Q.get_mpz_t());
			U[r] += w * static_cast<unsigned long>(b);
			for (size_t l = 0; l < limbs; ++l)
			{
				mpz_class limb;
				mpz_fdiv_q_2exp(limb.get_mpz_t(), w.get_mpz_t(), 32 * l);
				w_limbs[r * limbs + l] = uint32_t(mpz_get_ui(limb.get_mpz_t()) & 0xffffffffu);
			}
		}

		// Walk the coset b + pZ through the classes: a_{i+1} = a_i (1+p) mod p^(n+1).
		const uint64_t a0 = mpz_fdiv_ui(omega.get_mpz_t(), P);
		if (n == 1)
		{
			uint64_t t = (a0 - b) / p;
			for (uint64_t i = 0; i < pn; ++i)
			{
				t_row[i] = uint32_t(t);
				t += b;
				if (t >= p) t -= p;
			}
		}
		else
		{
			uint64_t a = a0;
			for (uint64_t i = 0; i < pn; ++i)
			{
				t_row[i] = uint32_t((a - b) / p);
				a += p * (a % pn);
				if (a >= P) a -= P;
			}
		}

		// w < 2^32, t < p^n and fewer than p terms: each accumulator stays below 2^32 P < 2^64.
		for (size_t r = 0; r < K; ++r)
		{
			for (size_t l = 0; l < limbs; ++l)
			{
				const uint64_t w = w_limbs[r * limbs + l];
				if (w == 0) continue;
				uint64_t * const row = &acc[(r * limbs + l) * pn];
				for (uint64_t i = 0; i < pn; ++i) row[i] += w * t_row[i];
			}
		}
	}

	const mpz_class PN = ipow(p, N);
	const mpz_class Pbig(static_cast<unsigned long>(P));
	std::vector<std::vector<mpz_class>> result(K, std::vector<mpz_class>(pn));
	for (size_t r = 0; r < K; ++r)
	{
		for (uint64_t i = 0; i < pn; ++i)
		{
			mpz_class s = 0;
			for (size_t l = limbs; l-- > 0;)
			{
				s <<= 32;
				s += static_cast<unsigned long>(acc[(r * limbs + l) * pn + i]);
			}
			s = U[r] + s * static_cast<unsigned long>(p);
			mpz_fdiv_r(s.get_mpz_t(), s.get_mpz_t(), Q.get_mpz_t());
			if (!mpz_divisible_p(s.get_mpz_t(), Pbig.get_mpz_t()))
				throw std::logic_error("Stickelberger sum not divisible by p^(n+1): convention error at p = "
					+ std::to_string(p) + ", k = " + std::to_string(ks[r]));
			s /= Pbig;
			if (orientation.overall_sign > 0) s = -s;	// f = -(1/p^(n+1)) sum ...
			mpz_fdiv_r(s.get_mpz_t(), s.get_mpz_t(), PN.get_mpz_t());
			result[r][i] = s;
		}
	}
	return result;
}

ResidueInt kappa_power(uint64_t p, unsigned N, long s)
{
	return ResidueInt(p, N, long(p + 1)).pow(mpz_class(s));
}

bool interpolates(const TruncatedSeries & series, unsigned weight)
{
	const uint64_t p = series.p;
	const unsigned bound = std::max(weight, kDefaultOracleBound);
	const ExactRational euler = 1 - ExactRational(ipow(p, weight - 1));
	const ExactRational target = -euler * bernoulli_exact(weight, bound) / weight;
	const ResidueInt value = lp_eval(series, 1 - long(weight));
	return value == residue_of(target, p, value.precision());
}

}

std::string Orientation::describe() const
{
	std::ostringstream ss;
	ss << "f(T) = " << (overall_sign > 0 ? "-" : "+") << "(1/p^(n+1)) sum_a a omega(a)^"
	   << (twist == CharacterTwist::KMinusOne ? "(k-1)" : "(-k)")
	   << " (1+T)^(" << (exponent_sign > 0 ? "" : "-") << "i(a))";
	return ss.str();
}

std::vector<Orientation> candidate_orientations()
{
	std::vector<Orientation> out;
	for (const auto twist : {CharacterTwist::KMinusOne, CharacterTwist::MinusK})
		for (const int e : {1, -1})
			for (const int s : {1, -1})
				out.push_back(Orientation{twist, e, s});
	return out;
}

Orientation pin_convention(uint64_t p, unsigned k)
{
	check_branch(p, k);
	const unsigned level = 2, N = 3;
	const unsigned M = default_truncation(p, level);
	const unsigned w1 = k, w2 = k + unsigned(p - 1);

	std::vector<Orientation> hits;
	for (const Orientation & o : candidate_orientations())
	{
		const TruncatedSeries s = build_series(p, k, level, N, M, o);
		if (interpolates(s, w1) && interpolates(s, w2)) hits.push_back(o);
	}
	if (hits.size() != 1)
		throw std::logic_error("pin_convention: " + std::to_string(hits.size()) + " orientations interpolate at p = "
			+ std::to_string(p) + ", k = " + std::to_string(k));
	return hits.front();
}

const Orientation & pinned_orientation()
{
	static Orientation pinned;
	static std::once_flag once;
	std::call_once(once, [] {
		static constexpr std::pair<uint64_t, unsigned> calibration[] = {{5, 2}, {7, 2}, {7, 4}, {11, 4}, {13, 6}, {37, 32}};
		std::optional<Orientation> chosen;
		for (const auto & [p, k] : calibration)
		{
			const Orientation o = pin_convention(p, k);
			if (chosen && !(*chosen == o))
				throw std::logic_error("pinned_orientation: calibration set disagrees at p = " + std::to_string(p));
			chosen = o;
		}
		pinned = *chosen;
	});
	return pinned;
}

unsigned default_truncation(uint64_t p, unsigned level)
{
	const uint64_t pn = modarith::checked_pow(p, level);
	return unsigned((pn == 0 || pn > 32) ? 32 : pn);
}

std::vector<TruncatedSeries> build_series_batch(uint64_t p, const std::vector<unsigned> & ks, unsigned level,
	unsigned precision, unsigned truncation, const Orientation & orientation)
{
	for (const unsigned k : ks) check_branch(p, k);
	if (level == 0) throw std::invalid_argument("build_series: level must be >= 1");
	if (precision == 0) throw std::invalid_argument("build_series: precision must be >= 1");
	const uint64_t pn = modarith::checked_pow(p, level);
	if (truncation == 0 || (pn != 0 && truncation > pn))
		throw std::invalid_argument("build_series: truncation must satisfy 1 <= M <= p^level");

	const auto rings = stickelberger_group_ring(p, ks, level, precision, orientation);
	std::vector<TruncatedSeries> out;
	out.reserve(ks.size());
	for (size_t r = 0; r < ks.size(); ++r)
	{
		TruncatedSeries s{p, ks[r], level, precision, truncation, orientation, {}, rings[r]};
		for (const mpz_class & c : to_t_basis(rings[r], p, precision, truncation, orientation.exponent_sign))
			s.coefficients.emplace_back(p, precision, c);
		out.push_back(std::move(s));
	}
	return out;
}

TruncatedSeries build_series(uint64_t p, unsigned k, unsigned level, unsigned precision, unsigned truncation, const Orientation & orientation)
{
	return std::move(build_series_batch(p, {k}, level, precision, truncation, orientation).front());
}

TruncatedSeries build_series(uint64_t p, unsigned k, unsigned level, unsigned precision, unsigned truncation)
{
	return build_series(p, k, level, precision, truncation, pinned_orientation());
}

unsigned effective_precision(const TruncatedSeries & series)
{
	return std::min({series.precision, series.truncation, series.level + 1});
}

ResidueInt evaluate(const TruncatedSeries & series, const ResidueInt & x)
{
	ResidueInt acc(series.p, series.precision, 0L);
	for (size_t j = series.coefficients.size(); j-- > 0;)
		acc = acc * x + series.coefficients[j];
	return acc;
}

ResidueInt lp_eval(const TruncatedSeries & series, long s)
{
	const ResidueInt T = kappa_power(series.p, series.precision, s) - ResidueInt(series.p, series.precision, 1L);
	return evaluate(series, T).reduce_to(effective_precision(series));
}

std::optional<ResidueInt> newton_root(const TruncatedSeries & series)
{
	const auto & c = series.coefficients;
	if (c.size() < 2 || c[0].valuation() == 0 || !c[1].is_unit()) return std::nullopt;

	const uint64_t p = series.p;
	const unsigned N = series.precision;
	ResidueInt theta(p, N, 0L);
	// Quadratic convergence from theta = 0: 2^j correct digits after j steps.
	for (unsigned iter = 0; iter <= 2 * N + 2; ++iter)
	{
		const ResidueInt value = evaluate(series, theta);
		if (value.is_zero()) return theta;
		ResidueInt derivative(p, N, 0L);
		for (size_t j = c.size(); j-- > 1;)
			derivative = derivative * theta + c[j] * ResidueInt(p, N, long(j));
		theta -= value * derivative.inverse();
	}
	throw std::logic_error("newton_root: iteration did not converge");
}

BranchInvariants invariants(const TruncatedSeries & series)
{
	const uint64_t p = series.p;
	const auto & c = series.coefficients;
	std::ostringstream where;
	where << "(p = " << p << ", k = " << series.k << ", level " << series.level << ", N = " << series.precision << "): ";

	BranchInvariants inv;
	inv.precision_used = series.precision;
	inv.level_used = series.level;

	unsigned mu = series.precision;
	for (const ResidueInt & x : c) mu = std::min(mu, unsigned(x.valuation()));
	if (mu >= 1) throw EscalationRequest(where.str() + "every visible coefficient is divisible by p; mu and lambda undetermined");
	inv.mu = 0;
	inv.lambda = unsigned(std::find_if(c.begin(), c.end(), [](const ResidueInt & x) { return x.is_unit(); }) - c.begin());

	if (c[0].is_zero()) throw EscalationRequest(where.str() + "f(0) vanishes at this precision (a >= N)");
	inv.a = c[0].valuation();

	const ResidueInt at_one = lp_eval(series, 1);
	if (at_one.is_zero())
		throw EscalationRequest(where.str() + "f(p) vanishes mod p^" + std::to_string(at_one.precision()) + " (m undetermined)");
	inv.m = at_one.valuation();

	if (inv.a == 0 && (inv.lambda != 0 || inv.m != 0))
		throw std::logic_error(where.str() + "unit f(0) with non-zero lambda or m");

	if (inv.lambda == 1)
	{
		// theta is meaningful mod p^min(N, level+1); c = -theta / p^a needs it mod p^(a+1).
		if (unsigned(inv.a) + 1 > std::min(series.precision, series.level + 1))
			throw EscalationRequest(where.str() + "root not determined to p^(a+1)");
		const auto theta = newton_root(series);
		if (!theta) throw std::logic_error(where.str() + "lambda = 1 but no Newton root");
		mpz_class q = theta->value() / ipow(p, unsigned(inv.a));
		const unsigned long cm = mpz_fdiv_ui(mpz_class(-q).get_mpz_t(), p);
		inv.c_mod_p = unsigned(cm);

		// f = (T + c p^a) u gives v_p(f(p)) = v_p(p + c p^a).
		const bool expect_m1 = inv.a >= 2 || cm != p - 1;
		if ((inv.m == 1) != expect_m1)
			throw std::logic_error(where.str() + "m disagrees with v_p(p + c p^a)");
	}
	return inv;
}

std::vector<BranchInvariants> branch_invariants(uint64_t p, const std::vector<unsigned> & ks, const PrecisionPolicy & policy)
{
	std::vector<BranchInvariants> out(ks.size());
	std::vector<size_t> pending(ks.size());
	for (size_t r = 0; r < ks.size(); ++r) pending[r] = r;

	unsigned level = policy.level, N = policy.precision;
	std::string last_reason;
	for (unsigned attempt = 0; !pending.empty(); ++attempt)
	{
		if (attempt > policy.max_escalations)
			throw std::runtime_error("branch_invariants: giving up after " + std::to_string(policy.max_escalations)
				+ " escalations; last request " + last_reason);

		const unsigned M = (policy.truncation != 0) ? policy.truncation : default_truncation(p, level);
		std::vector<unsigned> sub;
		for (const size_t r : pending) sub.push_back(ks[r]);

		std::vector<TruncatedSeries> series;
		try
		{
			series = build_series_batch(p, sub, level, N, M, pinned_orientation());
		}
		catch (const std::length_error & e)
		{
			throw std::runtime_error("branch_invariants: escalation beyond desk scale: " + std::string(e.what())
				+ (last_reason.empty() ? "" : "; triggered by " + last_reason));
		}

		std::vector<size_t> still;
		for (size_t s = 0; s < series.size(); ++s)
		{
			try
			{
				out[pending[s]] = invariants(series[s]);
			}
			catch (const EscalationRequest & e)
			{
				still.push_back(pending[s]);
				last_reason = e.what();
			}
		}
		pending.swap(still);
		N *= 2;
		level += 1;
	}
	return out;
}

}
