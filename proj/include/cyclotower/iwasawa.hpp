#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclotower/padic.hpp"

// Iwasawa power series of the branch omega^k from Stickelberger sums.
//
// For a level n, every a in [1, p^(n+1)) prime to p is written as
// a = omega(a) (1+p)^i(a) mod p^(n+1), and
//
//     f_n(T) = -(1/p^(n+1)) sum_a a omega(a)^(k-1) (1+T)^(-i(a))  mod ((1+T)^(p^n) - 1)
//
// so that f((1+p)^s - 1) = L_p(s, omega^k). The character twist, the exponent
// direction and the overall sign are not hard-coded: they are selected at
// startup by checking the interpolation property against exact Bernoulli
// numbers (see pinned_orientation()).
//
// f_n agrees with f modulo (1+T)^(p^n) - 1, so f_n(0) = f(0) exactly and
// f_n(x) = f(x) mod p^(n+1) for every x in pZ_p.
namespace cyclotower {

enum class CharacterTwist
{
	KMinusOne,	// weight omega(a)^(k-1)
	MinusK		// weight omega(a)^(-k)
};

struct Orientation
{
	CharacterTwist twist;
	int exponent_sign;	// (1+T)^(exponent_sign * i(a))
	int overall_sign;

	std::string describe() const;
	friend bool operator==(const Orientation &, const Orientation &) = default;
};

std::vector<Orientation> candidate_orientations();

// The unique candidate satisfying interpolation at two weights n = k mod (p-1).
// Throws std::logic_error if none (or more than one) does.
Orientation pin_convention(uint64_t p, unsigned k);

// Calibrated once over a fixed set of (p, k); every member must select the same candidate.
const Orientation & pinned_orientation();

struct TruncatedSeries
{
	uint64_t p;
	unsigned k;
	unsigned level;
	unsigned precision;
	unsigned truncation;
	Orientation orientation;
	std::vector<ResidueInt> coefficients;	// c_0 .. c_{M-1} mod p^N
	std::vector<mpz_class> group_ring;		// coefficient of gamma^i, i in [0, p^level), mod p^N
};

// Enumeration ceiling p^(level+1) for the Stickelberger kernel.
inline constexpr uint64_t kMaxEnumeration = uint64_t(1) << 32;

TruncatedSeries build_series(uint64_t p, unsigned k, unsigned level, unsigned precision, unsigned truncation);
TruncatedSeries build_series(uint64_t p, unsigned k, unsigned level, unsigned precision, unsigned truncation, const Orientation & orientation);

// Several branches of one prime in a single pass over the residues.
std::vector<TruncatedSeries> build_series_batch(uint64_t p, const std::vector<unsigned> & ks, unsigned level,
	unsigned precision, unsigned truncation, const Orientation & orientation);

// min(N, M, level + 1): the precision at which values at points of pZ_p are meaningful.
unsigned effective_precision(const TruncatedSeries & series);

// f((1+p)^s - 1) mod p^effective_precision.
ResidueInt lp_eval(const TruncatedSeries & series, long s);

// f(x) mod p^N for the stored coefficients.
ResidueInt evaluate(const TruncatedSeries & series, const ResidueInt & x);

// Root theta = 0 mod p of the truncated polynomial, when c_0 = 0 mod p and c_1 is a unit.
std::optional<ResidueInt> newton_root(const TruncatedSeries & series);

struct BranchInvariants
{
	unsigned mu = 0;
	unsigned lambda = 0;
	int a = 0;
	int m = 0;
	std::optional<unsigned> c_mod_p;	// only when lambda == 1
	unsigned precision_used = 0;
	unsigned level_used = 0;
};

// The series does not determine an invariant at its precision / level.
class EscalationRequest : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

BranchInvariants invariants(const TruncatedSeries & series);

struct PrecisionPolicy
{
	unsigned level = 1;
	unsigned precision = 2;
	unsigned truncation = 0;	// 0: min(p^level, 32)
	unsigned max_escalations = 2;
};

unsigned default_truncation(uint64_t p, unsigned level);

// Invariants for each branch, escalating (precision * 2, level + 1) on request.
std::vector<BranchInvariants> branch_invariants(uint64_t p, const std::vector<unsigned> & ks, const PrecisionPolicy & policy = {});

}
