#pragma once

#include <cstdint>
#include <vector>

#include "cyclotower/padic.hpp"

namespace cyclotower {

inline constexpr unsigned kDefaultOracleBound = 200;

// B_n with B_1 = -1/2, from sum_{j=0}^{n} C(n+1, j) B_j = 0.
ExactRational bernoulli_exact(unsigned n, unsigned oracle_bound = kDefaultOracleBound);

// B_0 .. B_{n_max} by the same recurrence.
std::vector<ExactRational> bernoulli_exact_table(unsigned n_max);

// B_k mod p for even k in [2, p-3].
class BernoulliModTable
{
public:
	BernoulliModTable(uint64_t p, std::vector<uint32_t> residues) : _p(p), _residues(std::move(residues)) {}

	uint64_t p() const { return _p; }
	uint32_t at(unsigned k) const;
	const std::vector<uint32_t> & residues() const { return _residues; }	// index (k-2)/2

private:
	uint64_t _p;
	std::vector<uint32_t> _residues;
};

// Inverts x/sinh(x) against cosh(x) in the variable x^2 over F_p.
BernoulliModTable bernoulli_mod_p(uint64_t p);

// Single B_k mod p from the power sum sum_{a<p} a^k = p B_k (mod p^2).
uint32_t bernoulli_single_mod_p(uint64_t p, unsigned k);

struct IrregularPairSet
{
	uint64_t p;
	std::vector<unsigned> indices;	// strictly increasing even k with p | B_k

	size_t index_of_irregularity() const { return indices.size(); }
	bool regular() const { return indices.empty(); }
};

IrregularPairSet irregular_pairs(uint64_t p);
IrregularPairSet irregular_pairs(const BernoulliModTable & table);

// B_{n, omega^i} mod p^N for the Teichmüller power omega^i of conductor p.
ResidueInt gen_bernoulli(uint64_t p, long i, unsigned n, unsigned N);

}
