#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include <gmpxx.h>

// Arithmetic in Z/p^N Z, Teichmüller lifts, and the splitting of a unit into
// its torsion part and a power of 1+p.
namespace cyclotower {

// Exact rational, always kept canonical (lowest terms, positive denominator).
using ExactRational = mpq_class;

// v_p(0) is reported as this value.
inline constexpr int kInfiniteValuation = std::numeric_limits<int>::max();

// Throws std::invalid_argument unless p is a prime >= 5.
void require_odd_prime(uint64_t p, const char * where);

class ResidueInt
{
public:
	ResidueInt(uint64_t p, unsigned precision, const mpz_class & value);
	ResidueInt(uint64_t p, unsigned precision, long value);

	uint64_t p() const { return _p; }
	unsigned precision() const { return _N; }
	const mpz_class & value() const { return _value; }
	const mpz_class & modulus() const { return _modulus; }

	// v_p of the representative, capped at precision() when the residue is 0.
	int valuation() const;
	bool is_zero() const { return _value == 0; }
	bool is_unit() const { return valuation() == 0; }

	ResidueInt reduce_to(unsigned precision) const;
	ResidueInt pow(const mpz_class & exp) const;
	ResidueInt inverse() const;
	ResidueInt operator-() const;

	ResidueInt & operator+=(const ResidueInt & rhs);
	ResidueInt & operator-=(const ResidueInt & rhs);
	ResidueInt & operator*=(const ResidueInt & rhs);

	friend ResidueInt operator+(ResidueInt lhs, const ResidueInt & rhs) { lhs += rhs; return lhs; }
	friend ResidueInt operator-(ResidueInt lhs, const ResidueInt & rhs) { lhs -= rhs; return lhs; }
	friend ResidueInt operator*(ResidueInt lhs, const ResidueInt & rhs) { lhs *= rhs; return lhs; }
	// Throws std::invalid_argument when p or precision differ.
	friend bool operator==(const ResidueInt & lhs, const ResidueInt & rhs);

	std::string to_string() const { return _value.get_str(); }

private:
	void check_compatible(const ResidueInt & rhs) const;

	uint64_t _p;
	unsigned _N;
	mpz_class _modulus;
	mpz_class _value;
};

// a = omega_part * (1+p)^index modulo p^(level+1).
struct DigitDecomposition
{
	uint64_t p;
	unsigned level;
	ResidueInt omega_part;
	mpz_class index;
};

// The (p-1)-th root of unity congruent to a mod p, to precision N.
ResidueInt teichmuller(const mpz_class & a, uint64_t p, unsigned N);

// Word-sized Teichmüller lift modulo m = p^N < 2^63 (no argument checks).
uint64_t teichmuller_word(uint64_t a, uint64_t p, uint64_t m, unsigned N);

DigitDecomposition decompose(const mpz_class & a, uint64_t p, unsigned level);

int valuation(const ExactRational & x, uint64_t p);
int valuation(const mpz_class & x, uint64_t p);

// Image of a p-integral rational in Z/p^N Z.
ResidueInt residue_of(const ExactRational & x, uint64_t p, unsigned N);

mpz_class ipow(uint64_t p, unsigned e);

}
