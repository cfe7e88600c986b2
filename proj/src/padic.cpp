#include "cyclotower/padic.hpp"

#include <stdexcept>

#include "cyclotower/modarith.hpp"

namespace cyclotower {

void require_odd_prime(uint64_t p, const char * where)
{
	if (p < 5 || !modarith::is_prime(p))
		throw std::invalid_argument(std::string(where) + ": p must be a prime >= 5 (got " + std::to_string(p) + ")");
}

mpz_class ipow(uint64_t p, unsigned e)
{
	mpz_class r;
	mpz_ui_pow_ui(r.get_mpz_t(), p, e);
	return r;
}

static mpz_class mod_floor(const mpz_class & a, const mpz_class & m)
{
	mpz_class r;
	mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
	return r;
}

ResidueInt::ResidueInt(uint64_t p, unsigned precision, const mpz_class & value)
	: _p(p), _N(precision), _modulus(ipow(p, precision))
{
	if (p < 5 || (p & 1) == 0) throw std::invalid_argument("ResidueInt: p must be odd and >= 5");
	if (precision == 0) throw std::invalid_argument("ResidueInt: precision must be >= 1");
	_value = mod_floor(value, _modulus);
}

ResidueInt::ResidueInt(uint64_t p, unsigned precision, long value)
	: ResidueInt(p, precision, mpz_class(value)) {}

int ResidueInt::valuation() const
{
	if (_value == 0) return int(_N);
	return cyclotower::valuation(_value, _p);
}

void ResidueInt::check_compatible(const ResidueInt & rhs) const
{
	if (_p != rhs._p || _N != rhs._N)
		throw std::invalid_argument("ResidueInt: operands differ in p or precision");
}

ResidueInt ResidueInt::reduce_to(unsigned precision) const
{
	if (precision > _N) throw std::invalid_argument("ResidueInt::reduce_to: cannot raise precision");
	return ResidueInt(_p, precision, _value);
}

ResidueInt ResidueInt::pow(const mpz_class & exp) const
{
	ResidueInt r = *this;
	if (exp < 0)
	{
		r = inverse();
		mpz_powm(r._value.get_mpz_t(), r._value.get_mpz_t(), mpz_class(-exp).get_mpz_t(), _modulus.get_mpz_t());
		return r;
	}
	mpz_powm(r._value.get_mpz_t(), _value.get_mpz_t(), exp.get_mpz_t(), _modulus.get_mpz_t());
	return r;
}

ResidueInt ResidueInt::inverse() const
{
	ResidueInt r = *this;
	if (mpz_invert(r._value.get_mpz_t(), _value.get_mpz_t(), _modulus.get_mpz_t()) == 0)
		throw std::domain_error("ResidueInt::inverse: not a unit");
	return r;
}

ResidueInt ResidueInt::operator-() const
{
	return ResidueInt(_p, _N, mpz_class(-_value));
}

ResidueInt & ResidueInt::operator+=(const ResidueInt & rhs)
{
	check_compatible(rhs);
	_value += rhs._value;
	if (_value >= _modulus) _value -= _modulus;
	return *this;
}

ResidueInt & ResidueInt::operator-=(const ResidueInt & rhs)
{
	check_compatible(rhs);
	_value -= rhs._value;
	if (_value < 0) _value += _modulus;
	return *this;
}

ResidueInt & ResidueInt::operator*=(const ResidueInt & rhs)
{
	check_compatible(rhs);
	_value *= rhs._value;
	_value = mod_floor(_value, _modulus);
	return *this;
}

bool operator==(const ResidueInt & lhs, const ResidueInt & rhs)
{
	lhs.check_compatible(rhs);
	return lhs._value == rhs._value;
}

ResidueInt teichmuller(const mpz_class & a, uint64_t p, unsigned N)
{
	if ((p & 1) == 0) throw std::invalid_argument("teichmuller: p must be odd");
	require_odd_prime(p, "teichmuller");
	if (N == 0) throw std::invalid_argument("teichmuller: precision must be >= 1");
	if (mpz_divisible_ui_p(a.get_mpz_t(), p)) throw std::invalid_argument("teichmuller: p divides a");

	const mpz_class m = ipow(p, N);
	mpz_class x = mod_floor(a, m), y;
	const mpz_class e(static_cast<unsigned long>(p));
	// After j steps x is correct mod p^(j+1).
	for (unsigned i = 0; i < N; ++i)
	{
		mpz_powm(y.get_mpz_t(), x.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
		if (y == x) break;
		x = y;
	}
	return ResidueInt(p, N, x);
}

uint64_t teichmuller_word(uint64_t a, uint64_t p, uint64_t m, unsigned N)
{
	uint64_t x = a % m;
	for (unsigned i = 0; i < N; ++i)
	{
		const uint64_t y = modarith::powmod(x, p, m);
		if (y == x) break;
		x = y;
	}
	return x;
}

DigitDecomposition decompose(const mpz_class & a, uint64_t p, unsigned level)
{
	require_odd_prime(p, "decompose");
	if (level == 0) throw std::invalid_argument("decompose: level must be >= 1");
	if (mpz_divisible_ui_p(a.get_mpz_t(), p)) throw std::invalid_argument("decompose: p divides a");

	const unsigned prec = level + 1;
	const mpz_class m = ipow(p, prec);
	const ResidueInt omega = teichmuller(a, p, prec);
	ResidueInt x = ResidueInt(p, prec, a) * omega.inverse();	// principal unit
	const ResidueInt kappa(p, prec, long(p + 1));

	// Peel off base-p digits of the discrete log: kappa^(p^j) = 1 + p^(j+1) mod p^(j+2).
	mpz_class index = 0, pj = 1;
	for (unsigned j = 0; j < level; ++j)
	{
		const mpz_class pj1 = pj * p;
		mpz_class t = (x.value() - 1) / pj1;
		const unsigned long digit = mpz_fdiv_ui(t.get_mpz_t(), p);
		if (digit != 0)
		{
			x *= kappa.pow(mpz_class(-(pj * digit)));
			index += pj * digit;
		}
		pj = pj1;
	}
	if (x.value() != 1) throw std::logic_error("decompose: residual is not 1");
	return DigitDecomposition{p, level, omega, index};
}

int valuation(const mpz_class & x, uint64_t p)
{
	if (x == 0) return kInfiniteValuation;
	mpz_class t;
	const mpz_class pp(static_cast<unsigned long>(p));
	return int(mpz_remove(t.get_mpz_t(), x.get_mpz_t(), pp.get_mpz_t()));
}

int valuation(const ExactRational & x, uint64_t p)
{
	if (x == 0) return kInfiniteValuation;
	return valuation(mpz_class(x.get_num()), p) - valuation(mpz_class(x.get_den()), p);
}

ResidueInt residue_of(const ExactRational & x, uint64_t p, unsigned N)
{
	const mpz_class m = ipow(p, N);
	mpz_class inv;
	if (mpz_invert(inv.get_mpz_t(), x.get_den_mpz_t(), m.get_mpz_t()) == 0)
		throw std::domain_error("residue_of: denominator divisible by p");
	return ResidueInt(p, N, mpz_class(x.get_num() * inv));
}

}
