#pragma once

#include <algorithm>
#include <complex>
#include <string>

#include <cstdio>

#include <mpfr.h>

namespace tl {

// Owning MPFR value with explicit precision.  Results of binary
// operations carry the larger operand precision.
class BigFloat {
public:
    explicit BigFloat(mpfr_prec_t bits = 256) 
    {
        mpfr_init2(v_, bits);
        mpfr_set_zero(v_, 1);
    }
    BigFloat(double x, mpfr_prec_t bits) 
    {
        mpfr_init2(v_, bits);
        mpfr_set_d(v_, x, MPFR_RNDN);
    }
    BigFloat(const BigFloat& o) 
    {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    BigFloat(BigFloat&& o) noexcept
    {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, o.v_);
    }
    BigFloat& operator=(const BigFloat& o)
    {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept
    {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    mpfr_prec_t bits() const { return mpfr_get_prec(v_); }
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    // Exact hexadecimal form, readable back by from_hex.
    std::string to_hex() const;
    static BigFloat from_hex(const std::string& s, mpfr_prec_t bits);
    static BigFloat pi(mpfr_prec_t bits);

    BigFloat& operator+=(const BigFloat& o) { return apply(mpfr_add, o); }
    BigFloat& operator-=(const BigFloat& o) { return apply(mpfr_sub, o); }
    BigFloat& operator*=(const BigFloat& o) { return apply(mpfr_mul, o); }
    BigFloat& operator/=(const BigFloat& o) { return apply(mpfr_div, o); }

    friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
    friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
    friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
    friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }
    friend BigFloat operator-(BigFloat a)
    {
        mpfr_neg(a.v_, a.v_, MPFR_RNDN);
        return a;
    }
    friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_) != 0; }

    friend BigFloat sqrt(BigFloat a)
    {
        mpfr_sqrt(a.v_, a.v_, MPFR_RNDN);
        return a;
    }
    friend BigFloat abs(BigFloat a)
    {
        mpfr_abs(a.v_, a.v_, MPFR_RNDN);
        return a;
    }
    friend BigFloat hypot(const BigFloat& a, const BigFloat& b)
    {
        BigFloat r(std::max(a.bits(), b.bits()));
        mpfr_hypot(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }

private:
    using Op = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
    BigFloat& apply(Op op, const BigFloat& o)
    {
        if (o.bits() > bits()) mpfr_prec_round(v_, o.bits(), MPFR_RNDN);
        op(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    mpfr_t v_;
};

struct BigComplex {
    BigFloat re, im;

    explicit BigComplex(mpfr_prec_t bits = 256) : re(bits), im(bits) {}
    BigComplex(std::complex<double> z, mpfr_prec_t bits) : re(z.real(), bits), im(z.imag(), bits) {}
    BigComplex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}

    mpfr_prec_t bits() const { return re.bits(); }
    std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }

    BigComplex& operator+=(const BigComplex& o)
    {
        re += o.re;
        im += o.im;
        return *this;
    }
    BigComplex& operator-=(const BigComplex& o)
    {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    friend BigComplex operator+(BigComplex a, const BigComplex& b) { return a += b; }
    friend BigComplex operator-(BigComplex a, const BigComplex& b) { return a -= b; }
    friend BigComplex operator-(BigComplex a) { return {-std::move(a.re), -std::move(a.im)}; }
    friend BigComplex operator*(const BigComplex& a, const BigComplex& b)
    {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    BigComplex& operator*=(const BigComplex& o) { return *this = *this * o; }
    friend BigComplex operator/(const BigComplex& a, const BigComplex& b)
    {
        const BigFloat den = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
    }
    friend BigComplex conj(BigComplex a)
    {
        a.im = -std::move(a.im);
        return a;
    }
    friend BigFloat norm(const BigComplex& a) { return a.re * a.re + a.im * a.im; }
    friend BigFloat abs(const BigComplex& a) { return hypot(a.re, a.im); }
};

// Scalar helpers shared by code templated over std::complex<double> and BigComplex.
inline std::complex<double> constant_like(const std::complex<double>&, double v) { return v; }
inline BigComplex constant_like(const BigComplex& p, double v) { return BigComplex({v, 0.0}, p.bits()); }
inline double magnitude(const std::complex<double>& z) { return std::abs(z); }
inline double magnitude(const BigComplex& z) { return abs(z).to_double(); }

}  // namespace tl
