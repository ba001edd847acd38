#pragma once

// Exact rational scalar layer: arbitrary-precision rationals (GMP mpq),
// certified enclosures for irrational quantities (square roots, lengths),
// and deterministic decimal formatting.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace gpe {

using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational rat(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Accepts "p/q", "p", optional sign, arbitrary precision.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    Rational r;
    if (mpq_set_str(r.get_mpq_t(), text.c_str(), 10) != 0)
        throw std::invalid_argument("bad rational literal: " + text);
    if (mpz_sgn(mpq_denref(r.get_mpq_t())) == 0)
        throw std::invalid_argument("zero denominator: " + text);
    r.canonicalize();
    return r;
}

// Canonical lowest-terms form; omits "/1" (matches GMP's own printer).
inline std::string rational_to_string(const Rational& r) { return r.get_str(); }

inline int sign(const Rational& r) { return mpq_sgn(r.get_mpq_t()); }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

// Bit size of the larger of |num|, den. Used for resource caps.
inline std::size_t bit_length(const Rational& r) {
    std::size_t nb = mpz_sizeinbase(mpq_numref(r.get_mpq_t()), 2);
    std::size_t db = mpz_sizeinbase(mpq_denref(r.get_mpq_t()), 2);
    return nb > db ? nb : db;
}

// log of a positive rational, accurate to double precision at any magnitude.
inline double log_rational(const Rational& r) {
    if (sign(r) <= 0) throw std::domain_error("log of non-positive rational");
    long en = 0, ed = 0;
    double mn = mpz_get_d_2exp(&en, mpq_numref(r.get_mpq_t()));
    double md = mpz_get_d_2exp(&ed, mpq_denref(r.get_mpq_t()));
    constexpr double ln2 = 0.693147180559945309417232121458;
    return std::log(mn / md) + static_cast<double>(en - ed) * ln2;
}

inline double to_double(const Rational& r) { return r.get_d(); }

// ---------------------------------------------------------------------------
// Certified rational enclosures.  An Interval [lo,hi] with lo <= hi brackets
// a real value; exact values have lo == hi.

struct Interval {
    Rational lo, hi;

    Interval() : lo(0), hi(0) {}
    explicit Interval(const Rational& exact) : lo(exact), hi(exact) {}
    Interval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) throw std::logic_error("inverted interval");
    }

    bool exact() const { return lo == hi; }
    Rational width() const { return hi - lo; }
    Rational mid() const { return (lo + hi) / 2; }
    double mid_d() const { return to_double(mid()); }
    bool contains(const Rational& x) const { return lo <= x && x <= hi; }

    Interval& operator+=(const Interval& o) {
        lo += o.lo;
        hi += o.hi;
        return *this;
    }
    friend Interval operator+(Interval a, const Interval& b) { return a += b; }
    friend Interval operator-(const Interval& a, const Interval& b) {
        return Interval(a.lo - b.hi, a.hi - b.lo);
    }
    // Scaling by a nonnegative rational only; that is all the callers need.
    friend Interval operator*(const Rational& c, const Interval& a) {
        if (sign(c) < 0) throw std::logic_error("negative interval scale");
        return Interval(c * a.lo, c * a.hi);
    }
    friend bool overlaps(const Interval& a, const Interval& b) {
        return !(a.hi < b.lo || b.hi < a.lo);
    }
};

// Default relative width of sqrt enclosures: 2^-40.
inline constexpr unsigned kSqrtPrecisionBits = 40;

// Certified enclosure of sqrt(x) for x >= 0.  Exact when x is a perfect
// square of a rational; otherwise relative width <= 2^-(bits-1).
inline Interval sqrt_enclosure(const Rational& x, unsigned bits = kSqrtPrecisionBits) {
    int s = sign(x);
    if (s < 0) throw std::domain_error("sqrt of negative rational");
    if (s == 0) return Interval(Rational(0));
    const mpz_class& p = x.get_num();
    const mpz_class& q = x.get_den();
    if (mpz_perfect_square_p(p.get_mpz_t()) && mpz_perfect_square_p(q.get_mpz_t())) {
        mpz_class sp, sq;
        mpz_sqrt(sp.get_mpz_t(), p.get_mpz_t());
        mpz_sqrt(sq.get_mpz_t(), q.get_mpz_t());
        Rational r(sp, sq);
        r.canonicalize();
        return Interval(r);
    }
    // sqrt(p/q) = sqrt(p*q)/q; bracket sqrt(m) by scaled integer sqrt.
    mpz_class m = p * q;
    mpz_class scaled = m << (2 * bits);
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
    mpz_class den = q;
    den <<= bits;
    Rational lo(root, den), hi(root + 1, den);
    lo.canonicalize();
    hi.canonicalize();
    return Interval(lo, hi);
}

// ---------------------------------------------------------------------------
// Deterministic decimal rendering of rationals at a fixed number of
// significant digits.  Directed rounding keeps printed enclosures valid.

enum class Round { Down, Up, Nearest };

namespace detail {

inline std::string format_digits(const std::string& digits, long exp10, bool negative) {
    // digits is a plain digit string, value = 0.digits * 10^exp10 scaled so
    // the first digit is the leading significant digit: d.ddd e(exp10-1).
    std::string mant;
    mant += digits[0];
    if (digits.size() > 1) {
        mant += '.';
        mant += digits.substr(1);
    }
    long e = exp10 - 1;
    std::string out = negative ? "-" : "";
    out += mant + "e" + (e < 0 ? "-" : "+");
    std::string ea = std::to_string(e < 0 ? -e : e);
    if (ea.size() < 2) ea.insert(0, "0");
    out += ea;
    return out;
}

} // namespace detail

// Value rendered as d.ddd...e±xx with `sig` significant digits.  Round::Down
// (Up) rounds toward -inf (+inf) so printed enclosure endpoints still bracket.
inline std::string to_decimal(const Rational& value, unsigned sig = 12,
                              Round mode = Round::Nearest) {
    if (sig == 0) throw std::invalid_argument("sig must be positive");
    if (sign(value) == 0) return "0";
    bool neg = sign(value) < 0;
    Rational x = neg ? Rational(-value) : value;
    if (neg) mode = (mode == Round::Down ? Round::Up : mode == Round::Up ? Round::Down : mode);

    // Find exp10 with 10^(exp10-1) <= x < 10^exp10.
    const mpz_class& p = x.get_num();
    const mpz_class& q = x.get_den();
    long approx = static_cast<long>(mpz_sizeinbase(p.get_mpz_t(), 10)) -
                  static_cast<long>(mpz_sizeinbase(q.get_mpz_t(), 10));
    long exp10 = approx - 2;
    auto pow10 = [](long e) {
        mpz_class t;
        mpz_ui_pow_ui(t.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
        return t;
    };
    auto less_than_pow10 = [&](long e) {
        // x < 10^e ?
        if (e >= 0) return mpz_cmp(p.get_mpz_t(), mpz_class(q * pow10(e)).get_mpz_t()) < 0;
        return mpz_cmp(mpz_class(p * pow10(-e)).get_mpz_t(), q.get_mpz_t()) < 0;
    };
    while (!less_than_pow10(exp10)) ++exp10;
    while (less_than_pow10(exp10 - 1)) --exp10;

    // digits = round(x * 10^(sig - exp10)) with the requested direction.
    long shift = static_cast<long>(sig) - exp10;
    mpz_class num = p, den = q;
    if (shift >= 0)
        num *= pow10(shift);
    else
        den *= pow10(-shift);
    mpz_class quo, rem;
    mpz_fdiv_qr(quo.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (mode == Round::Up && rem != 0) {
        quo += 1;
    } else if (mode == Round::Nearest && rem != 0) {
        if (mpz_class(rem * 2) >= den) quo += 1;
    }
    std::string digits = quo.get_str();
    if (digits.size() > sig) {  // rounding carried into a new leading digit
        digits.pop_back();
        ++exp10;
    }
    while (digits.size() < sig) digits += '0';
    return detail::format_digits(digits, exp10, neg);
}

inline std::string to_decimal(const Interval& iv, unsigned sig = 12) {
    return to_decimal(iv.lo, sig, Round::Down) + "," + to_decimal(iv.hi, sig, Round::Up);
}

} // namespace gpe
