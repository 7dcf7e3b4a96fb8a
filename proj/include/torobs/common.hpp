#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace torobs {

using Int = std::int64_t;
using cplx = std::complex<double>;

// All integer lattice arithmetic runs on checked 64-bit numbers: overflow is a
// hard error, never a silent wraparound.
struct overflow_error : std::runtime_error {
    explicit overflow_error(const char* op)
        : std::runtime_error(std::string("integer overflow in ") + op) {}
};

inline Int checked_add(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) throw overflow_error("add");
    return r;
}

inline Int checked_sub(Int a, Int b) {
    Int r;
    if (__builtin_sub_overflow(a, b, &r)) throw overflow_error("sub");
    return r;
}

inline Int checked_mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) throw overflow_error("mul");
    return r;
}

inline Int checked_neg(Int a) { return checked_sub(0, a); }

// Floor division/modulo; the remainder is always in [0, |b|).
inline Int floor_div(Int a, Int b) {
    Int q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline Int floor_mod(Int a, Int b) { return checked_sub(a, checked_mul(floor_div(a, b), b)); }

inline Int gcd_int(Int a, Int b) { return std::gcd(a, b); }

// Largest r with r*r <= n.
inline Int isqrt(Int n) {
    if (n < 0) throw std::invalid_argument("isqrt of negative number");
    Int r = static_cast<Int>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// Exact rational number on 64-bit numerator/denominator. Intermediate products
// go through 128-bit; a reduced result that does not fit back into 64 bits is
// an overflow error per the integer policy above.
class Rational {
  public:
    Rational() : num_(0), den_(1) {}
    Rational(Int n) : num_(n), den_(1) {}
    Rational(Int n, Int d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        normalize_from(static_cast<__int128>(n), static_cast<__int128>(d));
    }

    Int num() const { return num_; }
    Int den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational operator-() const { return make(-i128(num_), i128(den_)); }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  private:
    using i128 = __int128;

    static Rational make(i128 n, i128 d) {
        Rational r;
        r.normalize_from(n, d);
        return r;
    }

    void normalize_from(i128 n, i128 d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        i128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        constexpr i128 lo = std::numeric_limits<Int>::min();
        constexpr i128 hi = std::numeric_limits<Int>::max();
        if (n < lo || n > hi || d > hi) throw overflow_error("rational");
        num_ = static_cast<Int>(n);
        den_ = static_cast<Int>(d);
    }

    static i128 gcd128(i128 a, i128 b) {
        while (b != 0) { i128 t = a % b; a = b; b = t; }
        return a < 0 ? -a : a;
    }

    Int num_;
    Int den_;
};

// Deterministic splitmix64 stream; all randomized experiments derive their
// samples from an explicit seed so reports are reproducible byte for byte.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [lo, hi].
    Int uniform_int(Int lo, Int hi) {
        return lo + static_cast<Int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * M_PI * u2);
        have_cached_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    cplx complex_gaussian() { return {gaussian(), gaussian()}; }

    // Independent substream for sample i of a seeded experiment.
    Rng substream(std::uint64_t tag) const {
        Rng r(state_ ^ (0x632be59bd9b4e019ULL * (tag + 1)));
        r.next_u64();
        return r;
    }

  private:
    std::uint64_t state_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

// Locale-independent shortest-faithful formatting, 17 significant digits.
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string format_int(Int x) { return std::to_string(x); }

}  // namespace torobs
