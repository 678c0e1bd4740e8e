// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "opmeans/errors.hpp"

namespace opmeans {

/// Exact rational number on int64 with overflow detection.
///
/// Measure weights, couplings and flow capacities are exact rationals so
/// that feasibility questions (weights summing to one, marginals matching)
/// never hinge on a floating-point tolerance. Intermediates are computed
/// in 128-bit and reduced before narrowing; anything that still does not
/// fit throws RationalOverflow instead of wrapping.
class Rational {
  public:
    /// Zero.
    constexpr Rational() : num_(0), den_(1) {}

    /// Integer value n/1.
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {} // NOLINT: implicit by design

    /// n/d, normalized to lowest terms with positive denominator.
    Rational(std::int64_t n, std::int64_t d) {
        if (d == 0) throw DomainError("Rational: zero denominator");
        __int128 nn = n;
        __int128 dd = d;
        if (dd < 0) {
            nn = -nn;
            dd = -dd;
        }
        assign_reduced(nn, dd);
    }

    /// Parses "p/q" or "p" (optional sign, decimal digits).
    static Rational parse(std::string_view text);

    [[nodiscard]] std::int64_t num() const { return num_; }
    [[nodiscard]] std::int64_t den() const { return den_; }
    [[nodiscard]] double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    [[nodiscard]] bool is_zero() const { return num_ == 0; }
    [[nodiscard]] bool is_positive() const { return num_ > 0; }
    [[nodiscard]] bool is_negative() const { return num_ < 0; }

    /// "p/q", or just "p" when the denominator is one.
    [[nodiscard]] std::string str() const {
        std::string s = std::to_string(num_);
        if (den_ != 1) s += "/" + std::to_string(den_);
        return s;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from_128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw DomainError("Rational: division by zero");
        return from_128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  private:
    using i128 = __int128;

    static Rational from_128(i128 n, i128 d) {
        Rational r;
        if (d < 0) {
            n = -n;
            d = -d;
        }
        r.assign_reduced(n, d);
        return r;
    }

    void assign_reduced(i128 n, i128 d) {
        i128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        constexpr i128 lo = INT64_MIN;
        constexpr i128 hi = INT64_MAX;
        if (n < lo || n > hi || d > hi)
            throw RationalOverflow("Rational: value exceeds 64-bit range after reduction");
        num_ = static_cast<std::int64_t>(n);
        den_ = static_cast<std::int64_t>(d);
    }

    static i128 gcd128(i128 a, i128 b) {
        while (b != 0) {
            i128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    std::int64_t num_;
    std::int64_t den_;
};

/// Least common multiple of two positive int64, overflow-checked.
inline std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
    const std::int64_t g = std::gcd(a, b);
    const __int128 l = static_cast<__int128>(a / g) * b;
    if (l > INT64_MAX) throw RationalOverflow("lcm exceeds 64-bit range");
    return static_cast<std::int64_t>(l);
}

inline Rational Rational::parse(std::string_view text) {
    const auto parse_int = [](std::string_view s) -> std::int64_t {
        if (s.empty()) throw ParseError("Rational: empty integer");
        std::size_t i = 0;
        bool neg = false;
        if (s[0] == '+' || s[0] == '-') {
            neg = s[0] == '-';
            i = 1;
        }
        if (i == s.size()) throw ParseError("Rational: sign without digits");
        __int128 v = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9')
                throw ParseError("Rational: invalid character in '" + std::string(s) + "'");
            v = v * 10 + (s[i] - '0');
            if (v > static_cast<__int128>(INT64_MAX) + 1)
                throw RationalOverflow("Rational: literal exceeds 64-bit range");
        }
        if (neg) v = -v;
        if (v < INT64_MIN || v > INT64_MAX)
            throw RationalOverflow("Rational: literal exceeds 64-bit range");
        return static_cast<std::int64_t>(v);
    };
    const std::size_t slash = text.find('/');
    if (slash == std::string_view::npos) return {parse_int(text)};
    return {parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1))};
}

} // namespace opmeans
