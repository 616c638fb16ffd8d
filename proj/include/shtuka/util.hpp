#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace shtuka {

// Error taxonomy. CLI maps ValidationError -> exit 2, BudgetExceeded and
// PrecisionError -> exit 3, everything else -> exit 1.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PrecisionError : Error {
    using Error::Error;
};
struct NotAUnit : Error {
    using Error::Error;
};
struct NotInvertible : Error {
    using Error::Error;
};
struct KappaMismatch : Error {
    using Error::Error;
};
struct BudgetExceeded : Error {
    using Error::Error;
};
struct EmptyStratum : Error {
    using Error::Error;
};
struct Unsupported : Error {
    using Error::Error;
};
struct ValidationError : Error {
    using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

/// Exact rational on 64-bit integers, always reduced with positive denominator.
/// Every quantity in this project is desk-scale (slopes d/h with h <= 8,
/// pairings bounded by a few hundred), so no big-integer backend is needed;
/// construction and arithmetic check for overflow anyway.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n) : num(n), den(1) {}
    Rational(long long n, long long d) : num(n), den(d) { reduce(); }

    void reduce() {
        if (den == 0) throw Error("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (num == 0) den = 1;
    }

    bool is_integer() const { return den == 1; }

    /// Largest integer <= value.
    long long floor() const {
        if (num >= 0) return num / den;
        return -((-num + den - 1) / den);
    }
    /// Smallest integer >= value.
    long long ceil() const { return -(Rational(-num, den).floor()); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num * b.num, a.den * b.den);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num == 0) throw Error("Rational: division by zero");
        return Rational(a.num * b.den, a.den * b.num);
    }
    Rational operator-() const { return Rational(-num, den); }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num * b.den < b.num * a.den;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return a < b || a == b; }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

/// Deterministic splitmix64 stream; identical output on every platform, which
/// keeps seeded artifacts byte-identical across runs (std distributions are
/// not portable, so they are never used).
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ULL) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, n); n > 0. Rejection-free modulo is fine at these sizes.
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    long long range(long long lo, long long hi) {  // inclusive ends
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }
};

}  // namespace shtuka
