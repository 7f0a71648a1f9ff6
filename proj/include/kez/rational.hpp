#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace kez {

// Exact rational with 64-bit numerator and positive 64-bit denominator,
// always stored in lowest terms. Arithmetic goes through 128-bit
// intermediates and throws std::overflow_error when the reduced result
// does not fit.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(implicit)
    Rational(std::int64_t n, std::int64_t d);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    // True for 0, -1, -2, ...
    bool is_nonpositive_integer() const { return den_ == 1 && num_ <= 0; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // floor and ceil as integers
    std::int64_t floor() const;
    std::int64_t ceil() const;

    // "p/q" or "p" when q == 1.
    std::string str() const;
    // Accepts "p", "-p", "p/q". Decimal points are rejected.
    static Rational parse(std::string_view text);
    // Best rational approximation with denominator <= max_den; exact for
    // dyadic/short decimals like 0.5 or 0.4 when max_den allows.
    static Rational from_double(double x, std::int64_t max_den = 1000000);

    Rational operator-() const;
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    static Rational from_wide(__int128 n, __int128 d);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace kez
