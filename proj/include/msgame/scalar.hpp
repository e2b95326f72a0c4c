#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace msgame {

/// Raised when text cannot be read as an exact rational.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Exact rational number used for every size, speed and time.
///
/// Always canonical: denominator positive, fraction in lowest terms. There is
/// no rounding anywhere except in `decimal()` and `to_double()`, which exist
/// only for presentation.
class Scalar {
  public:
    Scalar() = default;
    Scalar(int value) : value_(static_cast<long>(value)) {}
    Scalar(long value) : value_(value) {}
    Scalar(unsigned long value) : value_(value) {}
    Scalar(long numerator, long denominator);
    explicit Scalar(mpq_class value);

    /// Accepts "a/b", integers, decimals ("0.1") and scientific notation
    /// ("1e6", "2.5E-3"). Throws ParseError on anything else.
    static Scalar parse(std::string_view text);

    /// Exact rendering: "a" when integral, otherwise "a/b".
    [[nodiscard]] std::string str() const;

    /// Fixed-point rendering with `precision` fractional digits, rounded to
    /// nearest with ties to even.
    [[nodiscard]] std::string decimal(int precision = 6) const;

    [[nodiscard]] double to_double() const { return value_.get_d(); }
    [[nodiscard]] int sign() const { return sgn(value_); }
    [[nodiscard]] bool is_integer() const;
    [[nodiscard]] std::string numerator() const { return value_.get_num().get_str(); }
    [[nodiscard]] std::string denominator() const { return value_.get_den().get_str(); }
    [[nodiscard]] const mpq_class& raw() const { return value_; }

    Scalar& operator+=(const Scalar& rhs);
    Scalar& operator-=(const Scalar& rhs);
    Scalar& operator*=(const Scalar& rhs);
    Scalar& operator/=(const Scalar& rhs);

    friend Scalar operator+(Scalar lhs, const Scalar& rhs) { return lhs += rhs; }
    friend Scalar operator-(Scalar lhs, const Scalar& rhs) { return lhs -= rhs; }
    friend Scalar operator*(Scalar lhs, const Scalar& rhs) { return lhs *= rhs; }
    friend Scalar operator/(Scalar lhs, const Scalar& rhs) { return lhs /= rhs; }
    friend Scalar operator-(const Scalar& x) { return Scalar(mpq_class(-x.value_)); }

    friend bool operator==(const Scalar& a, const Scalar& b) { return cmp(a.value_, b.value_) == 0; }
    friend std::strong_ordering operator<=>(const Scalar& a, const Scalar& b) {
        const int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

  private:
    mpq_class value_;
};

inline const Scalar& min(const Scalar& a, const Scalar& b) { return b < a ? b : a; }
inline const Scalar& max(const Scalar& a, const Scalar& b) { return a < b ? b : a; }

std::ostream& operator<<(std::ostream& os, const Scalar& x);

} // namespace msgame

template <>
struct std::hash<msgame::Scalar> {
    std::size_t operator()(const msgame::Scalar& x) const noexcept;
};
