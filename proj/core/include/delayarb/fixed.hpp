#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace delayarb {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

//! Decimal fixed point with 18 fractional digits.
//!
//! Every monetary amount (GWei) and every pool reserve in this project is a
//! Fixed. Multiplication and division truncate toward zero, so any value
//! derived from the same inputs is reproducible bit for bit across runs,
//! platforms and compilers. Conversions between ETH and GWei happen only at
//! I/O boundaries.
class Fixed {
public:
    static constexpr int kFracDigits = 18;
    static const BigInt& scale();  // 10^18

    Fixed() = default;
    explicit Fixed(std::int64_t integer_value);

    static Fixed from_raw(BigInt raw);
    //! Exact decimal parse: -?digits[.digits], at most 18 fractional digits.
    //! Anything else (including excess precision) is rejected.
    static std::optional<Fixed> parse(std::string_view text);

    const BigInt& raw() const { return raw_; }

    bool is_zero() const { return raw_ == 0; }
    bool is_negative() const { return raw_ < 0; }
    bool is_positive() const { return raw_ > 0; }

    //! Canonical decimal rendering; trailing fractional zeros trimmed,
    //! round-trips exactly through parse().
    std::string str() const;

    //! Convenience for logs and coarse comparisons only.
    double to_double() const;

    Rational to_rational() const;
    static Fixed from_rational_trunc(const Rational& value);

    //! Largest integer <= value (toward negative infinity).
    BigInt floor_int() const;
    //! Smallest integer >= value.
    BigInt ceil_int() const;

    //! Floor square root; requires a non-negative value.
    Fixed sqrt() const;

    Fixed operator-() const { return from_raw(-raw_); }
    Fixed& operator+=(const Fixed& rhs);
    Fixed& operator-=(const Fixed& rhs);

    friend Fixed operator+(Fixed lhs, const Fixed& rhs) { return lhs += rhs; }
    friend Fixed operator-(Fixed lhs, const Fixed& rhs) { return lhs -= rhs; }
    friend Fixed operator*(const Fixed& lhs, const Fixed& rhs);
    friend Fixed operator/(const Fixed& lhs, const Fixed& rhs);

    // Exact scaling by plain integers.
    friend Fixed operator*(const Fixed& lhs, std::int64_t rhs);
    friend Fixed operator*(std::int64_t lhs, const Fixed& rhs) { return rhs * lhs; }
    friend Fixed operator/(const Fixed& lhs, std::int64_t rhs);

    friend bool operator==(const Fixed& lhs, const Fixed& rhs) = default;
    friend std::strong_ordering operator<=>(const Fixed& lhs, const Fixed& rhs) {
        return lhs.raw_ < rhs.raw_   ? std::strong_ordering::less
               : lhs.raw_ > rhs.raw_ ? std::strong_ordering::greater
                                     : std::strong_ordering::equal;
    }

private:
    BigInt raw_;  // value * 10^18
};

Fixed abs(const Fixed& value);
Fixed min(const Fixed& lhs, const Fixed& rhs);
Fixed max(const Fixed& lhs, const Fixed& rhs);
//! Clamp into [0, 1]; used for the probability terms of the bribery model.
Fixed clamp_unit(const Fixed& value);

//! 1 ETH = 10^9 GWei. Boundary conversions; gwei_to_eth truncates.
Fixed eth_to_gwei(const Fixed& eth);
Fixed gwei_to_eth(const Fixed& gwei);

}  // namespace delayarb
