#include "delayarb/fixed.hpp"

#include <cctype>
#include <stdexcept>

namespace delayarb {

namespace {

BigInt pow10(int digits) {
    BigInt value = 1;
    for (int i = 0; i < digits; ++i) value *= 10;
    return value;
}

// cpp_int division truncates toward zero already; this spells it out where
// the rounding direction matters.
BigInt div_trunc(const BigInt& num, const BigInt& den) {
    return num / den;
}

}  // namespace

const BigInt& Fixed::scale() {
    static const BigInt kScale = pow10(kFracDigits);
    return kScale;
}

Fixed::Fixed(std::int64_t integer_value) : raw_(BigInt(integer_value) * scale()) {}

Fixed Fixed::from_raw(BigInt raw) {
    Fixed f;
    f.raw_ = std::move(raw);
    return f;
}

std::optional<Fixed> Fixed::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool negative = false;
    std::size_t pos = 0;
    if (text[0] == '-') {
        negative = true;
        pos = 1;
    }
    if (pos >= text.size()) return std::nullopt;

    BigInt integer_part = 0;
    std::size_t int_digits = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        integer_part = integer_part * 10 + (text[pos] - '0');
        ++pos;
        ++int_digits;
    }
    if (int_digits == 0) return std::nullopt;

    BigInt frac_part = 0;
    int frac_digits = 0;
    if (pos < text.size()) {
        if (text[pos] != '.') return std::nullopt;
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            if (++frac_digits > kFracDigits) return std::nullopt;
            frac_part = frac_part * 10 + (text[pos] - '0');
            ++pos;
        }
        if (frac_digits == 0) return std::nullopt;
        if (pos != text.size()) return std::nullopt;
    }

    BigInt raw = integer_part * scale() + frac_part * pow10(kFracDigits - frac_digits);
    if (negative) raw = -raw;
    return from_raw(std::move(raw));
}

std::string Fixed::str() const {
    BigInt magnitude = raw_ < 0 ? BigInt(-raw_) : raw_;
    BigInt whole = magnitude / scale();
    BigInt frac = magnitude % scale();

    std::string out;
    if (raw_ < 0) out += '-';
    out += whole.str();
    if (frac != 0) {
        std::string digits = frac.str();
        digits.insert(digits.begin(), kFracDigits - digits.size(), '0');
        while (!digits.empty() && digits.back() == '0') digits.pop_back();
        out += '.';
        out += digits;
    }
    return out;
}

double Fixed::to_double() const {
    return static_cast<double>(Rational(raw_, scale()));
}

Rational Fixed::to_rational() const {
    return Rational(raw_, scale());
}

Fixed Fixed::from_rational_trunc(const Rational& value) {
    BigInt num = boost::multiprecision::numerator(value) * scale();
    return from_raw(div_trunc(num, boost::multiprecision::denominator(value)));
}

BigInt Fixed::floor_int() const {
    BigInt q = raw_ / scale();
    if (raw_ < 0 && q * scale() != raw_) --q;
    return q;
}

BigInt Fixed::ceil_int() const {
    BigInt q = raw_ / scale();
    if (raw_ > 0 && q * scale() != raw_) ++q;
    return q;
}

Fixed Fixed::sqrt() const {
    if (raw_ < 0) throw std::domain_error("Fixed::sqrt of negative value");
    return from_raw(boost::multiprecision::sqrt(BigInt(raw_ * scale())));
}

Fixed& Fixed::operator+=(const Fixed& rhs) {
    raw_ += rhs.raw_;
    return *this;
}

Fixed& Fixed::operator-=(const Fixed& rhs) {
    raw_ -= rhs.raw_;
    return *this;
}

Fixed operator*(const Fixed& lhs, const Fixed& rhs) {
    return Fixed::from_raw(div_trunc(lhs.raw_ * rhs.raw_, Fixed::scale()));
}

Fixed operator/(const Fixed& lhs, const Fixed& rhs) {
    if (rhs.raw_ == 0) throw std::domain_error("Fixed division by zero");
    return Fixed::from_raw(div_trunc(lhs.raw_ * Fixed::scale(), rhs.raw_));
}

Fixed operator*(const Fixed& lhs, std::int64_t rhs) {
    return Fixed::from_raw(lhs.raw_ * rhs);
}

Fixed operator/(const Fixed& lhs, std::int64_t rhs) {
    if (rhs == 0) throw std::domain_error("Fixed division by zero");
    return Fixed::from_raw(div_trunc(lhs.raw_, BigInt(rhs)));
}

Fixed abs(const Fixed& value) {
    return value.is_negative() ? -value : value;
}

Fixed min(const Fixed& lhs, const Fixed& rhs) {
    return lhs < rhs ? lhs : rhs;
}

Fixed max(const Fixed& lhs, const Fixed& rhs) {
    return lhs < rhs ? rhs : lhs;
}

Fixed clamp_unit(const Fixed& value) {
    if (value.is_negative()) return Fixed(0);
    if (value > Fixed(1)) return Fixed(1);
    return value;
}

Fixed eth_to_gwei(const Fixed& eth) {
    return eth * 1'000'000'000;
}

Fixed gwei_to_eth(const Fixed& gwei) {
    return gwei / 1'000'000'000;
}

}  // namespace delayarb
