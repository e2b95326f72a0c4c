#include "msgame/scalar.hpp"

#include <cctype>
#include <ostream>

namespace msgame {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (std::isdigit(static_cast<unsigned char>(c)) == 0) {
            return false;
        }
    }
    return true;
}

mpz_class pow10(unsigned long exponent) {
    mpz_class result;
    mpz_ui_pow_ui(result.get_mpz_t(), 10, exponent);
    return result;
}

// Parses an optionally signed integer literal into `out`.
bool parse_integer(std::string_view s, mpz_class& out) {
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s)) {
        return false;
    }
    out = mpz_class(std::string(s), 10);
    if (negative) {
        out = -out;
    }
    return true;
}

} // namespace

Scalar::Scalar(long numerator, long denominator) {
    if (denominator == 0) {
        throw std::domain_error("Scalar: zero denominator");
    }
    value_ = mpq_class(numerator, 1) / mpq_class(denominator, 1);
    value_.canonicalize();
}

Scalar::Scalar(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

Scalar Scalar::parse(std::string_view text) {
    const auto fail = [&]() -> Scalar {
        throw ParseError("not an exact number: \"" + std::string(text) + "\"");
    };

    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())) != 0) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())) != 0) {
        s.remove_suffix(1);
    }
    if (s.empty()) {
        return fail();
    }

    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        mpz_class num;
        mpz_class den;
        const std::string_view den_text = s.substr(slash + 1);
        if (!parse_integer(s.substr(0, slash), num) || !all_digits(den_text)) {
            return fail();
        }
        den = mpz_class(std::string(den_text), 10);
        if (den == 0) {
            return fail();
        }
        return Scalar(mpq_class(num, den));
    }

    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }

    long exponent = 0;
    if (const auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        mpz_class exp_value;
        if (!parse_integer(s.substr(e + 1), exp_value) || !exp_value.fits_slong_p()) {
            return fail();
        }
        exponent = exp_value.get_si();
        if (exponent > 4096 || exponent < -4096) {
            return fail();
        }
        s = s.substr(0, e);
    }

    std::string_view int_part = s;
    std::string_view frac_part;
    if (const auto dot = s.find('.'); dot != std::string_view::npos) {
        int_part = s.substr(0, dot);
        frac_part = s.substr(dot + 1);
    }
    if (int_part.empty() && frac_part.empty()) {
        return fail();
    }
    if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part))) {
        return fail();
    }

    const std::string digits = std::string(int_part) + std::string(frac_part);
    mpz_class num(digits, 10);
    if (negative) {
        num = -num;
    }
    exponent -= static_cast<long>(frac_part.size());
    mpq_class value(num);
    if (exponent >= 0) {
        value *= mpq_class(pow10(static_cast<unsigned long>(exponent)));
    } else {
        value /= mpq_class(pow10(static_cast<unsigned long>(-exponent)));
    }
    return Scalar(std::move(value));
}

std::string Scalar::str() const {
    if (value_.get_den() == 1) {
        return value_.get_num().get_str();
    }
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

bool Scalar::is_integer() const { return value_.get_den() == 1; }

std::string Scalar::decimal(int precision) const {
    if (precision < 0) {
        precision = 0;
    }
    const mpz_class scale = pow10(static_cast<unsigned long>(precision));
    mpz_class num = abs(value_.get_num()) * scale;
    const mpz_class& den = value_.get_den();
    mpz_class quotient;
    mpz_class remainder;
    mpz_fdiv_qr(quotient.get_mpz_t(), remainder.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    const int half = cmp(mpz_class(2 * remainder), den);
    if (half > 0 || (half == 0 && mpz_odd_p(quotient.get_mpz_t()) != 0)) {
        quotient += 1;
    }

    std::string digits = quotient.get_str();
    if (precision > 0) {
        if (digits.size() <= static_cast<std::size_t>(precision)) {
            digits.insert(0, static_cast<std::size_t>(precision) + 1 - digits.size(), '0');
        }
        digits.insert(digits.size() - static_cast<std::size_t>(precision), ".");
    }
    if (sign() < 0 && quotient != 0) {
        digits.insert(0, "-");
    }
    return digits;
}

Scalar& Scalar::operator+=(const Scalar& rhs) {
    value_ += rhs.value_;
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& rhs) {
    value_ -= rhs.value_;
    return *this;
}

Scalar& Scalar::operator*=(const Scalar& rhs) {
    value_ *= rhs.value_;
    return *this;
}

Scalar& Scalar::operator/=(const Scalar& rhs) {
    if (rhs.sign() == 0) {
        throw std::domain_error("Scalar: division by zero");
    }
    value_ /= rhs.value_;
    return *this;
}

std::ostream& operator<<(std::ostream& os, const Scalar& x) { return os << x.str(); }

} // namespace msgame

std::size_t std::hash<msgame::Scalar>::operator()(const msgame::Scalar& x) const noexcept {
    return std::hash<std::string>{}(x.str());
}
