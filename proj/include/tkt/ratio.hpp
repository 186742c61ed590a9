#pragma once

#include <cstdint>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tkt {

/// Exact rational number kept in reduced form with a positive denominator.
/// Guard endpoints are rationals so that comparisons against integer clock
/// values are reproducible across platforms; endpoints that come out of
/// floating-point computations are rounded outward to denominator 10^6
/// before they are stored (see floor_to_micro / ceil_to_micro).
class Ratio {
public:
    static constexpr std::int64_t kMicro = 1'000'000;

    constexpr Ratio() : num_(0), den_(1) {}
    constexpr Ratio(std::int64_t value) : num_(value), den_(1) {}

    Ratio(std::int64_t num, std::int64_t den) {
        if (den == 0) throw std::invalid_argument("Ratio: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        num_ = g ? num / g : num;
        den_ = g ? den / g : den;
    }

    static Ratio from_u64(std::uint64_t v) {
        if (v > static_cast<std::uint64_t>(INT64_MAX))
            throw std::overflow_error("Ratio: value too large");
        return Ratio(static_cast<std::int64_t>(v));
    }

    /// Parses "12", "-3", "0.05", "21.85" (at most six fraction digits)
    /// or the exact form "p/q".
    static Ratio from_decimal(const std::string& text);

    /// Largest rational with denominator 10^6 that is <= x.
    static Ratio floor_to_micro(double x) {
        return Ratio(static_cast<std::int64_t>(std::floor(x * 1e6)), kMicro);
    }

    /// Smallest rational with denominator 10^6 that is >= x.
    static Ratio ceil_to_micro(double x) {
        return Ratio(static_cast<std::int64_t>(std::ceil(x * 1e6)), kMicro);
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool is_integer() const { return den_ == 1; }
    bool is_negative() const { return num_ < 0; }

    double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    /// Canonical text form: "p" when integral, else "p/q".
    std::string to_string() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Decimal rendering ("21.85") when the denominator divides 10^6,
    /// otherwise falls back to "p/q".
    std::string to_decimal() const;

    Ratio operator-() const { return Ratio(-num_, den_); }

    friend Ratio operator+(const Ratio& a, const Ratio& b) {
        return Ratio::from_i128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                                i128(a.den_) * b.den_);
    }
    friend Ratio operator-(const Ratio& a, const Ratio& b) { return a + (-b); }
    friend Ratio operator*(const Ratio& a, const Ratio& b) {
        return Ratio::from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }

    friend bool operator==(const Ratio& a, const Ratio& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Ratio& a, const Ratio& b) { return !(a == b); }
    friend bool operator<(const Ratio& a, const Ratio& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator<=(const Ratio& a, const Ratio& b) { return !(b < a); }
    friend bool operator>(const Ratio& a, const Ratio& b) { return b < a; }
    friend bool operator>=(const Ratio& a, const Ratio& b) { return !(a < b); }

    /// Comparison against an unsigned clock value.
    int compare_u64(std::uint64_t v) const {
        if (num_ < 0) return -1;
        const i128 lhs = i128(num_);
        const i128 rhs = i128(v) * den_;
        if (lhs < rhs) return -1;
        if (lhs > rhs) return 1;
        return 0;
    }

private:
    using i128 = __int128;

    static Ratio from_i128(i128 num, i128 den) {
        if (den < 0) { num = -num; den = -den; }
        const i128 g = gcd128(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        if (num > INT64_MAX || num < INT64_MIN || den > INT64_MAX)
            throw std::overflow_error("Ratio: arithmetic overflow");
        Ratio r;
        r.num_ = static_cast<std::int64_t>(num);
        r.den_ = static_cast<std::int64_t>(den);
        return r;
    }

    static i128 gcd128(i128 a, i128 b) {
        while (b != 0) { i128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Ratio Ratio::from_decimal(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("Ratio: empty literal");
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const std::int64_t p = std::stoll(text.substr(0, slash));
        const std::int64_t q = std::stoll(text.substr(slash + 1));
        return Ratio(p, q);
    }
    bool negative = false;
    std::size_t pos = 0;
    if (text[0] == '+' || text[0] == '-') { negative = text[0] == '-'; pos = 1; }
    const auto dot = text.find('.', pos);
    const std::string int_part = text.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    std::string frac_part = dot == std::string::npos ? "" : text.substr(dot + 1);
    if (int_part.empty() && frac_part.empty())
        throw std::invalid_argument("Ratio: malformed literal '" + text + "'");
    if (frac_part.size() > 6)
        throw std::invalid_argument("Ratio: more than six fraction digits in '" + text + "'");
    for (char c : int_part)
        if (c < '0' || c > '9') throw std::invalid_argument("Ratio: malformed literal '" + text + "'");
    for (char c : frac_part)
        if (c < '0' || c > '9') throw std::invalid_argument("Ratio: malformed literal '" + text + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    const std::int64_t whole = int_part.empty() ? 0 : std::stoll(int_part);
    const std::int64_t frac = frac_part.empty() ? 0 : std::stoll(frac_part);
    std::int64_t num = whole * scale + frac;
    if (negative) num = -num;
    return Ratio(num, scale);
}

inline std::string Ratio::to_decimal() const {
    if (den_ == 1) return std::to_string(num_);
    if (kMicro % den_ != 0) return to_string();
    std::int64_t micros = num_ * (kMicro / den_);
    std::string sign;
    if (micros < 0) { sign = "-"; micros = -micros; }
    std::string frac = std::to_string(micros % kMicro);
    frac.insert(frac.begin(), 6 - frac.size(), '0');
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    return sign + std::to_string(micros / kMicro) + "." + frac;
}

} // namespace tkt
