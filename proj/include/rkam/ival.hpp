#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <iosfwd>

namespace rkam {

class DivisionByZeroInterval : public std::domain_error {
public:
    DivisionByZeroInterval() : std::domain_error("interval division by an interval containing zero") {}
};

class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Tolerance for roundoff-negative arguments of sqrt and |x|>1 arguments of
// arccos that are silently clamped back into the domain.
inline constexpr double kClampTol = 1e-14;

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this magnitude products may underflow and the error-free
// transformations stop being exact.
inline constexpr double kTiny = 0x1p-960;

// nextafter toward +inf / -inf on the bit pattern; libm's version is a call.
inline double up(double x) {
    if (!(x < kInf)) return x;  // +inf and NaN
    if (x == 0.0) return std::numeric_limits<double>::denorm_min();
    auto b = std::bit_cast<std::uint64_t>(x);
    b = x > 0.0 ? b + 1 : b - 1;
    return std::bit_cast<double>(b);
}
inline double down(double x) { return -up(-x); }

struct Bracket {
    double lo, hi;
};

// Directed results of a+b from the exact TwoSum error term.
inline Bracket add_rd(double a, double b) {
    double s = a + b;
    if (!std::isfinite(s)) {
        if (std::isnan(s)) return {s, s};
        return s > 0 ? Bracket{std::numeric_limits<double>::max(), s}
                     : Bracket{s, -std::numeric_limits<double>::max()};
    }
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    if (err > 0) return {s, up(s)};
    if (err < 0) return {down(s), s};
    return {s, s};
}

inline Bracket mul_rd(double a, double b) {
    if (a == 0.0 || b == 0.0) return {0.0, 0.0};
    double p = a * b;
    if (!std::isfinite(p)) {
        if (std::isnan(p)) return {p, p};
        return p > 0 ? Bracket{std::numeric_limits<double>::max(), p}
                     : Bracket{p, -std::numeric_limits<double>::max()};
    }
    if (std::fabs(p) < kTiny) return {down(p), up(p)};
    double err = std::fma(a, b, -p);
    if (err > 0) return {p, up(p)};
    if (err < 0) return {down(p), p};
    return {p, p};
}

inline Bracket div_rd(double a, double b) {
    if (a == 0.0) return {0.0, 0.0};
    double q = a / b;
    if (!std::isfinite(q)) {
        if (std::isnan(q)) return {q, q};
        return q > 0 ? Bracket{std::numeric_limits<double>::max(), q}
                     : Bracket{q, -std::numeric_limits<double>::max()};
    }
    if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return {down(q), up(q)};
    double r = std::fma(-q, b, a);
    // exact quotient is q + r/b
    bool above = (r > 0) == (b > 0);
    if (r == 0) return {q, q};
    return above ? Bracket{q, up(q)} : Bracket{down(q), q};
}

inline Bracket sqrt_rd(double a) {
    double s = std::sqrt(a);
    if (a == 0.0 || !std::isfinite(s)) return {s, s};
    if (a < kTiny) return {down(s), up(s)};
    double r = std::fma(-s, s, a);
    if (r > 0) return {s, up(s)};
    if (r < 0) return {down(s), s};
    return {s, s};
}

}  // namespace detail

class Interval {
public:
    double lo = 0.0;
    double hi = 0.0;

    constexpr Interval() = default;
    constexpr Interval(double x) : lo(x), hi(x) {}  // NOLINT: implicit point
    Interval(double l, double h) : lo(l), hi(h) {
        if (!(l <= h)) throw std::invalid_argument("Interval: lo > hi or NaN bound");
    }

    static Interval hull(double a, double b) { return a <= b ? Interval(a, b) : Interval(b, a); }
    // Smallest interval around a decimal literal that is not exactly
    // representable: one ulp on each side.
    static Interval around(double x) { return Interval(detail::down(x), detail::up(x)); }
    static Interval pm(double c, double r);

    double mid() const {
        if (lo == -hi) return 0.0;
        double m = 0.5 * lo + 0.5 * hi;
        return std::isfinite(m) ? m : (lo + hi) / 2;
    }
    // Upper bound on max(mid-lo, hi-mid).
    double rad() const {
        double m = mid();
        return std::fmax(detail::add_rd(m, -lo).hi, detail::add_rd(hi, -m).hi);
    }
    double width() const { return detail::add_rd(hi, -lo).hi; }
    double mag() const { return std::fmax(std::fabs(lo), std::fabs(hi)); }
    double mig() const {
        if (lo <= 0.0 && hi >= 0.0) return 0.0;
        return std::fmin(std::fabs(lo), std::fabs(hi));
    }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool contains_zero() const { return lo <= 0.0 && hi >= 0.0; }
    bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
    bool is_zero() const { return lo == 0.0 && hi == 0.0; }
    bool is_point() const { return lo == hi; }
    bool is_finite() const { return std::isfinite(lo) && std::isfinite(hi); }

    Interval& operator+=(const Interval& o);
    Interval& operator-=(const Interval& o);
    Interval& operator*=(const Interval& o);
    Interval& operator/=(const Interval& o);
};

inline bool identical(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }

inline Interval operator-(const Interval& a) { return Interval(-a.hi, -a.lo); }

inline Interval operator+(const Interval& a, const Interval& b) {
    return Interval(detail::add_rd(a.lo, b.lo).lo, detail::add_rd(a.hi, b.hi).hi);
}

inline Interval operator-(const Interval& a, const Interval& b) {
    return Interval(detail::add_rd(a.lo, -b.hi).lo, detail::add_rd(a.hi, -b.lo).hi);
}

inline Interval operator*(const Interval& a, const Interval& b) {
    using detail::mul_rd;
    if (a.lo >= 0.0 && b.lo >= 0.0) return Interval(mul_rd(a.lo, b.lo).lo, mul_rd(a.hi, b.hi).hi);
    if (b.is_point()) {
        if (a.is_point()) {
            auto p = mul_rd(a.lo, b.lo);
            return Interval(p.lo, p.hi);
        }
        return b.lo >= 0.0 ? Interval(mul_rd(a.lo, b.lo).lo, mul_rd(a.hi, b.lo).hi)
                           : Interval(mul_rd(a.hi, b.lo).lo, mul_rd(a.lo, b.lo).hi);
    }
    auto p1 = mul_rd(a.lo, b.lo);
    auto p2 = mul_rd(a.lo, b.hi);
    auto p3 = mul_rd(a.hi, b.lo);
    auto p4 = mul_rd(a.hi, b.hi);
    double l = std::fmin(std::fmin(p1.lo, p2.lo), std::fmin(p3.lo, p4.lo));
    double h = std::fmax(std::fmax(p1.hi, p2.hi), std::fmax(p3.hi, p4.hi));
    return Interval(l, h);
}

inline Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw DivisionByZeroInterval();
    using detail::div_rd;
    auto p1 = div_rd(a.lo, b.lo);
    auto p2 = div_rd(a.lo, b.hi);
    auto p3 = div_rd(a.hi, b.lo);
    auto p4 = div_rd(a.hi, b.hi);
    double l = std::fmin(std::fmin(p1.lo, p2.lo), std::fmin(p3.lo, p4.lo));
    double h = std::fmax(std::fmax(p1.hi, p2.hi), std::fmax(p3.hi, p4.hi));
    return Interval(l, h);
}

inline Interval& Interval::operator+=(const Interval& o) { return *this = *this + o; }
inline Interval& Interval::operator-=(const Interval& o) { return *this = *this - o; }
inline Interval& Interval::operator*=(const Interval& o) { return *this = *this * o; }
inline Interval& Interval::operator/=(const Interval& o) { return *this = *this / o; }

inline Interval Interval::pm(double c, double r) {
    if (r < 0) throw std::invalid_argument("Interval::pm: negative radius");
    return Interval(c) + Interval(-r, r);
}

inline Interval hull(const Interval& a, const Interval& b) {
    return Interval(std::fmin(a.lo, b.lo), std::fmax(a.hi, b.hi));
}

// Intersection; throws DomainError when empty.
Interval intersect(const Interval& a, const Interval& b);

inline Interval iv_abs(const Interval& a) { return Interval(a.mig(), a.mag()); }

// [mig, mag] of the coefficient, used by norms.
inline Interval iv_magnitude(const Interval& a) { return iv_abs(a); }

inline Interval iv_sqr(const Interval& a) {
    using detail::mul_rd;
    if (a.lo >= 0.0) return Interval(mul_rd(a.lo, a.lo).lo, mul_rd(a.hi, a.hi).hi);
    if (a.hi <= 0.0) return Interval(mul_rd(a.hi, a.hi).lo, mul_rd(a.lo, a.lo).hi);
    double m = a.mag();
    return Interval(0.0, mul_rd(m, m).hi);
}

Interval iv_pow(const Interval& a, int n);
Interval iv_sqrt(const Interval& a, bool clamp = true);
Interval iv_sin(const Interval& a);
Interval iv_cos(const Interval& a);
Interval iv_acos(const Interval& a);

// Enclosure of pi.
Interval iv_pi();

enum class ArithOp { add, sub, mul, div };
enum class ElemFn { sqrt, sin, cos, arccos, square };

Interval iv_arith(ArithOp op, const Interval& a, const Interval& b);
Interval iv_elem(ElemFn fn, const Interval& a);

std::ostream& operator<<(std::ostream& os, const Interval& a);

}  // namespace rkam
