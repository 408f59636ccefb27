#include "rkam/ival.hpp"

#include <cstdio>
#include <ostream>

namespace rkam {

namespace {

using detail::down;
using detail::up;

// libm sin/cos/acos are within one ulp on glibc; two steps are kept as margin.
double down2(double x) { return down(down(x)); }
double up2(double x) { return up(up(x)); }

constexpr double kPiLo = 0x1.921fb54442d18p+1;  // below pi
constexpr double kPiHi = 0x1.921fb54442d19p+1;  // above pi

// True when some x in [a,b] satisfies x = (offset + m) * pi for an integer m
// of the requested parity (even: m%2==0). Tests are deliberately loose so
// an extremum is never missed; extra inclusion only costs tightness.
bool hits(double a, double b, double offset, bool even) {
    double t0 = std::fmin(a / kPiLo, a / kPiHi) - offset;
    double t1 = std::fmax(b / kPiLo, b / kPiHi) - offset;
    double slack = 1e-12 * (1.0 + std::fmax(std::fabs(t0), std::fabs(t1)));
    double m0 = std::ceil(t0 - slack);
    double m1 = std::floor(t1 + slack);
    for (double m = m0; m <= m1; m += 1.0) {
        bool is_even = std::fmod(std::fabs(m), 2.0) == 0.0;
        if (is_even == even) return true;
    }
    return false;
}

Interval clamp_unit(double l, double h) {
    return Interval(std::fmax(l, -1.0), std::fmin(h, 1.0));
}

}  // namespace

Interval intersect(const Interval& a, const Interval& b) {
    double l = std::fmax(a.lo, b.lo);
    double h = std::fmin(a.hi, b.hi);
    if (l > h) throw DomainError("empty interval intersection");
    return Interval(l, h);
}

Interval iv_pi() { return Interval(kPiLo, kPiHi); }

Interval iv_pow(const Interval& a, int n) {
    if (n < 0) return Interval(1.0) / iv_pow(a, -n);
    if (n == 0) return Interval(1.0);
    if (n == 1) return a;
    Interval h = iv_pow(a, n / 2);
    Interval sq = iv_sqr(h);
    return (n % 2) ? sq * a : sq;
}

Interval iv_sqrt(const Interval& a, bool clamp) {
    double l = a.lo;
    if (l < 0.0) {
        if (clamp && l >= -kClampTol) {
            l = 0.0;
        } else {
            throw DomainError("sqrt of an interval with negative lower bound");
        }
    }
    if (a.hi < 0.0) throw DomainError("sqrt of a negative interval");
    return Interval(detail::sqrt_rd(l).lo, detail::sqrt_rd(a.hi).hi);
}

Interval iv_cos(const Interval& a) {
    if (!a.is_finite()) throw DomainError("cos of an unbounded interval");
    if (a.hi - a.lo >= 6.3 || std::fmax(std::fabs(a.lo), std::fabs(a.hi)) > 1e8) return Interval(-1.0, 1.0);
    double c0 = std::cos(a.lo), c1 = std::cos(a.hi);
    double l = down2(std::fmin(c0, c1));
    double h = up2(std::fmax(c0, c1));
    if (hits(a.lo, a.hi, 0.0, true)) h = 1.0;   // x = 2k pi
    if (hits(a.lo, a.hi, 0.0, false)) l = -1.0; // x = (2k+1) pi
    if (a.is_point() && a.lo == 0.0) return Interval(1.0);
    return clamp_unit(l, h);
}

Interval iv_sin(const Interval& a) {
    if (!a.is_finite()) throw DomainError("sin of an unbounded interval");
    if (a.hi - a.lo >= 6.3 || std::fmax(std::fabs(a.lo), std::fabs(a.hi)) > 1e8) return Interval(-1.0, 1.0);
    if (a.is_point() && a.lo == 0.0) return Interval(0.0);
    double s0 = std::sin(a.lo), s1 = std::sin(a.hi);
    double l = down2(std::fmin(s0, s1));
    double h = up2(std::fmax(s0, s1));
    if (hits(a.lo, a.hi, 0.5, true)) h = 1.0;   // x = pi/2 + 2k pi
    if (hits(a.lo, a.hi, 0.5, false)) l = -1.0; // x = 3pi/2 + 2k pi
    return clamp_unit(l, h);
}

Interval iv_acos(const Interval& a) {
    if (a.hi < -1.0 - kClampTol || a.lo > 1.0 + kClampTol)
        throw DomainError("arccos argument outside [-1,1]");
    double l = std::fmax(a.lo, -1.0);
    double h = std::fmin(a.hi, 1.0);
    if (l > h) {  // only within the clamp band
        if (a.lo > 1.0) l = h = 1.0;
        else l = h = -1.0;
    }
    double rlo = (h == 1.0) ? 0.0 : std::fmax(0.0, down2(std::acos(h)));
    double rhi = (l == -1.0) ? kPiHi : std::fmin(kPiHi, up2(std::acos(l)));
    if (l == 1.0) rhi = 0.0;
    return Interval(rlo, rhi);
}

Interval iv_arith(ArithOp op, const Interval& a, const Interval& b) {
    switch (op) {
        case ArithOp::add: return a + b;
        case ArithOp::sub: return a - b;
        case ArithOp::mul: return a * b;
        case ArithOp::div: return a / b;
    }
    throw std::invalid_argument("iv_arith: unknown op");
}

Interval iv_elem(ElemFn fn, const Interval& a) {
    switch (fn) {
        case ElemFn::sqrt: return iv_sqrt(a);
        case ElemFn::sin: return iv_sin(a);
        case ElemFn::cos: return iv_cos(a);
        case ElemFn::arccos: return iv_acos(a);
        case ElemFn::square: return iv_sqr(a);
    }
    throw std::invalid_argument("iv_elem: unknown function");
}

std::ostream& operator<<(std::ostream& os, const Interval& a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", a.lo, a.hi);
    return os << buf;
}

}  // namespace rkam
