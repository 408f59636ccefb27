#include "rkam/prenorm.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace rkam {

namespace {

using E6 = std::array<int, 6>;

Interval binom_iv(int n, int k) {
    double b = 1.0;
    for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
    return Interval(b);  // exact for the small n used here
}

std::string show(const Interval& a) {
    std::ostringstream os;
    os << a;
    return os.str();
}

// Coefficients of (c X1 + d X2)^n as a list over i: C(n,i) c^i d^(n-i) X1^i X2^(n-i).
std::vector<Interval> binomial_row(const Interval& c, const Interval& d, int n) {
    std::vector<Interval> row(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) row[i] = binom_iv(n, i) * iv_pow(c, i) * iv_pow(d, n - i);
    return row;
}

// cos^a sin^b as sum_k C_k cos(k phi) + S_k sin(k phi), exact dyadic values.
struct Trig1 {
    std::vector<double> C, S;
};

using TrigCache = std::map<std::pair<int, int>, Trig1>;

Trig1 trig_power(int a, int b, TrigCache& memo) {
    auto key = std::make_pair(a, b);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    Trig1 t;
    int n = a + b;
    t.C.assign(static_cast<std::size_t>(n) + 2, 0.0);
    t.S.assign(static_cast<std::size_t>(n) + 2, 0.0);
    t.C[0] = 1.0;
    int deg = 0;
    auto step = [&](bool by_sin) {
        std::vector<double> C(t.C.size(), 0.0), S(t.S.size(), 0.0);
        for (int k = 0; k <= deg; ++k) {
            double c = t.C[k], s = t.S[k];
            if (c == 0.0 && s == 0.0) continue;
            int km = std::abs(k - 1);
            double sg = (k - 1 < 0) ? -1.0 : 1.0;  // sin((k-1) phi) sign flip for k = 0
            if (!by_sin) {
                // cos k cos = (cos(k+1) + cos(k-1))/2 ; sin k cos = (sin(k+1) + sin(k-1))/2
                C[k + 1] += 0.5 * c;
                C[km] += 0.5 * c;
                S[k + 1] += 0.5 * s;
                S[km] += 0.5 * s * sg;
            } else {
                // cos k sin = (sin(k+1) - sin(k-1))/2 ; sin k sin = (cos(k-1) - cos(k+1))/2
                S[k + 1] += 0.5 * c;
                S[km] -= 0.5 * c * sg;
                C[km] += 0.5 * s;
                C[k + 1] -= 0.5 * s;
            }
        }
        S[0] = 0.0;
        t.C.swap(C);
        t.S.swap(S);
        ++deg;
    };
    for (int i = 0; i < a; ++i) step(false);
    for (int i = 0; i < b; ++i) step(true);
    memo.emplace(key, t);
    return t;
}

}  // namespace

Diagonalization diagonalize_quadratic(const PoissonSeries& hsec) {
    if (hsec.layout().kind != LayoutKind::cartesian) throw LayoutMismatch();
    auto co = [&](int i, int j) {
        E6 e{};
        e[i] += 1;
        e[j] += 1;
        return hsec.coeff(KeyCodec::pack(0, e, {0, 0}, Parity::cos));
    };
    if (!co(0, 1).contains_zero() || !co(0, 3).contains_zero() || !co(1, 2).contains_zero() ||
        !co(2, 3).contains_zero())
        throw DegenerateQuadraticPart("quadratic part couples xi and eta");
    // H2 = 1/2 xi^T A xi + 1/2 eta^T B eta
    const double A[3] = {2.0 * co(0, 0).mid(), co(0, 2).mid(), 2.0 * co(2, 2).mid()};
    const double B[3] = {2.0 * co(1, 1).mid(), co(1, 3).mid(), 2.0 * co(3, 3).mid()};
    const double sg = A[0] < 0.0 ? -1.0 : 1.0;
    const double a11 = sg * A[0], a12 = sg * A[1], a22 = sg * A[2];
    const double b11 = sg * B[0], b12 = sg * B[1], b22 = sg * B[2];
    if (!(a11 > 0.0) || !(a11 * a22 - a12 * a12 > 0.0) || !(b11 > 0.0) || !(b11 * b22 - b12 * b12 > 0.0))
        throw MixedSignFrequencies("secular quadratic blocks are not definite with a common sign");

    // A = L L^T; C = L^T B L = Q diag(c) Q^T; M = L^-T Q diag(c^1/4).
    const double l11 = std::sqrt(a11), l21 = a12 / l11, l22 = std::sqrt(a22 - l21 * l21);
    const double c11 = l11 * (b11 * l11 + b12 * l21) + l21 * (b12 * l11 + b22 * l21);
    const double c12 = (l11 * b12 + l21 * b22) * l22;
    const double c22 = l22 * b22 * l22;
    Diagonalization d;
    // |theta| <= pi/4 keeps mode j attached to planet j when the coupling is weak.
    const double den = c11 - c22;
    d.theta = den != 0.0 ? 0.5 * std::atan(2.0 * c12 / den) : (c12 == 0.0 ? 0.0 : std::copysign(M_PI / 4, c12));
    const double ct = std::cos(d.theta), st = std::sin(d.theta);
    const double e1 = ct * ct * c11 + 2.0 * ct * st * c12 + st * st * c22;
    const double e2 = st * st * c11 - 2.0 * ct * st * c12 + ct * ct * c22;
    if (!(e1 > 0.0) || !(e2 > 0.0)) throw DegenerateQuadraticPart("secular quadratic part is degenerate");
    const double s1 = std::pow(e1, 0.25), s2 = std::pow(e2, 0.25);
    // L^-T = [[1/l11, -l21/(l11 l22)], [0, 1/l22]]
    const double i11 = 1.0 / l11, i12 = -l21 / (l11 * l22), i22 = 1.0 / l22;
    const double q11 = i11 * ct + i12 * st, q12 = -i11 * st + i12 * ct, q21 = i22 * st, q22 = i22 * ct;
    d.M = {q11 * s1, q12 * s2, q21 * s1, q22 * s2};
    const Interval det = Interval(d.M[0]) * Interval(d.M[3]) - Interval(d.M[1]) * Interval(d.M[2]);
    d.N = {Interval(d.M[3]) / det, -Interval(d.M[2]) / det, -Interval(d.M[1]) / det, Interval(d.M[0]) / det};

    // xi1 = M11 x1 + M12 x2, xi2 = M21 x1 + M22 x2; eta likewise with N.
    const Interval m11(d.M[0]), m12(d.M[1]), m21(d.M[2]), m22(d.M[3]);
    PoissonSeries::Builder out(VariableLayout::cartesian(true), hsec.caps());
    for (const auto& [key, coef] : hsec.entries()) {
        auto e = KeyCodec::exps(key);
        int d2 = KeyCodec::d2(key);
        auto r0 = binomial_row(m11, m12, e[0]);
        auto r1 = binomial_row(d.N[0], d.N[1], e[1]);
        auto r2 = binomial_row(m21, m22, e[2]);
        auto r3 = binomial_row(d.N[2], d.N[3], e[3]);
        for (int i = 0; i <= e[0]; ++i)
            for (int k = 0; k <= e[2]; ++k) {
                Interval cx = coef * r0[i] * r2[k];
                for (int j = 0; j <= e[1]; ++j)
                    for (int l = 0; l <= e[3]; ++l) {
                        E6 ne{i + k, j + l, e[0] - i + e[2] - k, e[1] - j + e[3] - l, 0, 0};
                        out.add(KeyCodec::pack(d2, ne, {0, 0}, Parity::cos), cx * r1[j] * r3[l]);
                    }
            }
    }
    PoissonSeries h = out.finish();

    auto hc = [&](int i, int j) {
        E6 e{};
        e[i] += 1;
        e[j] += 1;
        return h.coeff(KeyCodec::pack(0, e, {0, 0}, Parity::cos));
    };
    // Residual inflation: the dropped off-diagonal and x/y mismatch widen nu.
    d.offdiag_residual = hull(hc(0, 2), hc(1, 3));
    for (int j = 0; j < 2; ++j) {
        Interval ax = Interval(2.0) * hc(2 * j, 2 * j), by = Interval(2.0) * hc(2 * j + 1, 2 * j + 1);
        double infl = d.offdiag_residual.mag();
        d.nu[j] = hull(ax, by) + Interval(-infl, infl);
        d.offdiag_residual = hull(d.offdiag_residual, (ax - by) / Interval(2.0));
    }
    for (int j = 0; j < 2; ++j)
        if (d.offdiag_residual.mag() > 1e-8 * d.nu[j].mig())
            throw DegenerateQuadraticPart("diagonalization residual " + show(d.offdiag_residual) +
                                          " is not small against the frequencies");
    if (d.nu[0].contains_zero() || d.nu[1].contains_zero())
        throw DegenerateQuadraticPart("secular frequency enclosure contains zero: " + show(d.nu[0]) + ", " +
                                      show(d.nu[1]));
    if ((d.nu[0].lo > 0) != (d.nu[1].lo > 0))
        throw MixedSignFrequencies("secular frequencies " + show(d.nu[0]) + " and " + show(d.nu[1]) +
                                   " have opposite signs");

    // Exact diagonal quadratic part.
    d.h = ps_filter(h, [](PsKey k) {
        auto e = KeyCodec::exps(k);
        return !(KeyCodec::d2(k) == 0 && e[0] + e[1] + e[2] + e[3] == 2);
    });
    std::vector<PsTerm> q;
    for (int j = 0; j < 2; ++j)
        for (int v = 0; v < 2; ++v) {
            PsTerm t;
            t.poly_exp[2 * j + v] = 2;
            t.coeff = d.nu[j] / Interval(2.0);
            q.push_back(t);
        }
    d.h = d.h + PoissonSeries::from_terms(d.h.layout(), q, d.h.caps());
    return d;
}

PoissonSeries to_action_angle(const PoissonSeries& hxy, int s_max) {
    if (hxy.layout().kind != LayoutKind::cartesian) throw LayoutMismatch();
    TruncationCaps caps{-1, -1, -1, s_max};
    PoissonSeries::Builder out(VariableLayout::action_angle(), caps);
    TrigCache cache;
    for (const auto& [key, coef] : hxy.entries()) {
        auto e = KeyCodec::exps(key);
        int d2 = KeyCodec::d2(key);
        int deg = e[0] + e[1] + e[2] + e[3];
        if (deg % 2) throw std::logic_error("to_action_angle: odd total degree");
        E6 ue{e[0] + e[1], e[2] + e[3], 0, 0, 0, 0};
        PsKey probe = KeyCodec::pack(d2, ue, {0, 0}, Parity::cos);
        if (!out.proto().within_caps(probe)) continue;
        Interval scale = coef * Interval(std::ldexp(1.0, deg / 2));
        Trig1 t1 = trig_power(e[0], e[1], cache), t2 = trig_power(e[2], e[3], cache);
        for (std::size_t k1 = 0; k1 < t1.C.size(); ++k1)
            for (int p1 = 0; p1 < 2; ++p1) {
                double a = p1 ? t1.S[k1] : t1.C[k1];
                if (a == 0.0) continue;
                for (std::size_t k2 = 0; k2 < t2.C.size(); ++k2)
                    for (int p2 = 0; p2 < 2; ++p2) {
                        double b = p2 ? t2.S[k2] : t2.C[k2];
                        if (b == 0.0) continue;
                        // trig1(k1 phi1) trig2(k2 phi2) as sums at (k1, +-k2)
                        Interval c = scale * Interval(0.5 * a * b);
                        int K1 = static_cast<int>(k1), K2 = static_cast<int>(k2);
                        Parity par;
                        int sm, sp;
                        if (!p1 && !p2) par = Parity::cos, sm = 1, sp = 1;        // cc
                        else if (p1 && p2) par = Parity::cos, sm = 1, sp = -1;    // ss
                        else if (p1 && !p2) par = Parity::sin, sm = 1, sp = 1;    // sc
                        else par = Parity::sin, sm = -1, sp = 1;                  // cs
                        out.add_raw(d2, ue, {K1, -K2}, par, c * Interval(sm));
                        out.add_raw(d2, ue, {K1, K2}, par, c * Interval(sp));
                    }
            }
    }
    return out.finish();
}

PoissonSeries solve_birkhoff_homological(const PoissonSeries& f, const std::array<Interval, 2>& nu) {
    PoissonSeries::Builder out(f.layout(), f.caps());
    for (const auto& [key, c] : f.entries()) {
        auto k = KeyCodec::harms(key);
        if (k[0] == 0 && k[1] == 0) continue;
        Interval div = Interval(k[0]) * nu[0] + Interval(k[1]) * nu[1];
        if (div.contains_zero())
            throw DegenerateQuadraticPart("secular divisor k.nu contains zero for k=(" + std::to_string(k[0]) + "," +
                                          std::to_string(k[1]) + ")");
        Interval v = c / div;
        auto e = KeyCodec::exps(key);
        if (KeyCodec::parity(key) == Parity::cos) out.add(KeyCodec::pack(KeyCodec::d2(key), e, k, Parity::sin), v);
        else out.add(KeyCodec::pack(KeyCodec::d2(key), e, k, Parity::cos), -v);
    }
    return out.finish();
}

BirkhoffResult birkhoff_normalize(const PoissonSeries& haa, const std::array<Interval, 2>& nu, int s_max,
                                  int last_order) {
    if (haa.layout().kind != LayoutKind::action_angle) throw LayoutMismatch();
    BirkhoffResult r;
    r.h = haa;
    for (int s = 2; s <= std::min(last_order, s_max); ++s) {
        BirkhoffStage st;
        st.order = s;
        for (int m = 1; m <= s; ++m) {
            int d2 = s - m, udeg = 2 * m;
            auto family = [&](PsKey k) {
                auto e = KeyCodec::exps(k);
                return KeyCodec::d2(k) == d2 && e[0] + e[1] == udeg;
            };
            auto angular = [&](PsKey k) {
                auto h = KeyCodec::harms(k);
                return family(k) && (h[0] != 0 || h[1] != 0);
            };
            PoissonSeries f = ps_filter(r.h, angular);
            if (f.empty()) continue;
            PoissonSeries b = solve_birkhoff_homological(f, nu);
            // Each bracket raises the order by s-1 >= 1.
            r.h = ps_lie_transform(r.h, b, s_max, BracketBlock::full);
            PoissonSeries res = ps_filter(r.h, angular);
            st.max_residual = std::max(st.max_residual, ps_max_mag(res));
            if (!ps_all_contain_zero(res)) st.residuals_contain_zero = false;
            r.h = ps_filter(r.h, [&](PsKey k) { return !angular(k); });
            st.gens.push_back(std::move(b));
        }
        r.stages.push_back(std::move(st));
    }
    return r;
}

std::array<Interval, 2> compute_initial_actions(const Diagonalization& d, const OrbitalConfig& cfg,
                                                const SystemFrame& frame) {
    Interval rho[2];
    const Interval* e[2] = {&cfg.e1, &cfg.e2};
    for (int j = 0; j < 2; ++j) {
        Interval e2 = iv_sqr(*e[j]);
        rho[j] = frame.Lambda[j] * e2 / (Interval(1.0) + iv_sqrt(Interval(1.0) - e2));
    }
    // x = N^T xi, y = M^T eta; <xi_i xi_l> = <eta_i eta_l> = sqrt(rho_i rho_l) cos(w_i - w_l)
    const Interval dw = cfg.w1 - cfg.w2;
    Interval g[2][2];
    g[0][0] = rho[0];
    g[1][1] = rho[1];
    g[0][1] = g[1][0] = iv_sqrt(rho[0] * rho[1]) * iv_cos(dw);
    std::array<Interval, 2> I;
    for (int j = 0; j < 2; ++j) {
        Interval acc(0.0);
        for (int i = 0; i < 2; ++i)
            for (int l = 0; l < 2; ++l) {
                Interval w = d.N[2 * i + j] * d.N[2 * l + j] + Interval(d.M[2 * i + j]) * Interval(d.M[2 * l + j]);
                acc += w * g[i][l];
            }
        I[j] = acc / Interval(2.0);
    }
    for (auto& v : I)
        if (v.lo < 0.0) v = Interval(0.0, std::fmax(v.hi, 0.0));
    return I;
}

PoissonSeries translate_and_fix_d2(const PoissonSeries& h3, const std::array<Interval, 2>& istar, const Interval& d2,
                                   int action_cap) {
    if (h3.layout().kind != LayoutKind::action_angle) throw LayoutMismatch();
    // expansion[j][a] = coefficients of u_j^a = (p + I*)^(a/2) in powers of p
    std::map<std::pair<int, int>, std::vector<Interval>> memo;
    std::array<Interval, 2> root;
    for (int j = 0; j < 2; ++j) root[j] = istar[j].lo > 0.0 ? iv_sqrt(istar[j]) : Interval(0.0);
    auto expansion = [&](int j, int a) -> const std::vector<Interval>& {
        auto key = std::make_pair(j, a);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        std::vector<Interval> c;
        if (a % 2 == 0) {
            int m = a / 2;
            for (int n = 0; n <= std::min(m, action_cap); ++n) c.push_back(binom_iv(m, n) * iv_pow(istar[j], m - n));
        } else {
            if (!(istar[j].lo > 0.0))
                throw NegativeActionCenter("action center I*_" + std::to_string(j + 1) + " = " + show(istar[j]) +
                                           " is not positive but odd powers of u survive");
            Interval b(1.0);
            for (int n = 0; n <= action_cap; ++n) {
                c.push_back(b * iv_pow(root[j], a - 2 * n));
                b = b * Interval(0.5 * a - n) / Interval(n + 1.0);
            }
        }
        return memo.emplace(key, std::move(c)).first->second;
    };
    std::vector<Interval> d2pow{Interval(1.0)};
    TruncationCaps caps{-1, -1, action_cap, -1};
    PoissonSeries::Builder out(VariableLayout::translated(), caps);
    for (const auto& [key, coef] : h3.entries()) {
        auto e = KeyCodec::exps(key);
        int dd = KeyCodec::d2(key);
        while (static_cast<int>(d2pow.size()) <= dd) d2pow.push_back(d2pow.back() * d2);
        Interval c0 = coef * d2pow[dd];
        const auto& x1 = expansion(0, e[0]);
        const auto& x2 = expansion(1, e[1]);
        auto k = KeyCodec::harms(key);
        Parity par = KeyCodec::parity(key);
        for (std::size_t n1 = 0; n1 < x1.size(); ++n1)
            for (std::size_t n2 = 0; n1 + n2 < static_cast<std::size_t>(action_cap) + 1 && n2 < x2.size(); ++n2) {
                E6 pe{static_cast<int>(n1), static_cast<int>(n2), 0, 0, 0, 0};
                out.add(KeyCodec::pack(0, pe, k, par), c0 * x1[n1] * x2[n2]);
            }
    }
    return out.finish();
}

std::array<Interval, 2> frequency_vector(const PoissonSeries& htr) {
    std::array<Interval, 2> w;
    for (int j = 0; j < 2; ++j) {
        E6 e{};
        e[j] = 1;
        w[j] = htr.coeff(KeyCodec::pack(0, e, {0, 0}, Parity::cos));
    }
    return w;
}

Prenormalized prenormalize(const PoissonSeries& hsec, const OrbitalConfig& cfg, const SystemFrame& frame,
                           int s_max) {
    Prenormalized p;
    p.s_max = s_max;
    p.diag = diagonalize_quadratic(hsec);
    PoissonSeries haa = to_action_angle(p.diag.h, s_max);
    // nu (x^2 + y^2)/2 with an interval nu leaves cos 2 phi terms whose
    // coefficients only enclose zero; the exact map has none.
    auto order_one_angular = [](PsKey k) {
        auto h = KeyCodec::harms(k);
        return KeyCodec::d2(k) == 0 && KeyCodec::exp(k, 0) + KeyCodec::exp(k, 1) == 2 && (h[0] != 0 || h[1] != 0);
    };
    if (!ps_all_contain_zero(ps_filter(haa, order_one_angular)))
        throw DegenerateQuadraticPart("quadratic part is not diagonal after the linear map");
    haa = ps_filter(haa, [&](PsKey k) { return !order_one_angular(k); });
    p.birkhoff = birkhoff_normalize(haa, p.diag.nu, s_max, 3);
    p.istar = compute_initial_actions(p.diag, cfg, frame);
    return p;
}

}  // namespace rkam
