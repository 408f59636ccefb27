#include "rkam/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace rkam::oracle {

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;
using cd = std::complex<double>;
constexpr double kTwoPi = 6.283185307179586476925286766559;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// Random interval generator with mixed scales and widths.
struct IvGen {
    std::mt19937_64 rng;
    explicit IvGen(std::uint64_t seed) : rng(seed) {}
    double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    double scale() {
        static const double s[] = {1e-8, 1e-3, 1.0, 1.0, 1.0, 10.0, 1e3, 1e6};
        return s[std::uniform_int_distribution<int>(0, 7)(rng)];
    }
    Interval any() {
        double s = scale();
        double c = uni(-s, s);
        double w = uni(0.0, s) * (uni(0, 1) < 0.2 ? 0.0 : (uni(0, 1) < 0.5 ? 1e-6 : 1.0));
        return Interval(c, c + w);
    }
    Interval positive() {
        double s = scale();
        double c = uni(0.0, s);
        return Interval(c, c + uni(0.0, s) * (uni(0, 1) < 0.3 ? 1e-9 : 1.0));
    }
    Interval nonzero() {
        Interval a = positive();
        if (a.lo == 0.0) a = Interval(1e-300, a.hi + 1e-300);
        return uni(0, 1) < 0.5 ? a : -a;
    }
    Interval unit() {
        double x = uni(-1.0, 1.0), y = uni(-1.0, 1.0);
        if (uni(0, 1) < 0.1) y = x;
        return Interval(std::min(x, y), std::max(x, y));
    }
    Interval angle() {
        double c = uni(-20.0, 20.0);
        double w = uni(0.0, 1.0) < 0.5 ? uni(0.0, 1e-4) : uni(0.0, 7.0);
        return Interval(c, c + w);
    }
    double sample(const Interval& a) {
        double u = uni(0.0, 1.0);
        if (u < 0.1) return a.lo;
        if (u < 0.2) return a.hi;
        double x = a.lo + (a.hi - a.lo) * uni(0.0, 1.0);
        return std::clamp(x, a.lo, a.hi);
    }
};

bool inside(const Interval& r, const Big& v) { return Big(r.lo) <= v && v <= Big(r.hi); }

}  // namespace

Check interval_containment(std::uint64_t seed, int samples_per_op) {
    auto t0 = std::chrono::steady_clock::now();
    IvGen g(seed);
    long failures = 0, total = 0;
    std::string first;
    auto record = [&](bool ok, const std::string& what) {
        ++total;
        if (!ok) {
            ++failures;
            if (first.empty()) first = what;
        }
    };
    const int inner = 4;
    for (int s = 0; s < samples_per_op; ++s) {
        {
            Interval a = g.any(), b = g.any();
            Interval r[3] = {a + b, a - b, a * b};
            for (int q = 0; q < inner; ++q) {
                Big x = g.sample(a), y = g.sample(b);
                record(inside(r[0], x + y), "add");
                record(inside(r[1], x - y), "sub");
                record(inside(r[2], x * y), "mul");
            }
        }
        {
            Interval a = g.any(), b = g.nonzero();
            Interval r = a / b;
            for (int q = 0; q < inner; ++q) record(inside(r, Big(g.sample(a)) / Big(g.sample(b))), "div");
        }
        {
            Interval a = g.positive();
            Interval r = iv_sqrt(a);
            for (int q = 0; q < inner; ++q) record(inside(r, sqrt(Big(g.sample(a)))), "sqrt");
        }
        {
            Interval a = g.angle();
            Interval rs = iv_sin(a), rc = iv_cos(a);
            for (int q = 0; q < inner; ++q) {
                Big x = g.sample(a);
                record(inside(rs, sin(x)), "sin");
                record(inside(rc, cos(x)), "cos");
            }
        }
        {
            Interval a = g.unit();
            Interval r = iv_acos(a);
            for (int q = 0; q < inner; ++q) record(inside(r, acos(Big(g.sample(a)))), "arccos");
        }
        {
            Interval a = g.any();
            Interval r = iv_sqr(a);
            for (int q = 0; q < inner; ++q) {
                Big x = g.sample(a);
                record(inside(r, x * x), "square");
            }
        }
    }
    Check c;
    c.name = "interval containment";
    c.measured = static_cast<double>(failures);
    c.tolerance = 0.0;
    c.pass = failures == 0;
    c.detail = std::to_string(total) + " samples, " + std::to_string(failures) + " escapes" +
               (first.empty() ? "" : " (first: " + first + ")");
    c.seconds = seconds_since(t0);
    return c;
}

namespace {

PoissonSeries random_series(std::mt19937_64& rng, VariableLayout layout, int nterms) {
    std::uniform_int_distribution<int> deg(0, 4), harm(-4, 4), par(0, 1), coin(0, 1);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<PsTerm> terms;
    int np = layout.n_poly();
    for (int t = 0; t < nterms; ++t) {
        PsTerm pt;
        int budget = deg(rng);
        for (int b = 0; b < budget; ++b) pt.poly_exp[std::uniform_int_distribution<int>(0, np - 1)(rng)] += 1;
        pt.d2_exp = coin(rng) ? 0 : 1;
        int kb = deg(rng);
        for (int b = 0; b < kb; ++b) pt.k[coin(rng)] += coin(rng) ? 1 : -1;
        pt.parity = par(rng) ? Parity::sin : Parity::cos;
        double c = coef(rng);
        pt.coeff = coin(rng) ? Interval(c) : Interval(c, c + 1e-12);
        if (!PoissonSeries::canonicalize(pt.k, pt.parity, pt.coeff)) continue;
        terms.push_back(pt);
    }
    return PoissonSeries::from_terms(layout, terms);
}

}  // namespace

Check bracket_algebra(std::uint64_t seed, int n_series) {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(seed);
    int bad = 0;
    std::string first;
    double worst = 0.0;
    auto check = [&](const PoissonSeries& r, const char* what) {
        worst = std::max(worst, ps_max_mag(r));
        if (!ps_all_contain_zero(r)) {
            ++bad;
            if (first.empty()) first = what;
        }
    };
    for (int i = 0; i < n_series; ++i) {
        VariableLayout lay = (i % 2 == 0) ? VariableLayout::fast() : VariableLayout::translated();
        PoissonSeries f = random_series(rng, lay, 6), g = random_series(rng, lay, 6), h = random_series(rng, lay, 4);
        check(ps_poisson(f, g) + ps_poisson(g, f), "antisymmetry");
        check(ps_poisson(f, ps_poisson(g, h)) + ps_poisson(g, ps_poisson(h, f)) + ps_poisson(h, ps_poisson(f, g)),
              "Jacobi");
        check(ps_poisson(ps_mul(f, g), h) - ps_mul(f, ps_poisson(g, h)) - ps_mul(g, ps_poisson(f, h)), "Leibniz");
    }
    Check c;
    c.name = "bracket identities";
    c.measured = bad;
    c.tolerance = 0.0;
    c.pass = bad == 0;
    c.detail = std::to_string(n_series) + " triples, " + std::to_string(bad) + " residuals excluding 0" +
               (first.empty() ? "" : " (first: " + first + ")") + fmt(", max residual magnitude %.3g", worst);
    c.seconds = seconds_since(t0);
    return c;
}

double laplace_quadrature(double s, int j, double alpha) {
    // (1/pi) int_0^{2pi} cos(j psi) (1 - 2 alpha cos psi + alpha^2)^(-s) dpsi.
    // The trapezoidal rule converges geometrically for periodic analytic
    // integrands; 50-digit arithmetic keeps tiny high-order values accurate.
    const int N = 768;
    const Big pi = boost::math::constants::pi<Big>();
    Big a(alpha), sum = 0;
    for (int i = 0; i < N; ++i) {
        Big psi = 2 * pi * i / N;
        sum += cos(j * psi) * pow(1 - 2 * a * cos(psi) + a * a, Big(-s));
    }
    return static_cast<double>(2 * sum / N);
}

namespace {

// Planet state in its orbital plane with angles from the common node line.
template <class T>
struct State {
    T X, Y, VX, VY, r;
};

template <class T>
State<T> planet_state(double Lambda, double beta, double mu, T xi, T eta, double lam) {
    T rho = (xi * xi + eta * eta) / 2.0;
    T f = std::sqrt((1.0 - rho / (2.0 * Lambda)) / Lambda);
    T k = f * xi, h = -f * eta;
    double a = Lambda * Lambda / (beta * beta * mu);
    double n = std::sqrt(mu / (a * a * a));
    // Newton on F - k sin F + h cos F = lam
    T F = T(lam);
    for (int it = 0; it < 60; ++it) {
        T g = F - k * std::sin(F) + h * std::cos(F) - lam;
        T dg = 1.0 - k * std::cos(F) - h * std::sin(F);
        T step = g / dg;
        F -= step;
        if (std::abs(step) < 1e-17) break;
    }
    T b = 1.0 / (1.0 + std::sqrt(1.0 - h * h - k * k));
    T cF = std::cos(F), sF = std::sin(F);
    State<T> s;
    s.X = a * ((1.0 - h * h * b) * cF + h * k * b * sF - k);
    s.Y = a * ((1.0 - k * k * b) * sF + h * k * b * cF - h);
    T dFdt = n / (1.0 - k * cF - h * sF);
    s.VX = a * (-(1.0 - h * h * b) * sF + h * k * b * cF) * dFdt;
    s.VY = a * ((1.0 - k * k * b) * cF - h * k * b * sF) * dFdt;
    s.r = a * (1.0 - k * cF - h * sF);
    return s;
}

template <class T>
T cos_mutual(double L1, double L2, T rho1, T rho2, T d2) {
    // Total angular momentum from D2, then the law of cosines.
    T C2 = (L1 + L2) * (L1 + L2) - d2 * L1 * L2;
    T G1 = L1 - rho1, G2 = L2 - rho2;
    return (C2 - G1 * G1 - G2 * G2) / (2.0 * G1 * G2);
}

// Principal square root and reciprocal for arguments with positive real
// part (squared distances); glibc's general complex versions dominate the
// quadrature otherwise.
inline double root(double w) { return std::sqrt(w); }
inline cd root(cd w) {
    double x = w.real(), y = w.imag();
    double s = std::sqrt(0.5 * (std::sqrt(x * x + y * y) + x));
    return {s, y / (2.0 * s)};
}
inline double recip(double z) { return 1.0 / z; }
inline cd recip(cd z) {
    double n = z.real() * z.real() + z.imag() * z.imag();
    return {z.real() / n, -z.imag() / n};
}

template <class T>
T interaction(const OrbitalConfig& cfg, const SystemFrame& fr, const State<T>& s1, const State<T>& s2, T ci) {
    T dot = s1.X * s2.X + s1.Y * s2.Y * ci;
    T vdot = s1.VX * s2.VX + s1.VY * s2.VY * ci;
    T d = root(s1.r * s1.r + s2.r * s2.r - 2.0 * dot);
    double G = fr.G.mid();
    double cv = fr.beta[0].mid() * fr.beta[1].mid() / cfg.m0;
    return -G * cfg.m1 * cfg.m2 * recip(d) + cv * vdot;
}

}  // namespace

double perturbation_exact(const OrbitalConfig& cfg, const SystemFrame& fr, const std::array<double, 4>& xe,
                          double d2, double lam1, double lam2) {
    auto s1 = planet_state<double>(fr.Lambda[0].mid(), fr.beta[0].mid(), fr.mu_grav[0].mid(), xe[0], xe[1], lam1);
    auto s2 = planet_state<double>(fr.Lambda[1].mid(), fr.beta[1].mid(), fr.mu_grav[1].mid(), xe[2], xe[3], lam2);
    double rho1 = (xe[0] * xe[0] + xe[1] * xe[1]) / 2, rho2 = (xe[2] * xe[2] + xe[3] * xe[3]) / 2;
    double ci = cos_mutual<double>(fr.Lambda[0].mid(), fr.Lambda[1].mid(), rho1, rho2, d2);
    return interaction<double>(cfg, fr, s1, s2, ci);
}

Check laplace_table_vs_quadrature(double alpha, int n_half, int jmax, bool corrupt) {
    auto t0 = std::chrono::steady_clock::now();
    LaplaceTable tab(alpha, n_half);
    if (corrupt) tab.corrupt(0, 1, 1.0 + 1e-3);
    double worst = 0.0;
    int missed = 0;
    for (int n = 0; n <= n_half; ++n)
        for (int j = 0; j <= std::min(jmax, tab.j_max(n)); ++j) {
            double q = laplace_quadrature(n + 0.5, j, alpha);
            const Interval& b = tab.at(n, j);
            double rel = std::fabs(b.mid() - q) / std::fabs(q);
            worst = std::max(worst, rel);
            double slack = 1e-13 * std::fabs(q);
            if (q < b.lo - slack || q > b.hi + slack) ++missed;
        }
    Check c;
    c.name = corrupt ? "Laplace table vs quadrature (corrupted table)" : "Laplace table vs quadrature";
    c.measured = worst;
    c.tolerance = 1e-12;
    c.pass = worst <= c.tolerance && missed == 0;
    c.detail = fmt("alpha=%.3g, max relative deviation %.3g", alpha, worst) + ", " + std::to_string(missed) +
               " entries outside their enclosure";
    c.seconds = seconds_since(t0);
    return c;
}

namespace {

OrbitalConfig synthetic_config(double alpha) {
    OrbitalConfig cfg;
    cfg.name = "synthetic";
    cfg.m0 = 1.0;
    cfg.m1 = 1e-3;
    cfg.m2 = 1e-3;
    cfg.a1 = alpha;
    cfg.a2 = 1.0;
    cfg.e1 = cfg.e2 = Interval(0.0);
    cfg.w1 = cfg.w2 = Interval(0.0);
    return cfg;
}

// Reduces axis `ax` of a row-major complex array from M samples on a circle
// of radius R to Taylor coefficients 0..nmax.
void cauchy_axis(std::vector<cd>& data, std::vector<int>& shape, int ax, double R, int nmax) {
    int M = shape[ax];
    long outer = 1, inner = 1;
    for (int i = 0; i < ax; ++i) outer *= shape[i];
    for (std::size_t i = ax + 1; i < shape.size(); ++i) inner *= shape[i];
    std::vector<cd> out(static_cast<std::size_t>(outer) * (nmax + 1) * inner);
    for (long o = 0; o < outer; ++o)
        for (int n = 0; n <= nmax; ++n) {
            double rn = std::pow(R, -n) / M;
            for (long in = 0; in < inner; ++in) {
                cd s = 0.0;
                for (int m = 0; m < M; ++m) {
                    double th = -kTwoPi * double((long(n) * m) % M) / M;
                    s += data[(o * M + m) * inner + in] * cd(std::cos(th), std::sin(th));
                }
                out[(o * (nmax + 1) + n) * inner + in] = s * rn;
            }
        }
    data.swap(out);
    shape[ax] = nmax + 1;
}

}  // namespace

Check disturbing_vs_quadrature(const DisturbingOracleOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    OrbitalConfig cfg = synthetic_config(opt.alpha);
    SystemFrame fr = poincare_frame(cfg);
    const int K = opt.max_harmonic, NO = opt.max_order;
    ExpansionParams par = ExpansionParams::make(cfg, K, (NO + 1) / 2, {1, -1});
    DisturbingOptions dopt;
    dopt.corrupt_laplace = opt.corrupt_laplace;
    PoissonSeries ser = disturbing_series(cfg, fr, par, dopt);

    // Sample radii from e = ecc for xi, eta and D2 of the requested inclination.
    double Rx[2];
    for (int j = 0; j < 2; ++j) {
        double g = 1.0 - std::sqrt(1.0 - opt.ecc * opt.ecc);
        // Half the physical amplitude keeps aliasing from order 12 negligible;
        // Taylor coefficients do not depend on the circle radius.
        Rx[j] = 0.5 * std::sqrt(2.0 * fr.Lambda[j].mid() * g);
    }
    double Rd = 2.0 * (1.0 - std::cos(opt.imut_deg * kTwoPi / 360.0));
    const int M = 12, MD = 6, NL = 48;
    const double L1 = fr.Lambda[0].mid(), L2 = fr.Lambda[1].mid();

    // Planet states for every circle sample and fast angle.
    std::vector<State<cd>> st[2];
    for (int j = 0; j < 2; ++j) {
        st[j].resize(static_cast<std::size_t>(M) * M * NL);
        for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b) {
                cd xi = std::polar(Rx[j], kTwoPi * a / M), eta = std::polar(Rx[j], kTwoPi * b / M);
                for (int l = 0; l < NL; ++l)
                    st[j][(a * M + b) * NL + l] = planet_state<cd>(
                        fr.Lambda[j].mid(), fr.beta[j].mid(), fr.mu_grav[j].mid(), xi, eta, kTwoPi * l / NL);
            }
    }
    const int nk = 2 * K + 1;
    // F[k1][k2][a1][b1][a2][b2][d]
    std::vector<int> vshape{M, M, M, M, MD};
    const long nv = long(M) * M * M * M * MD;
    std::vector<std::vector<cd>> F(static_cast<std::size_t>(nk) * nk, std::vector<cd>(nv));
    std::vector<cd> grid(static_cast<std::size_t>(NL) * NL), half(static_cast<std::size_t>(NL) * nk);
    std::vector<cd> twd(static_cast<std::size_t>(nk) * NL);
    for (int q = 0; q < nk; ++q)
        for (int l = 0; l < NL; ++l) twd[q * NL + l] = std::polar(1.0, -kTwoPi * (q - K) * l / NL);
    long vi = 0;
    for (int a1 = 0; a1 < M; ++a1)
        for (int b1 = 0; b1 < M; ++b1)
            for (int a2 = 0; a2 < M; ++a2)
                for (int b2 = 0; b2 < M; ++b2)
                    for (int d = 0; d < MD; ++d, ++vi) {
                        cd xi1 = std::polar(Rx[0], kTwoPi * a1 / M), eta1 = std::polar(Rx[0], kTwoPi * b1 / M);
                        cd xi2 = std::polar(Rx[1], kTwoPi * a2 / M), eta2 = std::polar(Rx[1], kTwoPi * b2 / M);
                        cd d2 = std::polar(Rd, kTwoPi * d / MD);
                        cd ci = cos_mutual<cd>(L1, L2, (xi1 * xi1 + eta1 * eta1) / 2.0,
                                               (xi2 * xi2 + eta2 * eta2) / 2.0, d2);
                        const State<cd>* s1 = &st[0][(a1 * M + b1) * NL];
                        const State<cd>* s2 = &st[1][(a2 * M + b2) * NL];
                        for (int l1 = 0; l1 < NL; ++l1)
                            for (int l2 = 0; l2 < NL; ++l2)
                                grid[l1 * NL + l2] = interaction<cd>(cfg, fr, s1[l1], s2[l2], ci);
                        for (int l1 = 0; l1 < NL; ++l1)
                            for (int q = 0; q < nk; ++q) {
                                cd s = 0.0;
                                for (int l2 = 0; l2 < NL; ++l2) s += grid[l1 * NL + l2] * twd[q * NL + l2];
                                half[l1 * nk + q] = s;
                            }
                        for (int p = 0; p < nk; ++p)
                            for (int q = 0; q < nk; ++q) {
                                cd s = 0.0;
                                for (int l1 = 0; l1 < NL; ++l1) s += half[l1 * nk + q] * twd[p * NL + l1];
                                F[p * nk + q][vi] = s / double(NL * NL);
                            }
                    }

    double worst = 0.0, worst_abs = 0.0, worst_sig = 0.0;
    int compared = 0;
    std::string where;
    // Taylor reduction per harmonic, then one global scale for the floor.
    auto radius_scale = [&](int n0, int n1, int n2, int n3, int nd) {
        return std::pow(Rx[0], n0 + n1) * std::pow(Rx[1], n2 + n3) * std::pow(Rd, nd);
    };
    auto flat = [&](int n0, int n1, int n2, int n3, int nd) {
        return (((long(n0) * (NO + 1) + n1) * (NO + 1) + n2) * (NO + 1) + n3) * (NO / 2 + 1) + nd;
    };
    std::vector<std::vector<cd>> red(static_cast<std::size_t>(nk) * nk);
    double scale = 0.0;
    for (int p = 0; p < nk; ++p)
        for (int q = 0; q < nk; ++q) {
            int k1 = p - K, k2 = q - K;
            if (std::abs(k1) + std::abs(k2) > K) continue;
            if (k1 < 0 || (k1 == 0 && k2 < 0)) continue;
            std::vector<cd> data = std::move(F[p * nk + q]);
            std::vector<int> shape = vshape;
            cauchy_axis(data, shape, 4, Rd, NO / 2);
            for (int ax = 3; ax >= 0; --ax) cauchy_axis(data, shape, ax, Rx[ax / 2], NO);
            for (int n0 = 0; n0 <= NO; ++n0)
                for (int n1 = 0; n1 + n0 <= NO; ++n1)
                    for (int n2 = 0; n2 + n1 + n0 <= NO; ++n2)
                        for (int n3 = 0; n3 + n2 + n1 + n0 <= NO; ++n3)
                            for (int nd = 0; 2 * nd + n3 + n2 + n1 + n0 <= NO; ++nd)
                                scale = std::max(scale, std::abs(data[flat(n0, n1, n2, n3, nd)]) *
                                                            radius_scale(n0, n1, n2, n3, nd));
            red[p * nk + q] = std::move(data);
        }
    for (int p = 0; p < nk; ++p)
        for (int q = 0; q < nk; ++q) {
            const auto& data = red[p * nk + q];
            if (data.empty()) continue;
            int k1 = p - K, k2 = q - K;
            auto at = [&](int n0, int n1, int n2, int n3, int nd) { return data[flat(n0, n1, n2, n3, nd)]; };
            for (int n0 = 0; n0 <= NO; ++n0)
                for (int n1 = 0; n1 + n0 <= NO; ++n1)
                    for (int n2 = 0; n2 + n1 + n0 <= NO; ++n2)
                        for (int n3 = 0; n3 + n2 + n1 + n0 <= NO; ++n3)
                            for (int nd = 0; 2 * nd + n3 + n2 + n1 + n0 <= NO; ++nd) {
                                cd ref = at(n0, n1, n2, n3, nd);
                                std::array<int, 6> e{0, 0, n0, n1, n2, n3};
                                Interval cc = ser.coeff(PsTerm{nd, e, {k1, k2}, Parity::cos, {}});
                                Interval cs = ser.coeff(PsTerm{nd, e, {k1, k2}, Parity::sin, {}});
                                cd mine = (k1 == 0 && k2 == 0) ? cd(cc.mid(), 0.0)
                                                               : cd(cc.mid(), -cs.mid()) / 2.0;
                                double rs = radius_scale(n0, n1, n2, n3, nd);
                                double err = std::abs(mine - ref);
                                double denom = std::max(std::abs(ref), 1e-9 * scale / rs);
                                double rel = err / denom;
                                if (std::abs(ref) >= 1e-9 * scale / rs) worst_sig = std::max(worst_sig, rel);
                                ++compared;
                                if (rel > worst) {
                                    worst = rel;
                                    worst_abs = err;
                                    char buf[128];
                                    std::snprintf(buf, sizeof buf, "k=(%d,%d) exps=(%d,%d,%d,%d) d2^%d", k1, k2,
                                                  n0, n1, n2, n3, nd);
                                    where = buf;
                                }
                            }
        }
    Check c;
    c.name = opt.corrupt_laplace ? "disturbing function vs quadrature (corrupted table)"
                                 : "disturbing function vs quadrature";
    c.measured = worst;
    c.tolerance = opt.rel_tol;
    c.pass = worst <= opt.rel_tol;
    c.detail = fmt("alpha=%.3g, e=%.3g", opt.alpha, opt.ecc) + ", " + std::to_string(compared) +
               " coefficients, worst at " + where + fmt(" (abs err %.3g)", worst_abs) +
               fmt(", worst above the 1e-9 floor %.3g", worst_sig);
    c.seconds = seconds_since(t0);
    return c;
}

Check circular_slice(const OrbitalConfig& cfg, bool corrupt_laplace) {
    auto t0 = std::chrono::steady_clock::now();
    SystemFrame fr = poincare_frame(cfg);
    ExpansionParams par = ExpansionParams::make(cfg, 6, 1, {1, -1});
    DisturbingOptions dopt;
    dopt.corrupt_laplace = corrupt_laplace;
    PoissonSeries ser = disturbing_series(cfg, fr, par, dopt);
    double alpha = cfg.a1 / cfg.a2;
    double G = fr.G.mid();
    double n1 = fr.n[0].mid(), n2 = fr.n[1].mid();
    double worst = 0.0;
    for (int j = 0; j <= 3; ++j) {
        // cos(j (lam1 - lam2)) coefficient of -G m1 m2/Delta0 + beta1 beta2 v1.v2/m0
        double b = laplace_quadrature(0.5, j, alpha);
        double ref = -G * cfg.m1 * cfg.m2 / cfg.a2 * (j == 0 ? 0.5 * b : b);
        if (j == 1) ref += fr.beta[0].mid() * fr.beta[1].mid() / cfg.m0 * n1 * cfg.a1 * n2 * cfg.a2;
        Interval got = ser.coeff(PsTerm{0, {}, {j, -j}, Parity::cos, {}});
        worst = std::max(worst, std::fabs(got.mid() - ref) / std::fabs(ref));
    }
    Check c;
    c.name = corrupt_laplace ? "circular slice vs quadrature (corrupted table)" : "circular slice vs quadrature";
    c.measured = worst;
    c.tolerance = 1e-9;
    c.pass = worst <= c.tolerance;
    c.detail = fmt("alpha=%.4g, max relative deviation %.3g", alpha, worst);
    c.seconds = seconds_since(t0);
    return c;
}

Check kepler_quadratic(const OrbitalConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    SystemFrame fr = poincare_frame(cfg);
    PoissonSeries kep = kepler_series(fr);
    double worst = 0.0;
    bool ok = true;
    const double m[2] = {cfg.m1, cfg.m2};
    const double a[2] = {cfg.a1, cfg.a2};
    const Big pi = boost::math::constants::pi<Big>();
    for (int j = 0; j < 2; ++j) {
        Big beta = Big(cfg.m0) * m[j] / (Big(cfg.m0) + m[j]);
        Big mu = 4 * pi * pi * (Big(cfg.m0) + m[j]);
        Big Lam = beta * sqrt(mu * a[j]);
        auto h = [&](const Big& L) { return -mu * mu * beta * beta * beta / (2 * L * L); };
        Big step = Lam * Big("1e-12");
        Big d1 = (h(Lam + step) - h(Lam - step)) / (2 * step);
        Big d2 = (h(Lam + step) - 2 * h(Lam) + h(Lam - step)) / (step * step) / 2;
        std::array<int, 6> e1{}, e2{};
        e1[j] = 1;
        e2[j] = 2;
        Interval c1 = kep.coeff(PsTerm{0, e1, {0, 0}, Parity::cos, {}});
        Interval c2 = kep.coeff(PsTerm{0, e2, {0, 0}, Parity::cos, {}});
        for (auto [iv, ref] : {std::pair<Interval, Big>{c1, d1}, std::pair<Interval, Big>{c2, d2}}) {
            double r = static_cast<double>(ref);
            double dist = std::max({0.0, iv.lo - r, r - iv.hi});
            worst = std::max(worst, std::fabs(iv.mid() - r) / std::fabs(r));
            if (dist > 1e-15 * std::fabs(r)) ok = false;
        }
    }
    Check c;
    c.name = "Kepler frequencies and quadratic term";
    c.measured = worst;
    c.tolerance = 1e-14;
    c.pass = ok && worst <= c.tolerance;
    c.detail = fmt("max relative deviation %.3g", worst);
    c.seconds = seconds_since(t0);
    return c;
}

Check eigenfrequencies(const PoissonSeries& hsec, const Diagonalization& d) {
    auto t0 = std::chrono::steady_clock::now();
    auto co = [&](int i, int j) {
        std::array<int, 6> e{};
        e[i] += 1;
        e[j] += 1;
        return hsec.coeff(KeyCodec::pack(0, e, {0, 0}, Parity::cos)).mid();
    };
    Eigen::Matrix2d A, B;
    A << 2.0 * co(0, 0), co(0, 2), co(0, 2), 2.0 * co(2, 2);
    B << 2.0 * co(1, 1), co(1, 3), co(1, 3), 2.0 * co(3, 3);
    Eigen::EigenSolver<Eigen::Matrix2d> es(A * B);
    double sg = A(0, 0) < 0.0 ? -1.0 : 1.0;
    std::array<double, 2> ref{sg * std::sqrt(es.eigenvalues()(0).real()), sg * std::sqrt(es.eigenvalues()(1).real())};
    std::array<double, 2> got{d.nu[0].mid(), d.nu[1].mid()};
    std::sort(ref.begin(), ref.end());
    std::sort(got.begin(), got.end());
    double worst = 0.0;
    for (int j = 0; j < 2; ++j) worst = std::max(worst, std::fabs(ref[j] - got[j]) / std::fabs(ref[j]));
    Check c;
    c.name = "secular frequencies vs dense eigensolver";
    c.measured = worst;
    c.tolerance = 1e-10;
    c.pass = worst <= c.tolerance;
    c.detail = fmt("nu = %.12g, %.12g", got[0], got[1]);
    c.seconds = seconds_since(t0);
    return c;
}

namespace {

// Sum of |term| at a point, the scale for pointwise comparisons.
double abs_eval(const PoissonSeries& h, const std::array<double, 6>& poly, const std::array<double, 2>& ang,
                double d2) {
    double sum = 0.0;
    for (const auto& [key, c] : h.entries()) {
        double v = std::fabs(c.mid()) * std::pow(d2, KeyCodec::d2(key));
        for (int i = 0; i < h.layout().n_poly(); ++i) v *= std::pow(std::fabs(poly[i]), KeyCodec::exp(key, i));
        double arg = KeyCodec::harm(key, 0) * ang[0] + KeyCodec::harm(key, 1) * ang[1];
        v *= std::fabs(KeyCodec::parity(key) == Parity::cos ? std::cos(arg) : std::sin(arg));
        sum += v;
    }
    return sum;
}

}  // namespace

Check composition_consistency(const PoissonSeries& hsec, const Prenormalized& pre, double d2, std::uint64_t seed) {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0), ang(0.0, 2.0 * M_PI), pos(0.05, 0.2);
    const auto& M = pre.diag.M;
    const auto& N = pre.diag.N;
    const PoissonSeries haa = to_action_angle(pre.diag.h, pre.s_max);
    const PoissonSeries h0 = translate_and_fix_d2(pre.birkhoff.h, pre.istar, Interval(d2), 4);
    // A small amplitude keeps the dropped quadratic residual negligible.
    double amp = std::sqrt(2.0 * std::max(pre.istar[0].mid(), pre.istar[1].mid()));
    if (!(amp > 0.0)) amp = 1e-4;
    double worst_xy = 0.0, worst_aa = 0.0, worst_tr = 0.0;
    for (int t = 0; t < 20; ++t) {
        std::array<double, 6> xy{amp * uni(rng), amp * uni(rng), amp * uni(rng), amp * uni(rng), 0, 0};
        std::array<double, 6> xe{M[0] * xy[0] + M[1] * xy[2], N[0].mid() * xy[1] + N[1].mid() * xy[3],
                                 M[2] * xy[0] + M[3] * xy[2], N[2].mid() * xy[1] + N[3].mid() * xy[3], 0, 0};
        double a = hsec.eval(xe, {0, 0}, d2), b = pre.diag.h.eval(xy, {0, 0}, d2);
        double sc = std::max(abs_eval(hsec, xe, {0, 0}, d2), abs_eval(pre.diag.h, xy, {0, 0}, d2));
        if (sc > 0) worst_xy = std::max(worst_xy, std::fabs(a - b) / sc);

        double u1 = std::hypot(xy[0], xy[1]) / std::sqrt(2.0), u2 = std::hypot(xy[2], xy[3]) / std::sqrt(2.0);
        double p1 = std::atan2(xy[1], xy[0]), p2 = std::atan2(xy[3], xy[2]);
        double c = haa.eval({u1, u2, 0, 0, 0, 0}, {p1, p2}, d2);
        double sc2 = abs_eval(haa, {u1, u2, 0, 0, 0, 0}, {p1, p2}, d2);
        if (sc2 > 0) worst_aa = std::max(worst_aa, std::fabs(b - c) / sc2);

        std::array<double, 2> p{pos(rng) * 0.1 * pre.istar[0].mid(), pos(rng) * 0.1 * pre.istar[1].mid()};
        std::array<double, 2> q{ang(rng), ang(rng)};
        std::array<double, 6> u{std::sqrt(p[0] + pre.istar[0].mid()), std::sqrt(p[1] + pre.istar[1].mid()), 0, 0, 0, 0};
        double h3 = pre.birkhoff.h.eval(u, q, d2);
        double ht = h0.eval({p[0], p[1], 0, 0, 0, 0}, q, 0.0);
        double sc3 = abs_eval(pre.birkhoff.h, u, q, d2);
        if (sc3 > 0) worst_tr = std::max(worst_tr, std::fabs(h3 - ht) / sc3);
    }
    Check c;
    c.name = "coordinate-change composition";
    c.measured = std::max({worst_xy, worst_aa, worst_tr});
    c.tolerance = 1e-9;
    c.pass = c.measured <= c.tolerance;
    c.detail = fmt("diagonalization %.2g, action-angle %.2g", worst_xy, worst_aa) + fmt(", translation %.2g", worst_tr);
    c.seconds = seconds_since(t0);
    return c;
}

}  // namespace rkam::oracle
