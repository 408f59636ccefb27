#include "rkam/hamexp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <sstream>

#include "jet.hpp"

namespace rkam {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Symbol positions shared by the jets and the fast layout.
enum Sym { sL1 = 0, sL2, sXi1, sEta1, sXi2, sEta2, sD2 };

}  // namespace

Interval gravitational_constant() { return Interval(4.0) * iv_sqr(iv_pi()); }

void OrbitalConfig::validate(bool allow_high_e) const {
    std::vector<std::string> bad;
    if (!(m0 > 0.0)) bad.push_back("stellar mass must be positive");
    if (!(m1 >= 0.0) || !(m2 >= 0.0)) bad.push_back("planet masses must be non-negative");
    if (!(a1 > 0.0) || !(a2 > 0.0)) bad.push_back("semi-major axes must be positive");
    if (!(a1 < a2)) bad.push_back("planets must be ordered with a1 < a2");
    for (const Interval* e : {&e1, &e2}) {
        if (e->lo < 0.0 || e->hi >= 1.0) bad.push_back("eccentricity outside [0,1)");
        else if (e->hi >= 0.1 && !allow_high_e)
            bad.push_back("eccentricity upper bound " + std::to_string(e->hi) +
                          " >= 0.1 (pass --allow-high-e to override)");
    }
    for (const Interval* w : {&w1, &w2})
        if (!w->is_finite()) bad.push_back("perihelion argument must be finite");
    if (!bad.empty()) {
        std::string msg = "invalid configuration";
        if (!name.empty()) msg += " '" + name + "'";
        for (const auto& b : bad) msg += "; " + b;
        throw ValidationError(msg);
    }
}

void ExpansionParams::validate() const {
    std::vector<std::string> bad;
    if (K_F < 1 || K_F > 100) bad.push_back("K_F must lie in [1,100]");
    if (N_S < 1 || N_S > 15) bad.push_back("N_S must lie in [1,15]");
    if (!(mu >= 0.0)) bad.push_back("mu must be non-negative");
    if (resonance[0] == 0 && resonance[1] == 0) bad.push_back("resonance vector is zero");
    else if (K_F < std::abs(resonance[0]) + std::abs(resonance[1]))
        bad.push_back("K_F must be at least |k1*| + |k2*| of the resonance vector");
    if (N_S < std::abs(resonance[0]) - std::abs(resonance[1]))
        bad.push_back("N_S must be at least |k1*| - |k2*| of the resonance vector");
    if (!bad.empty()) {
        std::string msg = "invalid expansion parameters";
        for (const auto& b : bad) msg += "; " + b;
        throw ValidationError(msg);
    }
}

ExpansionParams ExpansionParams::make(const OrbitalConfig& cfg, int K_F, int N_S, std::array<int, 2> resonance) {
    ExpansionParams p;
    p.K_F = K_F;
    p.N_S = N_S;
    p.mu = std::max(cfg.m1, cfg.m2) / cfg.m0;
    p.resonance = resonance;
    p.validate();
    return p;
}

SystemFrame poincare_frame(const OrbitalConfig& cfg) {
    SystemFrame f;
    f.G = gravitational_constant();
    const double m[2] = {cfg.m1, cfg.m2};
    const double a[2] = {cfg.a1, cfg.a2};
    for (int j = 0; j < 2; ++j) {
        Interval m0(cfg.m0), mj(m[j]);
        f.beta[j] = m0 * mj / (m0 + mj);
        f.mu_grav[j] = f.G * (m0 + mj);
        f.Lambda[j] = f.beta[j] * iv_sqrt(f.mu_grav[j] * Interval(a[j]));
        f.n[j] = iv_sqrt(f.mu_grav[j] / iv_pow(Interval(a[j]), 3));
        f.a[j] = a[j];
    }
    return f;
}

std::array<Interval, 4> initial_secular_point(const OrbitalConfig& cfg, const SystemFrame& frame) {
    std::array<Interval, 4> out;
    const Interval* e[2] = {&cfg.e1, &cfg.e2};
    const Interval* w[2] = {&cfg.w1, &cfg.w2};
    for (int j = 0; j < 2; ++j) {
        Interval e2 = iv_sqr(*e[j]);
        // 1 - sqrt(1-e^2) written without cancellation
        Interval g = e2 / (Interval(1.0) + iv_sqrt(Interval(1.0) - e2));
        Interval amp = iv_sqrt(Interval(2.0) * frame.Lambda[j] * g);
        out[2 * j] = amp * iv_cos(*w[j]);
        out[2 * j + 1] = -(amp * iv_sin(*w[j]));
    }
    return out;
}

TruncationCaps htf_caps(const ExpansionParams& params) {
    return TruncationCaps{params.K_F, 2 * params.N_S, 2, -1};
}

PoissonSeries kepler_series(const SystemFrame& frame) {
    std::vector<PsTerm> terms;
    for (int j = 0; j < 2; ++j) {
        PsTerm t;
        t.poly_exp[j] = 1;
        t.coeff = frame.n[j];
        terms.push_back(t);
        // A massless planet has L = 0 identically; its curvature term is undefined.
        if (frame.Lambda[j].is_zero()) continue;
        t.poly_exp[j] = 2;
        t.coeff = Interval(-1.5) * frame.n[j] / frame.Lambda[j];
        terms.push_back(t);
    }
    return PoissonSeries::from_terms(VariableLayout::fast(), terms);
}

Interval laplace_coeff(double s, int j, double alpha) {
    if (!(alpha >= 0.0 && alpha < 0.9)) throw AlphaOutOfRange(alpha);
    if (j < 0) j = -j;
    if (!(s > 0.0)) throw std::invalid_argument("laplace_coeff: s must be positive");
    if (alpha == 0.0) return Interval(j == 0 ? 2.0 : 0.0);
    Interval a(alpha), a2 = iv_sqr(a);
    // 2 (s)_j / j! alpha^j
    Interval pre(2.0);
    for (int i = 0; i < j; ++i) pre = pre * (Interval(s) + Interval(i)) / Interval(i + 1.0) * a;
    // F(s, s+j; j+1; alpha^2), positive terms
    Interval sum(0.0), term(1.0);
    const int max_terms = 100000;
    for (int n = 0; n < max_terms; ++n) {
        sum = sum + term;
        Interval ratio = (Interval(s) + Interval(n)) * (Interval(s + j) + Interval(n)) /
                         ((Interval(j + 1.0) + Interval(n)) * Interval(n + 1.0)) * a2;
        term = term * ratio;
        if (n > 4 && term.hi < 1e-18 * sum.lo) {
            // Ratios beyond n+1 stay below max(r(n+1), alpha^2).
            int m = n + 1;
            Interval rn = (Interval(s) + Interval(m)) * (Interval(s + j) + Interval(m)) /
                          ((Interval(j + 1.0) + Interval(m)) * Interval(m + 1.0)) * a2;
            double q = std::fmax(rn.hi, a2.hi);
            if (q >= 1.0) continue;
            Interval tail = term / (Interval(1.0) - Interval(q));
            return pre * (sum + Interval(0.0, tail.hi));
        }
    }
    throw ExpansionDiverged("hypergeometric series for the Laplace coefficient did not converge");
}

LaplaceTable::LaplaceTable(double alpha, int n_max, double rel_cut, int j_cap) : alpha_(alpha) {
    if (!(alpha >= 0.0 && alpha < 0.9)) throw AlphaOutOfRange(alpha);
    b_.resize(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        double s = n + 0.5;
        auto& row = b_[n];
        row.push_back(laplace_coeff(s, 0, alpha));
        double b0 = row[0].mid();
        for (int j = 1;; ++j) {
            if (j > j_cap)
                throw ExpansionDiverged("Laplace coefficients b_{" + std::to_string(n) +
                                        "+1/2}^(j) have not decayed by j=" + std::to_string(j_cap));
            Interval b = laplace_coeff(s, j, alpha);
            row.push_back(b);
            if (alpha == 0.0) break;
            if (b.hi < rel_cut * b0 && b.hi < row[j - 1].lo) break;
        }
    }
}

void LaplaceTable::corrupt(int n, int j, double factor) {
    Interval& b = b_.at(n).at(j);
    b = b * Interval(factor);
}

double LaplaceTable::kernel(int n, double psi) const {
    const auto& row = b_.at(n);
    double sum = 0.0;
    for (int j = static_cast<int>(row.size()) - 1; j >= 1; --j) sum += row[j].mid() * std::cos(j * psi);
    return sum + 0.5 * row[0].mid();
}

namespace {

// Orbital quantities of one planet on the fast-angle grid, as jets in
// (L_j, xi_j, eta_j).
struct PlanetGrid {
    std::vector<std::vector<double>> X, Y, VX, VY, R2;
};

PlanetGrid planet_on_grid(const jet::Space& sp, int j, double Lambda, double beta, double mu, int N) {
    const int n = sp.size();
    const int P = sp.max_power();
    const int iL = sp.var_index(j == 0 ? sL1 : sL2);
    const int iXi = sp.var_index(j == 0 ? sXi1 : sXi2);
    const int iEta = sp.var_index(j == 0 ? sEta1 : sEta2);
    using V = std::vector<double>;
    auto zero = [&] { return V(n, 0.0); };
    auto mul = [&](const V& a, const V& b) {
        V o(n);
        sp.mul(a.data(), b.data(), o.data());
        return o;
    };
    auto comp = [&](V x, const std::vector<double>& c) {
        x[0] = 0.0;
        V o(n);
        sp.compose(x.data(), c, o.data());
        return o;
    };
    auto axpy = [&](double s, const V& x, V y) {
        for (int i = 0; i < n; ++i) y[i] += s * x[i];
        return y;
    };

    V L = zero(), xi = zero(), eta = zero();
    L[iL] = 1.0;
    xi[iXi] = 1.0;
    eta[iEta] = 1.0;

    V invLam = comp(L, jet::taylor_inverse(Lambda, P));
    V rho = axpy(0.5, mul(xi, xi), axpy(0.5, mul(eta, eta), zero()));
    // f^2 = (1 - rho/(2 Lambda)) / Lambda
    V f2 = axpy(-0.5, mul(mul(rho, invLam), invLam), invLam);
    double c0 = f2[0];
    V f = comp(f2, jet::taylor_sqrt(c0, P));
    V k = mul(f, xi);
    V h = axpy(-1.0, mul(f, eta), zero());
    V Lam = L;
    Lam[0] = Lambda;
    double scale_a = 1.0 / (beta * beta * mu);
    V a = axpy(scale_a, mul(Lam, Lam), zero());
    V na2 = axpy(1.0 / beta, Lam, zero());
    V hh = mul(h, h), kk = mul(k, k), hk = mul(h, k);
    V e2 = axpy(1.0, hh, kk);
    V sq = comp(axpy(-1.0, e2, zero()), jet::taylor_sqrt(1.0, P));  // sqrt(1 - e^2)
    V onep = sq;
    onep[0] += 1.0;
    V b = comp(onep, jet::taylor_inverse(onep[0], P));
    V hhb = mul(hh, b), kkb = mul(kk, b), hkb = mul(hk, b);
    V one_hhb = axpy(-1.0, hhb, zero());
    one_hhb[0] += 1.0;
    V one_kkb = axpy(-1.0, kkb, zero());
    one_kkb[0] += 1.0;

    const auto sin0 = jet::taylor_sin0(P), cos0 = jet::taylor_cos0(P);
    PlanetGrid g;
    for (auto* v : {&g.X, &g.Y, &g.VX, &g.VY, &g.R2}) v->resize(N);
    for (int i = 0; i < N; ++i) {
        double lam = kTwoPi * i / N;
        double cl = std::cos(lam), sl = std::sin(lam);
        // F = lam + phi with phi = k sin F - h cos F
        V phi = zero(), cF, sF;
        for (int it = 0; it <= P + 1; ++it) {
            V cp = comp(phi, cos0), sp_ = comp(phi, sin0);
            cF = axpy(cl, cp, axpy(-sl, sp_, zero()));
            sF = axpy(sl, cp, axpy(cl, sp_, zero()));
            V nphi = axpy(1.0, mul(k, sF), axpy(-1.0, mul(h, cF), zero()));
            if (nphi == phi && it > 0) break;
            phi = std::move(nphi);
        }
        // X = a[(1-h^2 b) cF + hkb sF - k], Y = a[(1-k^2 b) sF + hkb cF - h]
        V xin = axpy(-1.0, k, axpy(1.0, mul(one_hhb, cF), mul(hkb, sF)));
        V yin = axpy(-1.0, h, axpy(1.0, mul(one_kkb, sF), mul(hkb, cF)));
        g.X[i] = mul(a, xin);
        g.Y[i] = mul(a, yin);
        // r = a(1 - k cF - h sF)
        V rr = axpy(-1.0, mul(k, cF), axpy(-1.0, mul(h, sF), zero()));
        rr[0] += 1.0;
        V r = mul(a, rr);
        V invr = comp(r, jet::taylor_inverse(r[0], P));
        V pre = mul(na2, invr);
        V vx = axpy(1.0, mul(hkb, cF), axpy(-1.0, mul(one_hhb, sF), zero()));
        V vy = axpy(1.0, mul(one_kkb, cF), axpy(-1.0, mul(hkb, sF), zero()));
        g.VX[i] = mul(pre, vx);
        g.VY[i] = mul(pre, vy);
        g.R2[i] = axpy(1.0, mul(g.X[i], g.X[i]), mul(g.Y[i], g.Y[i]));
    }
    return g;
}

// -1/2 choose n
double binom_mhalf(int n) {
    double b = 1.0;
    for (int k = 0; k < n; ++k) b *= (-0.5 - k) / (k + 1);
    return b;
}

}  // namespace

PoissonSeries disturbing_series(const OrbitalConfig& cfg, const SystemFrame& frame, const ExpansionParams& params,
                                const DisturbingOptions& opt) {
    params.validate();
    // Both parts of the perturbation carry the factor m1 m2.
    if (cfg.m1 == 0.0 || cfg.m2 == 0.0) return PoissonSeries(VariableLayout::fast(), htf_caps(params));
    const int W = 2 * params.N_S;
    const int K = opt.trig_cap >= 0 ? opt.trig_cap : params.K_F;
    const double alpha = frame.a[0] / frame.a[1];
    int N = opt.grid;
    if (N <= 0) {
        N = alpha > 0.45 ? 128 : 64;
        N = std::max(N, (4 * K + 4 + 15) / 16 * 16);
    }
    if (N % 2 != 0 || N / 2 < 2 * K + 2)
        throw std::invalid_argument("disturbing_series: grid must be even and at least 4 K_F + 4");

    LaplaceTable table(alpha, W + 1);
    if (opt.corrupt_laplace) table.corrupt(0, 1, 1.0 + 1e-3);

    jet::Space full({true, true, true, true, true, true, true}, W, 1);
    jet::Space p1({true, false, true, true, false, false, false}, W, 1);
    jet::Space p2({false, true, false, false, true, true, false}, W, 1);
    jet::CrossMap cross(p1, p2, full);
    jet::Embedding emb1(p1, full), emb2(p2, full);
    const int nf = full.size();
    const int P = full.max_power();

    PlanetGrid g1 = planet_on_grid(p1, 0, frame.Lambda[0].mid(), frame.beta[0].mid(), frame.mu_grav[0].mid(), N);
    PlanetGrid g2 = planet_on_grid(p2, 1, frame.Lambda[1].mid(), frame.beta[1].mid(), frame.mu_grav[1].mid(), N);

    using V = std::vector<double>;
    auto fmul = [&](const V& a, const V& b) {
        V o(nf);
        full.mul(a.data(), b.data(), o.data());
        return o;
    };
    // sigma = sin^2(i/2) = [D2 L1 L2 - rho (2S - rho)] / (4 Xi1 Xi2)
    V sigma;
    {
        V L1(nf, 0.0), L2(nf, 0.0), D2(nf, 0.0), rho(nf, 0.0);
        L1[0] = frame.Lambda[0].mid();
        L1[full.var_index(sL1)] = 1.0;
        L2[0] = frame.Lambda[1].mid();
        L2[full.var_index(sL2)] = 1.0;
        D2[full.var_index(sD2)] = 1.0;
        V xe(nf, 0.0);
        for (int s : {sXi1, sEta1, sXi2, sEta2}) {
            std::fill(xe.begin(), xe.end(), 0.0);
            xe[full.var_index(s)] = 1.0;
            V sq = fmul(xe, xe);
            for (int i = 0; i < nf; ++i) rho[i] += 0.5 * sq[i];
        }
        V rho1(nf, 0.0), rho2(nf, 0.0);
        for (int i = 0; i < nf; ++i) {
            const auto& e = full.exps(i);
            if (e[sXi2] == 0 && e[sEta2] == 0) rho1[i] = rho[i];
            else rho2[i] = rho[i];
        }
        V num = fmul(D2, fmul(L1, L2));
        V S(nf, 0.0);
        for (int i = 0; i < nf; ++i) S[i] = 2.0 * (L1[i] + L2[i]) - rho[i];
        V rr = fmul(rho, S);
        for (int i = 0; i < nf; ++i) num[i] -= rr[i];
        V X1 = L1, X2 = L2;
        for (int i = 0; i < nf; ++i) {
            X1[i] -= rho1[i];
            X2[i] -= rho2[i];
        }
        V den = fmul(X1, X2);
        for (double& d : den) d *= 4.0;
        V inv(nf);
        double d0 = den[0];
        den[0] = 0.0;
        full.compose(den.data(), jet::taylor_inverse(d0, P), inv.data());
        sigma = fmul(num, inv);
    }

    // 1/Delta0^(2n+1) on the grid of angle differences.
    std::vector<V> kern(static_cast<std::size_t>(P) + 2, V(N));
    for (int n = 0; n <= P + 1 && n <= table.n_max(); ++n) {
        double scale = std::pow(frame.a[1], -(2 * n + 1));
        for (int m = 0; m < N; ++m) kern[n][m] = scale * table.kernel(n, kTwoPi * m / N);
    }
    std::vector<double> bc(static_cast<std::size_t>(P) + 2);
    for (int n = 0; n <= P + 1; ++n) bc[n] = binom_mhalf(n);

    const double cD = -(frame.G * Interval(cfg.m1) * Interval(cfg.m2)).mid();
    const double cV = (frame.beta[0] * frame.beta[1] / Interval(cfg.m0)).mid();

    // Fourier accumulators: fine grid and the even sub-grid.
    const int nk2 = 2 * K + 1, nk1 = K + 1;
    const std::size_t acc_size = static_cast<std::size_t>(nf) * nk1 * nk2;
    std::vector<std::complex<double>> acc(acc_size), acc_c(acc_size);
    std::vector<double> smax(nf, 0.0);
    std::vector<double> cosT(N), sinT(N);
    for (int t = 0; t < N; ++t) {
        cosT[t] = std::cos(kTwoPi * t / N);
        sinT[t] = std::sin(kTwoPi * t / N);
    }
    std::vector<double> twc(static_cast<std::size_t>(nk2) * N), tws(twc.size());
    for (int q = 0; q < nk2; ++q)
        for (int i2 = 0; i2 < N; ++i2) {
            long t = ((long(q - K) * i2) % N + N) % N;
            twc[static_cast<std::size_t>(q) * N + i2] = cosT[t];
            tws[static_cast<std::size_t>(q) * N + i2] = sinT[t];
        }
    auto tw = [&](long k, int i) {
        long t = ((k * i) % N + N) % N;
        return std::complex<double>(cosT[t], -sinT[t]);
    };

    std::vector<double> row(static_cast<std::size_t>(nf) * N);
    V P_(nf), Q(nf), QV(nf), Vd(nf), D2sq(nf), pw(nf), nx(nf), inv(nf), tmp(nf);
    std::vector<std::complex<double>> rk(nk2), rkc(nk2);
    for (int i1 = 0; i1 < N; ++i1) {
        for (int i2 = 0; i2 < N; ++i2) {
            std::fill(P_.begin(), P_.end(), 0.0);
            std::fill(Q.begin(), Q.end(), 0.0);
            cross.mul_add(g1.X[i1].data(), g2.X[i2].data(), P_.data());
            cross.mul_add(g1.Y[i1].data(), g2.Y[i2].data(), Q.data());
            full.mul(sigma.data(), Q.data(), tmp.data());
            // |r1 - r2|^2 = R1 + R2 - 2 (X1X2 + Y1Y2 - 2 sigma Y1Y2)
            std::fill(D2sq.begin(), D2sq.end(), 0.0);
            emb1.add(g1.R2[i1].data(), D2sq.data());
            emb2.add(g2.R2[i2].data(), D2sq.data());
            for (int i = 0; i < nf; ++i) D2sq[i] -= 2.0 * (P_[i] + Q[i] - 2.0 * tmp[i]);
            D2sq[0] = 0.0;  // expanded about Delta0 from the Laplace table
            int m = ((i1 - i2) % N + N) % N;
            std::fill(inv.begin(), inv.end(), 0.0);
            inv[0] = bc[0] * kern[0][m];
            pw = D2sq;
            for (int n = 1; n <= P + 1; ++n) {
                bool any = false;
                double c = bc[n] * kern[n][m];
                for (int i = 0; i < nf; ++i) {
                    if (pw[i] != 0.0) any = true;
                    inv[i] += c * pw[i];
                }
                if (!any || n == P + 1) break;
                full.mul(pw.data(), D2sq.data(), nx.data());
                std::swap(pw, nx);
            }
            std::fill(Vd.begin(), Vd.end(), 0.0);
            std::fill(QV.begin(), QV.end(), 0.0);
            cross.mul_add(g1.VX[i1].data(), g2.VX[i2].data(), Vd.data());
            cross.mul_add(g1.VY[i1].data(), g2.VY[i2].data(), QV.data());
            full.mul(sigma.data(), QV.data(), tmp.data());
            for (int i = 0; i < nf; ++i) {
                double v = cD * inv[i] + cV * (Vd[i] + QV[i] - 2.0 * tmp[i]);
                row[static_cast<std::size_t>(i) * N + i2] = v;
                smax[i] = std::fmax(smax[i], std::fabs(v));
            }
        }
        for (int i = 0; i < nf; ++i) {
            const double* r = row.data() + static_cast<std::size_t>(i) * N;
            for (int q = 0; q < nk2; ++q) {
                const double* c = twc.data() + static_cast<std::size_t>(q) * N;
                const double* sn = tws.data() + static_cast<std::size_t>(q) * N;
                double re0 = 0, im0 = 0, re1 = 0, im1 = 0;
                for (int i2 = 0; i2 < N; i2 += 2) {
                    re0 += r[i2] * c[i2];
                    im0 -= r[i2] * sn[i2];
                    re1 += r[i2 + 1] * c[i2 + 1];
                    im1 -= r[i2 + 1] * sn[i2 + 1];
                }
                rk[q] = {re0 + re1, im0 + im1};
                rkc[q] = {re0, im0};
            }
            std::complex<double>* a = acc.data() + static_cast<std::size_t>(i) * nk1 * nk2;
            std::complex<double>* ac = acc_c.data() + static_cast<std::size_t>(i) * nk1 * nk2;
            for (int k1 = 0; k1 <= K; ++k1) {
                std::complex<double> t = tw(k1, i1);
                for (int q = 0; q < nk2; ++q) {
                    a[k1 * nk2 + q] += rk[q] * t;
                    if (i1 % 2 == 0) ac[k1 * nk2 + q] += rkc[q] * t;
                }
            }
        }
    }

    const double nrm = 1.0 / (double(N) * N), nrmc = 4.0 / (double(N) * N);
    const double floor_rel = 1e-13;
    PoissonSeries::Builder out(VariableLayout::fast(), htf_caps(params));
    for (int i = 0; i < nf; ++i) {
        const auto& e = full.exps(i);
        int ecc = e[sXi1] + e[sEta1] + e[sXi2] + e[sEta2];
        int order = ecc + 2 * e[sD2];
        int etadeg = e[sEta1] + e[sEta2];
        Parity par = etadeg % 2 == 0 ? Parity::cos : Parity::sin;
        std::array<int, 6> pe{e[sL1], e[sL2], e[sXi1], e[sEta1], e[sXi2], e[sEta2]};
        for (int k1 = 0; k1 <= K; ++k1)
            for (int q = 0; q < nk2; ++q) {
                int k2 = q - K;
                if (k1 == 0 && k2 < 0) continue;
                if (std::abs(k1) + std::abs(k2) > K) continue;
                // Rotation invariance: |k1+k2| <= order with equal parity.
                int ch = k1 + k2;
                if (std::abs(ch) > order || (order - ch) % 2 != 0) continue;
                bool zero_k = (k1 == 0 && k2 == 0);
                if (zero_k && par == Parity::sin) continue;
                std::size_t idx = (static_cast<std::size_t>(i) * nk1 + k1) * nk2 + q;
                std::complex<double> c = acc[idx] * nrm, cc = acc_c[idx] * nrmc;
                double fac = zero_k ? 1.0 : 2.0;
                double val = par == Parity::cos ? fac * c.real() : -fac * c.imag();
                double valc = par == Parity::cos ? fac * cc.real() : -fac * cc.imag();
                double rad = std::fabs(val - valc) + floor_rel * fac * smax[i];
                if (val == 0.0 && rad == 0.0) continue;
                out.add_raw(e[sD2], pe, {k1, k2}, par, Interval::pm(val, rad));
            }
    }
    return out.finish();
}

PoissonSeries assemble_htf(const OrbitalConfig& cfg, const SystemFrame& frame, const ExpansionParams& params,
                           const DisturbingOptions& opt) {
    PoissonSeries h = kepler_series(frame) + disturbing_series(cfg, frame, params, opt);
    h.set_caps(htf_caps(params));
    return h;
}

}  // namespace rkam
