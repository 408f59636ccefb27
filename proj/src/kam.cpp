#include "rkam/kam.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>

namespace rkam {

namespace {

int p_degree(PsKey k) { return KeyCodec::exp(k, 0) + KeyCodec::exp(k, 1); }
bool angle_free(PsKey k) { return KeyCodec::harm(k, 0) == 0 && KeyCodec::harm(k, 1) == 0; }

// Terms of the translated layout with the exponents and harmonic unpacked.
struct Term {
    std::uint32_t idx;
    std::int16_t a[2];
    std::int16_t k[2];
    Parity par;
    Interval c;
};
using Col = std::vector<Term>;

int deg(const Term& t) { return t.a[0] + t.a[1]; }
bool angle_free(const Term& t) { return t.k[0] == 0 && t.k[1] == 0; }

// Dense accumulator over (p-monomial, k1, k2, parity) with |k|_1 <= K.
class Accumulator {
public:
    Accumulator(int max_pdeg, int max_k) : D_(max_pdeg), K_(max_k), W_(2 * max_k + 1) {
        mono_.assign((D_ + 1) * (D_ + 1), -1);
        for (int d = 0; d <= D_; ++d)
            for (int a1 = d; a1 >= 0; --a1) {
                mono_[a1 * (D_ + 1) + (d - a1)] = n_mono_++;
            }
        v_.resize(static_cast<std::size_t>(n_mono_) * W_ * W_ * 2);
        used_.assign(v_.size(), 0);
    }
    int max_pdeg() const { return D_; }
    int max_k() const { return K_; }

    std::uint32_t index(int a1, int a2, int k1, int k2, Parity par) const {
        int m = mono_[a1 * (D_ + 1) + a2];
        return static_cast<std::uint32_t>(((m * W_ + (k1 + K_)) * W_ + (k2 + K_)) * 2 + static_cast<int>(par));
    }

    // c * trig(h) with h not yet canonical; drops sin at h = 0 and |h| > K.
    void emit(int a1, int a2, int h1, int h2, Parity par, Interval c) {
        int first = h1 != 0 ? h1 : h2;
        if (first == 0) {
            if (par == Parity::sin) return;
        } else if (first < 0) {
            h1 = -h1;
            h2 = -h2;
            if (par == Parity::sin) c = -c;
        }
        if (std::abs(h1) + std::abs(h2) > K_) return;
        add(Term{index(a1, a2, h1, h2, par), {static_cast<std::int16_t>(a1), static_cast<std::int16_t>(a2)},
                 {static_cast<std::int16_t>(h1), static_cast<std::int16_t>(h2)}, par, c});
    }

    void add(const Term& t) {
        if (!used_[t.idx]) {
            used_[t.idx] = 1;
            touched_.push_back(t);
            v_[t.idx] = t.c;
        } else {
            v_[t.idx] += t.c;
        }
    }

    void add_col(const Col& c) {
        for (const auto& t : c) add(t);
    }

    // Collected terms sorted by index; exact zeros are dropped.
    Col harvest() {
        std::sort(touched_.begin(), touched_.end(), [](const Term& x, const Term& y) { return x.idx < y.idx; });
        Col out;
        out.reserve(touched_.size());
        for (auto& t : touched_) {
            used_[t.idx] = 0;
            t.c = v_[t.idx];
            if (!t.c.is_zero()) out.push_back(t);
        }
        touched_.clear();
        return out;
    }

private:
    int D_, K_, W_;
    int n_mono_ = 0;
    std::vector<int> mono_;
    std::vector<Interval> v_;
    std::vector<std::uint8_t> used_;
    std::vector<Term> touched_;
};

Col to_col(const PoissonSeries& s, const Accumulator& acc) {
    Col out;
    out.reserve(s.size());
    for (const auto& [key, c] : s.entries()) {
        int a1 = KeyCodec::exp(key, 0), a2 = KeyCodec::exp(key, 1);
        int k1 = KeyCodec::harm(key, 0), k2 = KeyCodec::harm(key, 1);
        Parity par = KeyCodec::parity(key);
        out.push_back({acc.index(a1, a2, k1, k2, par),
                       {static_cast<std::int16_t>(a1), static_cast<std::int16_t>(a2)},
                       {static_cast<std::int16_t>(k1), static_cast<std::int16_t>(k2)}, par, c});
    }
    std::sort(out.begin(), out.end(), [](const Term& x, const Term& y) { return x.idx < y.idx; });
    return out;
}

PoissonSeries to_series(const Col& c, const TruncationCaps& caps) {
    PoissonSeries::Builder b(VariableLayout::translated(), caps);
    for (const auto& t : c) b.add(KeyCodec::pack(0, {t.a[0], t.a[1], 0, 0, 0, 0}, {t.k[0], t.k[1]}, t.par), t.c);
    return b.finish();
}

template <class Pred>
Col filter(const Col& c, Pred keep) {
    Col out;
    for (const auto& t : c)
        if (keep(t)) out.push_back(t);
    return out;
}

struct TrigProd {
    Parity par;
    int s_minus;
    int s_plus;
};

TrigProd trig_prod(Parity p1, Parity p2) {
    if (p1 == Parity::cos && p2 == Parity::cos) return {Parity::cos, 1, 1};
    if (p1 == Parity::sin && p2 == Parity::sin) return {Parity::cos, 1, -1};
    if (p1 == Parity::sin && p2 == Parity::cos) return {Parity::sin, 1, 1};
    return {Parity::sin, -1, 1};
}

Parity flip(Parity p) { return p == Parity::cos ? Parity::sin : Parity::cos; }

// A term of p-degree j >= 2 in column t reaches the blocks that feed the
// generating functions only through j - 1 brackets with chi1 of steps
// >= r_next, each moving it up by at least r_next columns.
bool reachable(const Term& t, int column, int r_next, int r_bar) {
    int j = deg(t);
    return j < 2 || column + (j - 1) * r_next <= r_bar;
}

// {f, chi} scaled by `scale` into column `column`.
Col bracket(const Col& f, const Col& chi, const Interval& scale, int column, int r_next, int r_bar,
            Accumulator& acc) {
    const int D = acc.max_pdeg();
    for (const auto& x : f) {
        for (const auto& y : chi) {
            bool have_cd = false;
            Interval cd;
            for (int i = 0; i < 2; ++i) {
                // d/dq_i f * d/dp_i chi - d/dp_i f * d/dq_i chi
                int t1 = x.k[i] * y.a[i];
                int t2 = x.a[i] * y.k[i];
                if (t1 == 0 && t2 == 0) continue;
                int a1 = x.a[0] + y.a[0] - (i == 0);
                int a2 = x.a[1] + y.a[1] - (i == 1);
                if (a1 < 0 || a2 < 0 || a1 + a2 > D) continue;
                int j = a1 + a2;
                if (j >= 2 && column + (j - 1) * r_next > r_bar) continue;
                int sa = x.par == Parity::cos ? -1 : 1;
                int sb = y.par == Parity::cos ? -1 : 1;
                TrigProd p1 = trig_prod(flip(x.par), y.par);
                TrigProd p2 = trig_prod(x.par, flip(y.par));
                int nm = t1 * sa * p1.s_minus - t2 * sb * p2.s_minus;
                int np = t1 * sa * p1.s_plus - t2 * sb * p2.s_plus;
                if (nm == 0 && np == 0) continue;
                if (!have_cd) {
                    cd = x.c * y.c;
                    have_cd = true;
                }
                if (nm != 0) acc.emit(a1, a2, x.k[0] - y.k[0], x.k[1] - y.k[1], p1.par, cd * Interval(nm / 2.0));
                if (np != 0) acc.emit(a1, a2, x.k[0] + y.k[0], x.k[1] + y.k[1], p1.par, cd * Interval(np / 2.0));
            }
        }
    }
    Col out = acc.harvest();
    if (!(scale.is_point() && scale.lo == 1.0))
        for (auto& t : out) t.c = scale * t.c;
    return out;
}

// exp L_chi applied column by column; chi sits in column r_chi, so L_chi^n
// maps column s to s + n r_chi. omega.p is transformed as part of column 0.
// Terms that can no longer reach a generating function (see reachable) are
// not produced.
std::vector<Col> lie_columns(const std::vector<Col>& col, const std::array<Interval, 2>& omega, const Col& chi,
                             int r_chi, int r_next, int r_bar, Accumulator& acc) {
    if (chi.empty()) return col;
    std::vector<std::vector<Col>> extra(col.size());
    for (int s0 = 0; s0 + r_chi <= r_bar; ++s0) {
        Col term = col[s0];
        if (s0 == 0) {
            for (int i = 0; i < 2; ++i) acc.emit(i == 0, i == 1, 0, 0, Parity::cos, omega[i]);
            acc.add_col(term);
            term = acc.harvest();
        }
        for (int n = 1; s0 + n * r_chi <= r_bar && !term.empty(); ++n) {
            const int t = s0 + n * r_chi;
            term = bracket(term, chi, Interval(1.0) / Interval(static_cast<double>(n)), t, r_next, r_bar, acc);
            extra[t].push_back(term);
        }
    }
    std::vector<Col> out(col.size());
    for (std::size_t t = 0; t < col.size(); ++t) {
        if (extra[t].empty()) {
            out[t] = col[t];
            continue;
        }
        acc.add_col(col[t]);
        for (const auto& e : extra[t]) acc.add_col(e);
        out[t] = acc.harvest();
    }
    return out;
}

void prune(std::vector<Col>& col, int r_next, int r_bar) {
    for (std::size_t s = 0; s < col.size(); ++s)
        col[s] = filter(col[s], [&](const Term& t) { return reachable(t, static_cast<int>(s), r_next, r_bar); });
}

// Removes the selected terms of a column, recording whether each contained 0.
template <class Pred>
Col zero_removed(const Col& c, Pred removed, KamState& st) {
    Col out;
    for (const auto& t : c) {
        if (removed(t)) {
            st.max_residual = std::fmax(st.max_residual, t.c.mag());
            if (!t.c.contains_zero()) st.residuals_contain_zero = false;
            continue;
        }
        out.push_back(t);
    }
    return out;
}

void guard_overflow(const KamState& st) {
    for (std::size_t s = 0; s < st.col.size(); ++s) {
        double m = ps_max_mag(st.col[s]);
        if (!(m <= kOverflowGuard))
            throw OverflowAbort("coefficient magnitude exceeds guard in column " + std::to_string(s) + " at step " +
                                std::to_string(st.r));
    }
    for (const auto& w : st.omega)
        if (!(w.mag() <= kOverflowGuard)) throw OverflowAbort("frequency exceeds guard at step " + std::to_string(st.r));
}

double norm_upper(const PoissonSeries& s) { return ps_norm(s).hi; }

int max_p_degree(const std::vector<PoissonSeries>& col) {
    int d = 1;
    for (const auto& c : col)
        for (const auto& [key, v] : c.entries()) d = std::max(d, p_degree(key));
    return d;
}

}  // namespace

KamState make_kam_state(const PoissonSeries& h0, int r_bar) {
    if (h0.layout().kind != LayoutKind::translated) throw LayoutMismatch();
    if (r_bar < 1) throw std::invalid_argument("r_bar must be at least 1");
    KamState st;
    st.r_bar = r_bar;
    TruncationCaps caps = h0.caps();
    caps.max_trig_degree = 2 * r_bar;
    std::vector<PoissonSeries::Builder> b;
    for (int s = 0; s <= r_bar; ++s) b.emplace_back(VariableLayout::translated(), caps);
    st.omega = {Interval(0.0), Interval(0.0)};
    for (const auto& [key, c] : h0.entries()) {
        int pd = p_degree(key);
        if (angle_free(key)) {
            if (pd == 0) continue;
            if (pd == 1) {
                st.omega[KeyCodec::exp(key, 0) == 1 ? 0 : 1] += c;
                continue;
            }
            b[0].add(key, c);
            continue;
        }
        int s = (h0.trig_degree(key) + 1) / 2;
        if (s <= r_bar) b[s].add(key, c);
    }
    for (auto& x : b) st.col.push_back(x.finish());
    return st;
}

void check_nonresonance(const std::array<Interval, 2>& omega, int max_k, int r) {
    for (int k1 = 0; k1 <= max_k; ++k1)
        for (int k2 = -max_k; k2 <= max_k; ++k2) {
            if (std::abs(k1) + std::abs(k2) > max_k) continue;
            if (k1 == 0 && k2 <= 0) continue;
            Interval d = Interval(k1) * omega[0] + Interval(k2) * omega[1];
            if (d.contains_zero()) throw ResonanceAbort({k1, k2}, r, d);
        }
}

PoissonSeries solve_kolmogorov_homological(const PoissonSeries& f, const std::array<Interval, 2>& omega, int r) {
    // {omega.p, chi} = -omega . d chi/dq, so L_chi(omega.p) cancels f - <f>.
    PoissonSeries::Builder out(f.layout(), f.caps());
    for (const auto& [key, c] : f.entries()) {
        auto k = KeyCodec::harms(key);
        if (k[0] == 0 && k[1] == 0) continue;
        Interval div = Interval(k[0]) * omega[0] + Interval(k[1]) * omega[1];
        if (div.contains_zero()) throw ResonanceAbort(k, r, div);
        Interval v = c / div;
        auto e = KeyCodec::exps(key);
        if (KeyCodec::parity(key) == Parity::cos) out.add(KeyCodec::pack(0, e, k, Parity::sin), v);
        else out.add(KeyCodec::pack(0, e, k, Parity::cos), -v);
    }
    return out.finish();
}

KamState kolmogorov_step(const KamState& in) {
    KamState st = in;
    const int r = in.r + 1;
    if (r > in.r_bar) throw std::invalid_argument("kolmogorov_step beyond r_bar");
    st.r = r;
    check_nonresonance(st.omega, 2 * r, r);

    const TruncationCaps caps = st.col[0].caps();
    int D = caps.max_action_degree >= 0 ? caps.max_action_degree : max_p_degree(st.col);
    Accumulator acc(std::max(D, 1), caps.max_trig_degree >= 0 ? caps.max_trig_degree : 2 * st.r_bar);
    std::vector<Col> col;
    for (const auto& c : st.col) col.push_back(to_col(c, acc));
    prune(col, r, st.r_bar);

    PoissonSeries f0 = to_series(filter(col[r], [](const Term& t) { return deg(t) == 0; }), caps);
    PoissonSeries chi1 = solve_kolmogorov_homological(f0, st.omega, r);
    st.chi1_norms.push_back(norm_upper(chi1));
    col = lie_columns(col, st.omega, to_col(chi1, acc), r, r, st.r_bar, acc);
    col[r] = zero_removed(col[r], [](const Term& t) { return deg(t) == 0 && !angle_free(t); }, st);

    PoissonSeries f1 = to_series(filter(col[r], [](const Term& t) { return deg(t) == 1; }), caps);
    PoissonSeries chi2 = solve_kolmogorov_homological(f1, st.omega, r);
    st.chi2_norms.push_back(norm_upper(chi2));
    col = lie_columns(col, st.omega, to_col(chi2, acc), r, r + 1, st.r_bar, acc);
    col[r] = zero_removed(col[r], [](const Term& t) { return deg(t) == 1 && !angle_free(t); }, st);

    // <f1> joins omega.p; angle-free constants carry no dynamics.
    Col keep;
    for (const auto& t : col[r]) {
        if (angle_free(t) && deg(t) == 1) {
            st.omega[t.a[0] == 1 ? 0 : 1] += t.c;
            continue;
        }
        keep.push_back(t);
    }
    col[r] = std::move(keep);
    for (auto& c : col) c = filter(c, [](const Term& t) { return !(angle_free(t) && deg(t) == 0); });
    prune(col, r + 1, st.r_bar);
    for (std::size_t s = 0; s < col.size(); ++s) st.col[s] = to_series(col[s], caps);
    guard_overflow(st);
    if (!(st.chi1_norms.back() <= kOverflowGuard) || !(st.chi2_norms.back() <= kOverflowGuard))
        throw OverflowAbort("generating function norm exceeds guard at step " + std::to_string(r));
    return st;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::convergent: return "convergent";
        case Verdict::nonconvergent: return "nonconvergent";
        case Verdict::aborted: return "aborted";
    }
    return "?";
}

std::string to_string(AbortReason a) {
    switch (a) {
        case AbortReason::none: return "";
        case AbortReason::resonance: return "resonance";
        case AbortReason::norm_blowup: return "norm_blowup";
        case AbortReason::degenerate: return "degenerate";
    }
    return "?";
}

Verdict classify_convergence(const std::vector<double>& norms, int r_bar, bool strict) {
    if (norms.empty()) throw std::invalid_argument("classify_convergence: empty norm sequence");
    for (double n : norms)
        if (!(n >= 0.0)) throw std::invalid_argument("classify_convergence: negative or NaN norm");
    if (static_cast<int>(norms.size()) < r_bar) return Verdict::nonconvergent;
    const double n1 = norms[0];
    if (n1 == 0.0) {
        for (int r = 0; r < r_bar; ++r)
            if (norms[r] != 0.0) return Verdict::nonconvergent;
        return Verdict::convergent;
    }
    bool violated_last = false;
    for (int r = 1; r <= r_bar; ++r) {
        bool v = norms[r - 1] / n1 > std::pow(0.9, r - 1);
        if (v && strict) return Verdict::nonconvergent;
        violated_last = v;
    }
    if (violated_last) return Verdict::nonconvergent;
    if (norms[r_bar - 1] > 1e-9 * n1) return Verdict::nonconvergent;
    return Verdict::convergent;
}

ConvergenceReport run_normalization(const PoissonSeries& h0, int r_bar, bool strict) {
    ConvergenceReport rep;
    KamState st = make_kam_state(h0, r_bar);
    rep.final_omega = st.omega;
    try {
        while (st.r < r_bar) st = kolmogorov_step(st);
    } catch (const ResonanceAbort& e) {
        rep.abort_reason = AbortReason::resonance;
        rep.detail = e.what();
    } catch (const OverflowAbort& e) {
        rep.abort_reason = AbortReason::norm_blowup;
        rep.detail = e.what();
    }
    rep.r_reached = st.r;
    rep.chi1_norms = st.chi1_norms;
    rep.chi2_norms = st.chi2_norms;
    rep.final_omega = st.omega;
    rep.residuals_contain_zero = st.residuals_contain_zero;
    if (rep.abort_reason != AbortReason::none) rep.verdict = Verdict::aborted;
    else rep.verdict = classify_convergence(rep.chi2_norms, r_bar, strict);
    return rep;
}

}  // namespace rkam
