#include "rkam/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace rkam {

D2Grid D2Grid::uniform(double lo, double hi, int n, double half_width) {
    if (n < 1) throw ValidationError("D2 grid needs at least one cell");
    if (!(half_width >= 0.0)) throw ValidationError("D2 cell half-width must be non-negative");
    if (!(lo <= hi)) throw ValidationError("D2 grid needs lo <= hi");
    D2Grid g;
    g.source = "uniform";
    for (int i = 0; i < n; ++i) {
        double m = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        g.cells.emplace_back(m - half_width, m + half_width);
    }
    return g;
}

D2Grid D2Grid::explicit_list(std::vector<Interval> cells) {
    D2Grid g;
    g.source = "explicit";
    std::stable_sort(cells.begin(), cells.end(),
                     [](const Interval& a, const Interval& b) { return a.mid() < b.mid(); });
    g.cells = std::move(cells);
    return g;
}

void D2Grid::validate() const {
    if (cells.empty()) throw ValidationError("D2 grid is empty");
    std::string bad;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!(cells[i].lo > 0.0 && cells[i].hi < 2.0))
            bad += " cell " + std::to_string(i) + " outside (0, 2);";
        if (i > 0 && cells[i].mid() < cells[i - 1].mid()) bad += " cell " + std::to_string(i) + " out of order;";
    }
    if (!bad.empty()) throw ValidationError("invalid D2 grid:" + bad);
}

Interval d2_to_mutual_inclination(const Interval& d2, const OrbitalConfig& cfg, const SystemFrame& frame) {
    // With Xi_j = Lambda_j sqrt(1 - e_j^2) and C^2 = (L1 + L2)^2 - D2 L1 L2,
    // (C^2 - Xi1^2 - Xi2^2)/(2 Xi1 Xi2) reduces to the form below, which is
    // exact at e = 0.
    const Interval one(1.0);
    Interval e1s = iv_sqr(cfg.e1), e2s = iv_sqr(cfg.e2);
    Interval r12 = frame.Lambda[0] / frame.Lambda[1];
    Interval num = Interval(2.0) - d2 + r12 * e1s + e2s / r12;
    Interval den = Interval(2.0) * iv_sqrt(one - e1s) * iv_sqrt(one - e2s);
    return iv_acos(num / den);
}

OrbitalConfig nominal_elements(const OrbitalConfig& cfg) {
    OrbitalConfig c = cfg;
    c.e1 = Interval(cfg.e1.mid());
    c.e2 = Interval(cfg.e2.mid());
    c.w1 = Interval(cfg.w1.mid());
    c.w2 = Interval(cfg.w2.mid());
    return c;
}

SymbolicModel build_symbolic_model(const OrbitalConfig& cfg, const PipelineParams& params) {
    params.expansion.validate();
    SymbolicModel m;
    m.frame = poincare_frame(cfg);
    PoissonSeries htf = assemble_htf(cfg, m.frame, params.expansion);
    m.htf_terms = htf.size();
    m.secular = build_secular(htf, m.frame, params.expansion);
    const OrbitalConfig start = params.elements == ElementMode::nominal ? nominal_elements(cfg) : cfg;
    m.pre = prenormalize(m.secular.hsec, start, m.frame, params.s_max);
    return m;
}

ConvergenceReport run_cell(const PoissonSeries& h3, const std::array<Interval, 2>& istar, const Interval& d2,
                           const ScanOptions& opt) {
    try {
        PoissonSeries h0 = translate_and_fix_d2(h3, istar, d2, opt.action_cap);
        return run_normalization(h0, opt.r_bar, opt.strict);
    } catch (const NegativeActionCenter& e) {
        ConvergenceReport r;
        r.verdict = Verdict::aborted;
        r.abort_reason = AbortReason::degenerate;
        r.detail = e.what();
        return r;
    }
}

std::vector<ScanResult> run_scan(const PoissonSeries& h3, const std::array<Interval, 2>& istar,
                                 const OrbitalConfig& cfg, const SystemFrame& frame, const D2Grid& grid,
                                 const ScanOptions& opt) {
    grid.validate();
    const std::size_t n = grid.cells.size();
    std::vector<ScanResult> out(n);
    auto work = [&](std::size_t i) {
        ScanResult& r = out[i];
        r.d2 = grid.cells[i];
        try {
            r.report = run_cell(h3, istar, r.d2, opt);
        } catch (const std::exception& e) {
            r.report.verdict = Verdict::aborted;
            r.report.abort_reason = AbortReason::degenerate;
            r.report.detail = e.what();
            r.error = e.what();
        }
        try {
            r.imut = d2_to_mutual_inclination(r.d2, cfg, frame);
            r.imut_mid = r.imut->mid();
        } catch (const DomainError& e) {
            r.imut.reset();
            r.imut_mid = std::numeric_limits<double>::quiet_NaN();
            if (r.error.empty()) r.error = e.what();
        }
    };
    const int workers = std::max(1, std::min<int>(opt.workers, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) work(i);
        });
    for (auto& t : pool) t.join();
    return out;
}

std::vector<ScanResult> run_scan(const SymbolicModel& model, const OrbitalConfig& cfg, const D2Grid& grid,
                                 const ScanOptions& opt) {
    return run_scan(model.pre.birkhoff.h, model.pre.istar, cfg, model.frame, grid, opt);
}

ScanSummary summarize(const std::vector<ScanResult>& results) {
    ScanSummary s;
    s.n_cells = static_cast<int>(results.size());
    for (const auto& r : results) {
        if (r.report.verdict != Verdict::convergent) continue;
        ++s.n_convergent;
        double m = r.d2.mid();
        if (!s.max_convergent_d2_mid || m > *s.max_convergent_d2_mid) {
            s.max_convergent_d2_mid = m;
            if (r.imut) s.max_stable_imut_deg = r.imut_mid * 180.0 / M_PI;
            else s.max_stable_imut_deg.reset();
        }
    }
    return s;
}

}  // namespace rkam
