#include "rkam/secular.hpp"

#include <map>

namespace rkam {

namespace {

using Harm = std::array<int, 2>;

std::map<Harm, PoissonSeries> split_by_harmonic(const PoissonSeries& h) {
    std::map<Harm, PoissonSeries::Builder> parts;
    for (const auto& [key, c] : h.entries()) {
        Harm k = KeyCodec::harms(key);
        auto it = parts.find(k);
        if (it == parts.end()) it = parts.emplace(k, PoissonSeries::Builder(h.layout(), h.caps())).first;
        it->second.add(key, c);
    }
    std::map<Harm, PoissonSeries> out;
    for (auto& [k, b] : parts) out.emplace(k, b.finish());
    return out;
}

}  // namespace

PoissonSeries solve_fast_homological(const PoissonSeries& f, const std::array<Interval, 2>& n) {
    if (f.layout().kind != LayoutKind::fast) throw LayoutMismatch();
    PoissonSeries::Builder out(f.layout(), f.caps());
    for (const auto& [key, c] : f.entries()) {
        if (KeyCodec::exp(key, 0) != 0 || KeyCodec::exp(key, 1) != 0)
            throw std::invalid_argument("solve_fast_homological: right-hand side depends on L");
        Harm k = KeyCodec::harms(key);
        if (k[0] == 0 && k[1] == 0) continue;
        Interval div = Interval(k[0]) * n[0] + Interval(k[1]) * n[1];
        if (div.contains_zero()) throw SmallDivisor(k, div);
        // n.d/dlam [c/div sin] = c cos ; n.d/dlam [-c/div cos] = c sin
        Parity par = KeyCodec::parity(key);
        Interval v = c / div;
        std::array<int, 6> e = KeyCodec::exps(key);
        if (par == Parity::cos) out.add(KeyCodec::pack(KeyCodec::d2(key), e, k, Parity::sin), v);
        else out.add(KeyCodec::pack(KeyCodec::d2(key), e, k, Parity::cos), -v);
    }
    return out.finish();
}

PoissonSeries averaged_bracket(const PoissonSeries& a, const PoissonSeries& b, BracketBlock block) {
    if (a.layout() != b.layout()) throw LayoutMismatch();
    auto pa = split_by_harmonic(a);
    auto pb = split_by_harmonic(b);
    PoissonSeries::Builder out(a.layout(), a.caps());
    for (const auto& [k, sa] : pa) {
        auto it = pb.find(k);
        if (it == pb.end()) continue;
        out.add_series(ps_average(ps_poisson(sa, it->second, block)), Interval(1.0));
    }
    return out.finish();
}

PoissonSeries fast_to_cartesian(const PoissonSeries& h, const TruncationCaps& caps) {
    PoissonSeries::Builder out(VariableLayout::cartesian(), caps);
    for (const auto& [key, c] : h.entries()) {
        auto e = KeyCodec::exps(key);
        Harm k = KeyCodec::harms(key);
        if (e[0] != 0 || e[1] != 0 || k[0] != 0 || k[1] != 0) continue;
        if (KeyCodec::parity(key) != Parity::cos) continue;
        std::array<int, 6> ce{e[2], e[3], e[4], e[5], 0, 0};
        PsKey ck = KeyCodec::pack(KeyCodec::d2(key), ce, {0, 0}, Parity::cos);
        if (out.proto().within_caps(ck)) out.add(ck, c);
    }
    return out.finish();
}

SecularModel build_secular(const PoissonSeries& htf, const SystemFrame& frame, const ExpansionParams& params,
                          bool order_two) {
    if (htf.layout().kind != LayoutKind::fast) throw LayoutMismatch();
    auto l_degree = [](PsKey k) { return KeyCodec::exp(k, 0) + KeyCodec::exp(k, 1); };
    auto is_kepler = [&](PsKey k) {
        // angle-free, eccentricity-free, D2-free terms in L only
        auto e = KeyCodec::exps(k);
        Harm h = KeyCodec::harms(k);
        return h[0] == 0 && h[1] == 0 && e[2] + e[3] + e[4] + e[5] == 0 && KeyCodec::d2(k) == 0 &&
               l_degree(k) > 0;
    };
    PoissonSeries f = ps_filter(htf, [&](PsKey k) { return !is_kepler(k); });
    PoissonSeries h2 = ps_filter(htf, [&](PsKey k) { return is_kepler(k) && l_degree(k) == 2; });
    PoissonSeries f0 = ps_filter(f, [&](PsKey k) { return l_degree(k) == 0; });
    PoissonSeries f1 = ps_filter(f, [&](PsKey k) { return l_degree(k) == 1; });
    auto nonavg = [](PsKey k) {
        Harm h = KeyCodec::harms(k);
        return h[0] != 0 || h[1] != 0;
    };
    PoissonSeries f0t = ps_filter(f0, nonavg);
    PoissonSeries f1t = ps_filter(f1, nonavg);

    SecularModel m;
    m.n_s = params.N_S;
    m.chi = solve_fast_homological(f0t, frame.n);

    // Second-order terms that survive the average at L = 0.
    PoissonSeries h2chi = ps_poisson(h2, m.chi, BracketBlock::fast);
    PoissonSeries::Builder acc(htf.layout(), htf.caps());
    acc.add_series(ps_average(f0), Interval(1.0));
    if (order_two) {
        acc.add_series(averaged_bracket(f0t, m.chi, BracketBlock::secular), Interval(0.5));
        acc.add_series(averaged_bracket(f1t, m.chi, BracketBlock::fast), Interval(1.0));
        acc.add_series(averaged_bracket(h2chi, m.chi, BracketBlock::fast), Interval(0.5));
    }
    PoissonSeries avg = acc.finish();
    avg = ps_zero_symbols(avg, {true, true, false, false, false, false});

    TruncationCaps caps{-1, 2 * params.N_S, -1, -1};
    PoissonSeries cart = fast_to_cartesian(avg, caps);
    // Constants in D2 alone do not affect the dynamics.
    m.hsec = ps_filter(cart, [&](PsKey k) { return cart.ecc_degree(k) > 0; });
    return m;
}

}  // namespace rkam
