#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "rkam/cli.hpp"
#include "rkam/hamexp.hpp"
#include "rkam/oracles.hpp"

using namespace rkam;

namespace {

OrbitalConfig synthetic(double m = 1e-3, double e = 0.01) {
    OrbitalConfig c;
    c.name = "synthetic";
    c.m0 = 1.0;
    c.m1 = m;
    c.m2 = m;
    c.a1 = 0.4;
    c.a2 = 1.0;
    c.e1 = Interval(e);
    c.e2 = Interval(e);
    c.w1 = Interval(0.3);
    c.w2 = Interval(2.1);
    return c;
}

std::array<double, 6> at_l0(const std::array<double, 4>& x) { return {0, 0, x[0], x[1], x[2], x[3]}; }

}  // namespace

TEST_CASE("third Kepler law normalization") {
    OrbitalConfig c = synthetic(1e-12);
    c.a1 = 1.0;
    c.a2 = 2.0;
    SystemFrame f = poincare_frame(c);
    CHECK(std::fabs(f.n[0].mid() - 2 * M_PI) < 1e-9);
    CHECK(f.n[0].width() < 1e-12);
    CHECK(f.n[0].mid() > f.n[1].mid());
}

TEST_CASE("circular orbits start at the origin") {
    OrbitalConfig c = synthetic(1e-3, 0.0);
    auto x = initial_secular_point(c, poincare_frame(c));
    for (const auto& v : x) {
        CHECK(v.lo == 0.0);
        CHECK(v.hi == 0.0);
    }
}

TEST_CASE("HD 40307 period ratio is close to 2:1") {
    OrbitalConfig c = catalog_entry("HD40307").elements.to_config("HD40307");
    SystemFrame f = poincare_frame(c);
    double ratio = (f.n[0] / f.n[1]).mid();
    CHECK(std::fabs(ratio / 2.13 - 1.0) < 0.05);
}

TEST_CASE("Kepler part") {
    OrbitalConfig c = synthetic();
    SystemFrame f = poincare_frame(c);
    PoissonSeries k = kepler_series(f);
    const auto FA = VariableLayout::fast();
    for (int j = 0; j < 2; ++j) {
        std::array<int, 6> e{};
        e[j] = 1;
        Interval lin = k.coeff(KeyCodec::pack(0, e, {0, 0}, Parity::cos));
        CHECK(lin.overlaps(f.n[j]));
        CHECK(std::fabs(lin.mid() - f.n[j].mid()) <= 1e-14 * f.n[j].mid());
        e[j] = 2;
        Interval quad = k.coeff(KeyCodec::pack(0, e, {0, 0}, Parity::cos));
        Interval expect = Interval(-1.5) * f.n[j] / f.Lambda[j];
        CHECK(quad.overlaps(expect));
    }
    CHECK(k.coeff(KeyCodec::pack(0, {1, 1, 0, 0, 0, 0}, {0, 0}, Parity::cos)).is_zero());
    CHECK(k.coeff(KeyCodec::pack(0, {}, {0, 0}, Parity::cos)).is_zero());
    CHECK(k.layout() == FA);
    CHECK(oracle::kepler_quadratic(c).pass);
}

TEST_CASE("Laplace coefficients") {
    CHECK(laplace_coeff(0.5, 0, 0.0).contains(2.0));
    CHECK(laplace_coeff(0.5, 1, 0.0).is_zero());
    Interval b = laplace_coeff(0.5, 0, 0.5);
    double q = oracle::laplace_quadrature(0.5, 0, 0.5);
    CHECK(b.width() <= 1e-12);
    CHECK(b.lo - 1e-15 <= q);
    CHECK(q <= b.hi + 1e-15);
    for (int j = 0; j < 6; ++j) {
        double qj = oracle::laplace_quadrature(1.5, j, 0.6);
        CHECK(laplace_coeff(1.5, j, 0.6).overlaps(Interval(qj) + Interval(-1e-14, 1e-14) * Interval(qj)));
    }
    CHECK_THROWS_AS(laplace_coeff(0.5, 0, 0.95), AlphaOutOfRange);
    CHECK_THROWS_AS(laplace_coeff(0.5, 0, -0.1), AlphaOutOfRange);
    CHECK(oracle::laplace_table_vs_quadrature(0.6, 2, 8, false).pass);
    CHECK_FALSE(oracle::laplace_table_vs_quadrature(0.6, 2, 8, true).pass);
}

TEST_CASE("circular coplanar slice") {
    OrbitalConfig c = catalog_entry("HD40307").elements.to_config("HD40307");
    CHECK(oracle::circular_slice(c, false).pass);
    CHECK_FALSE(oracle::circular_slice(c, true).pass);
}

TEST_CASE("D'Alembert structure and caps of the HD 40307 expansion") {
    OrbitalConfig c = catalog_entry("HD40307").elements.to_config("HD40307");
    SystemFrame f = poincare_frame(c);
    ExpansionParams p = ExpansionParams::make(c, 6, 4, {1, -2});
    PoissonSeries h = assemble_htf(c, f, p);
    PoissonSeries d = h - kepler_series(f);
    REQUIRE(!d.empty());
    CHECK(h.size() < 200000);
    int bad = 0;
    for (const auto& [key, v] : d.entries()) {
        auto k = KeyCodec::harms(key);
        int order = d.total_order(key);
        // leftovers of the Kepler subtraction
        if (k[0] == 0 && k[1] == 0 && order == 0 && v.contains_zero()) continue;
        int need = std::abs(k[0] + k[1]);
        if (order < need || (order - need) % 2 != 0) ++bad;
        if (std::abs(k[0]) + std::abs(k[1]) > p.K_F) ++bad;
        if (order > 2 * p.N_S) ++bad;
        if (KeyCodec::exp(key, 0) + KeyCodec::exp(key, 1) > 1) ++bad;
        if (!h.within_caps(key)) ++bad;
    }
    CHECK(bad == 0);
}

TEST_CASE("pointwise evaluation against the exact Hamiltonian") {
    OrbitalConfig c = synthetic();
    SystemFrame f = poincare_frame(c);
    ExpansionParams p = ExpansionParams::make(c, 30, 3, {2, -1});
    PoissonSeries d = disturbing_series(c, f, p);
    const double s1 = std::sqrt(f.Lambda[0].mid()), s2 = std::sqrt(f.Lambda[1].mid());
    const std::array<std::array<double, 4>, 3> pts = {{{0.01 * s1, -0.004 * s1, 0.006 * s2, 0.008 * s2},
                                                       {-0.008 * s1, 0.0, 0.0, -0.01 * s2},
                                                       {0.0, 0.0, 0.0, 0.0}}};
    const std::array<std::array<double, 2>, 3> ang = {{{0.4, 2.5}, {-1.3, 0.2}, {3.0, 1.0}}};
    const double d2 = 0.002;
    for (int i = 0; i < 3; ++i) {
        double series = d.eval(at_l0(pts[i]), ang[i], d2);
        double exact = oracle::perturbation_exact(c, f, pts[i], d2, ang[i][0], ang[i][1]);
        CHECK(std::fabs(series - exact) <= 1e-5 * std::fabs(exact));
    }
}

TEST_CASE("massless planets leave only the Kepler part") {
    OrbitalConfig c = synthetic(0.0);
    SystemFrame f = poincare_frame(c);
    ExpansionParams p = ExpansionParams::make(c, 6, 4, {2, -1});
    PoissonSeries h = assemble_htf(c, f, p);
    PoissonSeries k = kepler_series(f);
    REQUIRE(h.size() == k.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        CHECK(h.entries()[i].first == k.entries()[i].first);
        CHECK(identical(h.entries()[i].second, k.entries()[i].second));
    }
}

TEST_CASE("validation") {
    OrbitalConfig c = synthetic();
    c.a1 = 2.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = synthetic();
    c.e1 = Interval(0.3);
    CHECK_THROWS_AS(c.validate(), ValidationError);
    CHECK_NOTHROW(c.validate(true));
    c = synthetic();
    c.m1 = -1e-3;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    ExpansionParams p;
    p.K_F = 2;
    p.resonance = {2, -1};
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.K_F = 6;
    p.N_S = 1;
    p.resonance = {3, -1};
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.N_S = 2;
    CHECK_NOTHROW(p.validate());
}
