#include <doctest.h>

#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "rkam/scan.hpp"

using namespace rkam;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

OrbitalConfig pair(double e1, double e2) {
    OrbitalConfig c;
    c.m0 = 0.77;
    c.m1 = 0.0202 * kJupiterMass;
    c.m2 = 0.0275 * kJupiterMass;
    c.a1 = 0.081;
    c.a2 = 0.134;
    c.e1 = Interval(e1);
    c.e2 = Interval(e2);
    c.w1 = Interval(1.0);
    c.w2 = Interval(2.0);
    return c;
}

// Integrable action-angle Hamiltonian with a D2-dependent frequency.
PoissonSeries integrable_h3() {
    const auto AA = VariableLayout::action_angle();
    return PoissonSeries::monomial(AA, Interval(-3e-4), 0, {2, 0, 0, 0, 0, 0}) +
           PoissonSeries::monomial(AA, Interval(-7.1e-4), 0, {0, 2, 0, 0, 0, 0}) +
           PoissonSeries::monomial(AA, Interval(1e-3), 1, {2, 0, 0, 0, 0, 0}) +
           PoissonSeries::monomial(AA, Interval(2e-3), 0, {4, 0, 0, 0, 0, 0});
}

}  // namespace

TEST_CASE("mutual inclination at circular orbits") {
    OrbitalConfig c = pair(0.0, 0.0);
    SystemFrame f = poincare_frame(c);
    Interval z = d2_to_mutual_inclination(Interval(0.0), c, f);
    CHECK(z.lo == 0.0);
    CHECK(z.hi == 0.0);

    Interval i = d2_to_mutual_inclination(Interval(0.04), c, f);
    Big ref = boost::multiprecision::acos(Big(98) / Big(100));
    CHECK(std::fabs(i.lo - ref.convert_to<double>()) <= 1e-12);
    CHECK(std::fabs(i.hi - ref.convert_to<double>()) <= 1e-12);
    CHECK(Big(i.lo) <= ref);
    CHECK(ref <= Big(i.hi));
    CHECK(std::fabs(i.mid() - 0.2003) < 1e-4);
}

TEST_CASE("mutual inclination against the angular momentum identity") {
    // cos i = (C^2 - Xi1^2 - Xi2^2)/(2 Xi1 Xi2) evaluated in 50 digits
    OrbitalConfig c = pair(0.06, 0.07);
    SystemFrame f = poincare_frame(c);
    const double d2 = 0.05;
    Big L1(f.Lambda[0].mid()), L2(f.Lambda[1].mid());
    Big X1 = L1 * sqrt(Big(1) - Big(0.06) * Big(0.06)), X2 = L2 * sqrt(Big(1) - Big(0.07) * Big(0.07));
    Big C2 = (L1 + L2) * (L1 + L2) - Big(d2) * L1 * L2;
    Big ref = acos((C2 - X1 * X1 - X2 * X2) / (Big(2) * X1 * X2));
    Interval i = d2_to_mutual_inclination(Interval(d2), c, f);
    CHECK(std::fabs(i.mid() - ref.convert_to<double>()) <= 1e-12);
}

TEST_CASE("mutual inclination is monotone and inclusion isotone") {
    OrbitalConfig c = pair(0.06, 0.07);
    SystemFrame f = poincare_frame(c);
    D2Grid g = D2Grid::uniform(0.02, 0.2, 40, 0.0);
    double prev = -1.0;
    for (const auto& cell : g.cells) {
        double m = d2_to_mutual_inclination(cell, c, f).mid();
        CHECK(m > prev);
        prev = m;
    }
    OrbitalConfig wide = c;
    wide.e1 = Interval(0.055, 0.065);
    wide.e2 = Interval(0.065, 0.075);
    for (double d : {0.03, 0.08, 0.15}) {
        Interval narrow = d2_to_mutual_inclination(Interval(d), c, f);
        Interval w = d2_to_mutual_inclination(Interval(d), wide, f);
        CHECK(w.contains(narrow));
        CHECK(w.width() > narrow.width());
    }
    CHECK_THROWS_AS(d2_to_mutual_inclination(Interval(0.0), c, f), DomainError);
}

TEST_CASE("grid construction and validation") {
    D2Grid g = D2Grid::uniform(0.01, 0.05, 5, 0.0025);
    REQUIRE(g.cells.size() == 5);
    CHECK(g.cells[2].mid() == doctest::Approx(0.03));
    CHECK(g.cells[0].width() == doctest::Approx(0.005));
    CHECK_NOTHROW(g.validate());
    CHECK_THROWS_AS(D2Grid::uniform(0.01, 0.05, 0), ValidationError);
    CHECK_THROWS_AS(D2Grid::explicit_list({}).validate(), ValidationError);
    CHECK_THROWS_AS(D2Grid::explicit_list({Interval(-0.01, 0.01)}).validate(), ValidationError);
    CHECK_THROWS_AS(D2Grid::explicit_list({Interval(1.9, 2.1)}).validate(), ValidationError);
    D2Grid e = D2Grid::explicit_list({Interval(0.05), Interval(0.02), Interval(0.03)});
    CHECK(e.cells[0].mid() == 0.02);
    CHECK(e.cells[2].mid() == 0.05);
}

TEST_CASE("one-cell integrable scan") {
    OrbitalConfig c = pair(0.06, 0.07);
    SystemFrame f = poincare_frame(c);
    ScanOptions opt;
    opt.r_bar = 5;
    auto res = run_scan(integrable_h3(), {Interval(1e-6), Interval(2e-6)}, c, f,
                        D2Grid::explicit_list({Interval(0.04, 0.045)}), opt);
    REQUIRE(res.size() == 1);
    CHECK(res[0].report.verdict == Verdict::convergent);
    REQUIRE(res[0].imut.has_value());
    CHECK(res[0].imut->contains(res[0].imut_mid));
    auto s = summarize(res);
    CHECK(s.n_cells == 1);
    CHECK(s.n_convergent == 1);
    REQUIRE(s.max_stable_imut_deg.has_value());
    CHECK(*s.max_stable_imut_deg == doctest::Approx(res[0].imut_mid * 180 / M_PI));
}

TEST_CASE("duplicate cells and worker count do not change results") {
    OrbitalConfig c = pair(0.06, 0.07);
    SystemFrame f = poincare_frame(c);
    const auto AA = VariableLayout::action_angle();
    PoissonSeries h3 = integrable_h3() +
                       PoissonSeries::monomial(AA, Interval(1e-6), 0, {3, 1, 0, 0, 0, 0}, {1, -1}) +
                       PoissonSeries::monomial(AA, Interval(5e-7), 1, {1, 1, 0, 0, 0, 0}, {1, -1});
    D2Grid g = D2Grid::explicit_list({Interval(0.03), Interval(0.03), Interval(0.06), Interval(0.09)});
    ScanOptions opt;
    opt.r_bar = 6;
    std::array<Interval, 2> istar{Interval(1e-6), Interval(2e-6)};
    auto a = run_scan(h3, istar, c, f, g, opt);
    opt.workers = 3;
    auto b = run_scan(h3, istar, c, f, g, opt);
    REQUIRE(a.size() == 4);
    REQUIRE(b.size() == 4);
    auto same = [](const ScanResult& x, const ScanResult& y) {
        return x.report.verdict == y.report.verdict && x.report.chi2_norms == y.report.chi2_norms &&
               identical(x.report.final_omega[0], y.report.final_omega[0]) &&
               identical(x.report.final_omega[1], y.report.final_omega[1]);
    };
    CHECK(same(a[0], a[1]));
    for (int i = 0; i < 4; ++i) CHECK(same(a[i], b[i]));
    CHECK(!a[0].report.chi2_norms.empty());
    CHECK(a[0].report.chi2_norms[0] > 0.0);
}

TEST_CASE("summary picks the largest convergent cell") {
    std::vector<ScanResult> rs(3);
    rs[0].d2 = Interval(0.02);
    rs[0].report.verdict = Verdict::convergent;
    rs[0].imut = Interval(0.1);
    rs[0].imut_mid = 0.1;
    rs[1].d2 = Interval(0.04);
    rs[1].report.verdict = Verdict::convergent;
    rs[1].imut = Interval(0.2);
    rs[1].imut_mid = 0.2;
    rs[2].d2 = Interval(0.06);
    rs[2].report.verdict = Verdict::nonconvergent;
    auto s = summarize(rs);
    CHECK(s.n_convergent == 2);
    CHECK(*s.max_convergent_d2_mid == 0.04);
    CHECK(*s.max_stable_imut_deg == doctest::Approx(0.2 * 180 / M_PI));
}
