#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rkam/kam.hpp"

using namespace rkam;

namespace {

const auto TR = VariableLayout::translated();
const TruncationCaps kCaps{-1, -1, 4, -1};

PoissonSeries tmono(double c, std::array<int, 2> p, std::array<int, 2> k = {0, 0}, Parity par = Parity::cos) {
    return PoissonSeries::monomial(TR, Interval(c), 0, {p[0], p[1], 0, 0, 0, 0}, k, par, kCaps);
}

PoissonSeries omega_p(double w1, double w2) { return tmono(w1, {1, 0}) + tmono(w2, {0, 1}); }

std::vector<double> geometric(double q, int n) {
    std::vector<double> v;
    for (int r = 0; r < n; ++r) v.push_back(2.5e-4 * std::pow(q, r));
    return v;
}

// A small non-integrable H^(0) with the usual column structure.
PoissonSeries perturbed(double eps) {
    return omega_p(-1.0, -std::sqrt(2.0)) + tmono(0.3, {2, 0}) + tmono(0.2, {1, 1}) + tmono(0.25, {0, 2}) +
           tmono(eps, {0, 0}, {1, 0}) + tmono(eps / 2, {0, 0}, {1, -1}) + tmono(eps / 3, {1, 0}, {0, 1}) +
           tmono(eps / 5, {0, 1}, {2, -1}, Parity::sin) + tmono(eps / 7, {0, 0}, {2, 1});
}

}  // namespace

TEST_CASE("column split") {
    auto st = make_kam_state(perturbed(1e-3) + tmono(5.0, {0, 0}), 6);
    CHECK(st.col.size() == 7);
    CHECK(st.omega[0].contains(-1.0));
    CHECK(st.col[0].size() == 3);   // p^2 terms
    // column ceil(|k|/2): |k| = 1, 2 in column 1 and |k| = 3 in column 2
    CHECK(st.col[1].size() == 3);
    CHECK(st.col[1].coeff(KeyCodec::pack(0, {}, {1, 0}, Parity::cos)).contains(1e-3));
    CHECK(st.col[1].coeff(KeyCodec::pack(0, {}, {1, -1}, Parity::cos)).contains(5e-4));
    CHECK(st.col[2].size() == 2);
    CHECK(st.col[2].coeff(KeyCodec::pack(0, {0, 1, 0, 0, 0, 0}, {2, -1}, Parity::sin)).contains(2e-4));
}

TEST_CASE("single harmonic first step") {
    const double w1 = 0.7, w2 = -0.3, eps = 1e-3;
    std::array<Interval, 2> om{Interval(w1), Interval(w2)};
    auto f = tmono(eps, {0, 0}, {1, 0});
    auto chi = solve_kolmogorov_homological(f, om, 1);
    REQUIRE(chi.size() == 1);
    CHECK(chi.coeff(KeyCodec::pack(0, {}, {1, 0}, Parity::sin)).contains(eps / w1));
    // {omega.p, chi} + f = 0
    CHECK(ps_all_contain_zero(ps_poisson(omega_p(w1, w2), chi) + f));

    auto st = kolmogorov_step(make_kam_state(omega_p(w1, w2) + f, 4));
    REQUIRE(st.chi1_norms.size() == 1);
    CHECK(st.chi1_norms[0] == doctest::Approx(eps / w1).epsilon(1e-14));
    CHECK(st.chi2_norms[0] == 0.0);
    CHECK(st.residuals_contain_zero);
    for (const auto& c : st.col)
        for (const auto& [key, v] : c.entries()) {
            auto k = KeyCodec::harms(key);
            bool angular = k[0] != 0 || k[1] != 0;
            CHECK_FALSE((angular && KeyCodec::exp(key, 0) + KeyCodec::exp(key, 1) == 0));
        }
}

TEST_CASE("integrable input is a fixed point") {
    auto h = omega_p(-1.0, -std::sqrt(3.0)) + tmono(0.3, {2, 0}) + tmono(0.1, {1, 1});
    auto rep = run_normalization(h, 6);
    CHECK(rep.verdict == Verdict::convergent);
    CHECK(rep.r_reached == 6);
    REQUIRE(rep.chi2_norms.size() == 6);
    for (int r = 0; r < 6; ++r) {
        CHECK(rep.chi1_norms[r] == 0.0);
        CHECK(rep.chi2_norms[r] == 0.0);
    }
    CHECK(identical(rep.final_omega[0], Interval(-1.0)));
    CHECK(identical(rep.final_omega[1], Interval(-std::sqrt(3.0))));
}

TEST_CASE("resonant frequencies abort at the first step") {
    auto h = omega_p(1.0, -1.0) + tmono(1e-3, {0, 0}, {1, 0});
    auto rep = run_normalization(h, 10);
    CHECK(rep.verdict == Verdict::aborted);
    CHECK(rep.abort_reason == AbortReason::resonance);
    CHECK(rep.r_reached == 0);
    CHECK_THROWS_AS(check_nonresonance({Interval(1.0), Interval(-1.0)}, 2, 1), ResonanceAbort);
    try {
        check_nonresonance({Interval(1.0), Interval(-1.0)}, 2, 1);
    } catch (const ResonanceAbort& e) {
        CHECK(e.step() == 1);
        CHECK(std::abs(e.harmonic()[0]) == 1);
        CHECK(e.divisor().contains_zero());
    }
    CHECK_NOTHROW(check_nonresonance({Interval(1.0), Interval(-std::sqrt(2.0))}, 20, 1));
}

TEST_CASE("overflow becomes a verdict") {
    auto h = omega_p(1e-200, -std::sqrt(2.0) * 1e-200) + tmono(1e250, {0, 0}, {1, 0}) + tmono(1.0, {2, 0});
    auto rep = run_normalization(h, 4);
    CHECK(rep.verdict == Verdict::aborted);
    CHECK(rep.abort_reason == AbortReason::norm_blowup);
}

TEST_CASE("classifier") {
    CHECK(classify_convergence(geometric(0.5, 33), 33) == Verdict::convergent);
    // 0.89^32 is about 2.4e-2 > 1e-9
    CHECK(classify_convergence(geometric(0.89, 33), 33) == Verdict::nonconvergent);
    CHECK(classify_convergence(std::vector<double>(33, 1e-4), 33) == Verdict::nonconvergent);
    // too short
    CHECK(classify_convergence(geometric(0.5, 20), 33) == Verdict::nonconvergent);
    // zero first norm
    CHECK(classify_convergence(std::vector<double>(33, 0.0), 33) == Verdict::convergent);
    auto z = std::vector<double>(33, 0.0);
    z[5] = 1e-20;
    CHECK(classify_convergence(z, 33) == Verdict::nonconvergent);
    // a single early spike above 0.9^(r-1)
    auto spike = geometric(0.4, 33);
    spike[2] = spike[0];
    CHECK(classify_convergence(spike, 33, true) == Verdict::nonconvergent);
    CHECK(classify_convergence(spike, 33, false) == Verdict::convergent);
    // the boundary of test 1 is strict
    std::vector<double> edge;
    for (int r = 0; r < 33; ++r) edge.push_back(r < 3 ? std::pow(0.9, r) : std::pow(0.4, r));
    CHECK(classify_convergence(edge, 33) == Verdict::convergent);
}

TEST_CASE("normalization of a perturbed system") {
    auto h = perturbed(1e-3);
    auto rep = run_normalization(h, 8);
    CHECK(rep.verdict == Verdict::convergent);
    CHECK(rep.r_reached == 8);
    CHECK(rep.residuals_contain_zero);
    for (int r = 1; r < 8; ++r) CHECK(rep.chi2_norms[r] < rep.chi2_norms[0]);

    KamState st = make_kam_state(h, 8);
    for (int r = 0; r < 3; ++r) {
        st = kolmogorov_step(st);
        CHECK(st.r == r + 1);
        CHECK(st.residuals_contain_zero);
        CHECK(static_cast<int>(st.chi2_norms.size()) == st.r);
    }
}

TEST_CASE("determinism") {
    auto h = perturbed(2e-3);
    auto a = run_normalization(h, 6), b = run_normalization(h, 6);
    REQUIRE(a.chi2_norms.size() == b.chi2_norms.size());
    for (std::size_t i = 0; i < a.chi2_norms.size(); ++i) {
        CHECK(a.chi2_norms[i] == b.chi2_norms[i]);
        CHECK(a.chi1_norms[i] == b.chi1_norms[i]);
    }
    CHECK(identical(a.final_omega[0], b.final_omega[0]));
    CHECK(identical(a.final_omega[1], b.final_omega[1]));
}
