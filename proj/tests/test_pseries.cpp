#include <doctest.h>

#include <random>

#include "rkam/pseries.hpp"

using namespace rkam;

namespace {

const auto TR = VariableLayout::translated();
const auto CA = VariableLayout::cartesian();
const auto FA = VariableLayout::fast();
const auto AA = VariableLayout::action_angle();

PoissonSeries mono(VariableLayout l, double c, int d2, std::array<int, 6> e, std::array<int, 2> k = {0, 0},
                   Parity par = Parity::cos, TruncationCaps caps = {}) {
    return PoissonSeries::monomial(l, Interval(c), d2, e, k, par, caps);
}

bool all_zero(const PoissonSeries& s) { return ps_all_contain_zero(s); }

PoissonSeries random_series(std::mt19937_64& rng, VariableLayout l) {
    std::uniform_int_distribution<int> ex(0, 2), hk(-2, 2), nterm(1, 5), par(0, 1);
    std::uniform_real_distribution<double> c(-1, 1);
    std::vector<PsTerm> ts;
    int n = nterm(rng);
    for (int i = 0; i < n; ++i) {
        PsTerm t;
        t.poly_exp = {ex(rng), ex(rng), 0, 0, 0, 0};
        t.k = {hk(rng), hk(rng)};
        t.parity = par(rng) ? Parity::sin : Parity::cos;
        t.coeff = Interval(c(rng));
        ts.push_back(t);
    }
    return PoissonSeries::from_terms(l, ts);
}

}  // namespace

TEST_CASE("product to sum") {
    auto c = mono(TR, 1, 0, {}, {1, 0});
    auto p = ps_mul(c, c);
    CHECK(p.size() == 2);
    CHECK(p.coeff(KeyCodec::pack(0, {}, {0, 0}, Parity::cos)).contains(0.5));
    CHECK(p.coeff(KeyCodec::pack(0, {}, {2, 0}, Parity::cos)).contains(0.5));
}

TEST_CASE("action cap drops products") {
    TruncationCaps caps;
    caps.max_action_degree = 1;
    auto a = mono(TR, 1, 0, {1, 0, 0, 0, 0, 0}, {0, 0}, Parity::cos, caps);
    auto b = mono(TR, 1, 0, {1, 0, 0, 0, 0, 0}, {0, 1}, Parity::cos, caps);
    CHECK(ps_mul(a, b).empty());
}

TEST_CASE("D2 monomial bookkeeping") {
    auto a = mono(AA, 1, 1, {2, 0, 0, 0, 0, 0});
    auto b = mono(AA, 1, 0, {0, 2, 0, 0, 0, 0}, {1, -1});
    auto p = ps_mul(a, b);
    REQUIRE(p.size() == 1);
    auto t = p.term(0);
    CHECK(t.d2_exp == 1);
    CHECK(t.poly_exp[0] == 2);
    CHECK(t.poly_exp[1] == 2);
    CHECK(t.k == std::array<int, 2>{1, -1});
    CHECK(t.coeff.contains(1.0));
}

TEST_CASE("layout mismatch") { CHECK_THROWS_AS(ps_mul(mono(TR, 1, 0, {}), mono(CA, 1, 0, {})), LayoutMismatch); }

TEST_CASE("canonical pairs") {
    // lambda is not a trigonometric term, so test {lambda1, L1} = 1 through {cos lambda1, L1} = -sin lambda1
    auto L1 = mono(FA, 1, 0, {1, 0, 0, 0, 0, 0});
    auto br = ps_poisson(mono(FA, 1, 0, {}, {1, 0}, Parity::cos), L1, BracketBlock::fast);
    REQUIRE(br.size() == 1);
    CHECK(br.term(0).parity == Parity::sin);
    CHECK(br.term(0).coeff.contains(-1.0));

    // {xi1^2/2 + eta1^2/2, xi1}: the Cartesian pair is (xi, eta) with xi the coordinate
    auto h = mono(CA, 0.5, 0, {2, 0, 0, 0, 0, 0}) + mono(CA, 0.5, 0, {0, 2, 0, 0, 0, 0});
    auto xi = mono(CA, 1, 0, {1, 0, 0, 0, 0, 0});
    auto s = ps_poisson(h, xi, BracketBlock::secular);
    REQUIRE(s.size() == 1);
    CHECK(s.term(0).poly_exp[1] == 1);
    CHECK(std::fabs(s.term(0).coeff.mid()) == 1.0);
    CHECK_THROWS_AS(ps_poisson(h, xi, BracketBlock::fast), MissingBlock);
}

TEST_CASE("Lie transform") {
    auto H = mono(TR, 0.3, 0, {1, 0, 0, 0, 0, 0}) + mono(TR, 0.7, 0, {0, 1, 0, 0, 0, 0});
    CHECK(ps_lie_transform(H, PoissonSeries(TR)).size() == H.size());

    // chi = (eps/w1) sin q1 cancels eps cos q1 against w.p at first order
    const double w1 = 0.3, eps = 1e-3;
    auto chi = mono(TR, eps / w1, 0, {}, {1, 0}, Parity::sin);
    auto first = ps_poisson(H, chi);
    auto f0 = mono(TR, eps, 0, {}, {1, 0}, Parity::cos);
    CHECK(all_zero(first + f0));
}

TEST_CASE("symplecticity of a Lie transform") {
    TruncationCaps caps;
    caps.max_action_degree = 3;
    auto chi = mono(TR, 0.01, 0, {1, 0, 0, 0, 0, 0}, {1, 0}, Parity::sin, caps) +
               mono(TR, 0.02, 0, {0, 0, 0, 0, 0, 0}, {1, 1}, Parity::cos, caps);
    auto p1 = mono(TR, 1, 0, {1, 0, 0, 0, 0, 0}, {0, 0}, Parity::cos, caps);
    auto cq = mono(TR, 1, 0, {}, {0, 1}, Parity::cos, caps);
    auto a = ps_lie_transform(p1, chi, 6);
    auto b = ps_lie_transform(cq, chi, 6);
    // {T cq, T p1} must equal T {cq, p1} up to terms beyond the bracket count
    auto lhs = ps_poisson(b, a);
    auto rhs = ps_lie_transform(ps_poisson(cq, p1), chi, 6);
    auto d = ps_truncate(lhs - rhs, {-1, -1, 1});
    CHECK(ps_max_mag(d) < 1e-10);
}

TEST_CASE("averaging") {
    CHECK(ps_average(mono(FA, 1, 0, {}, {1, 0})).empty());
    auto s = ps_average(mono(AA, 3, 0, {}) + mono(AA, 1, 0, {}, {1, -1}));
    REQUIRE(s.size() == 1);
    CHECK(s.term(0).coeff.contains(3.0));
    auto mixed = mono(AA, 1, 0, {1, 1, 0, 0, 0, 0}, {1, 1});
    CHECK(ps_average(mixed, {true, false}).empty());
    std::mt19937_64 rng(3);
    auto r = random_series(rng, TR);
    CHECK(ps_average(ps_average(r)).size() == ps_average(r).size());
}

TEST_CASE("truncation") {
    CHECK(ps_truncate(mono(FA, 1, 0, {}, {3, 0}), {2, -1, -1}).empty());
    // D2^3 xi1^2 eta2^2: 2*3 + 4 = 10 > 8
    CHECK(ps_truncate(mono(CA, 1, 3, {2, 0, 0, 2, 0, 0}), {-1, 4, -1}).empty());
    CHECK(ps_truncate(mono(CA, 1, 2, {2, 0, 0, 2, 0, 0}), {-1, 4, -1}).size() == 1);
    CHECK(ps_truncate(mono(TR, 1, 0, {2, 3, 0, 0, 0, 0}), {-1, -1, 4}).empty());
}

TEST_CASE("norm") {
    auto s = mono(TR, 0.5, 0, {}, {1, 0}) + mono(TR, -0.25, 0, {}, {1, 1}, Parity::sin);
    CHECK(ps_norm(s).hi == 0.75);
    CHECK(ps_norm(PoissonSeries(TR)).hi == 0.0);
    PoissonSeries::Builder b(TR, {});
    b.add(KeyCodec::pack(0, {}, {1, 0}, Parity::cos), Interval(-1, 1));
    b.add(KeyCodec::pack(0, {}, {0, 1}, Parity::cos), Interval(2, 2));
    auto n = ps_norm(b.finish());
    CHECK(n.hi == 3.0);
    CHECK(n.lo == 2.0);
}

TEST_CASE("bracket identities on random series") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 100; ++i) {
        auto A = random_series(rng, TR), B = random_series(rng, TR), C = random_series(rng, TR);
        CHECK(all_zero(ps_poisson(A, B) + ps_poisson(B, A)));
        auto jac = ps_poisson(A, ps_poisson(B, C)) + ps_poisson(B, ps_poisson(C, A)) + ps_poisson(C, ps_poisson(A, B));
        CHECK(all_zero(jac));
        auto leib = ps_poisson(A, ps_mul(B, C)) - ps_mul(ps_poisson(A, B), C) - ps_mul(B, ps_poisson(A, C));
        CHECK(all_zero(leib));
        auto m1 = ps_mul(A, B), m2 = ps_mul(B, A);
        for (const auto& [k, c] : m1.entries()) {
            auto d = c - m2.coeff(k);
            CHECK(d.contains_zero());
        }
    }
}

TEST_CASE("D'Alembert parity is preserved") {
    // terms with |k1|+|k2| and the u-degree of equal parity
    auto ok = [](const PoissonSeries& s) {
        for (const auto& t : s.terms()) {
            int deg = t.poly_exp[0] + t.poly_exp[1];
            int kk = std::abs(t.k[0]) + std::abs(t.k[1]);
            if ((deg - kk) % 2 != 0) return false;
        }
        return true;
    };
    auto a = mono(AA, 1, 0, {1, 1, 0, 0, 0, 0}, {1, -1}) + mono(AA, 2, 1, {2, 0, 0, 0, 0, 0});
    auto b = mono(AA, 0.5, 0, {2, 2, 0, 0, 0, 0}, {2, 0}, Parity::sin) + mono(AA, 1, 0, {0, 2, 0, 0, 0, 0}, {0, 2});
    REQUIRE(ok(a));
    REQUIRE(ok(b));
    CHECK(ok(ps_mul(a, b)));
}

TEST_CASE("text round trip") {
    std::mt19937_64 rng(5);
    auto s = random_series(rng, TR);
    auto t = PoissonSeries::from_text(s.to_text(), TR);
    REQUIRE(t.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s.entries()[i].first == t.entries()[i].first);
        CHECK(identical(s.entries()[i].second, t.entries()[i].second));
    }
}
