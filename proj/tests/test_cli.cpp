#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rkam/cli.hpp"

using namespace rkam;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

fs::path scratch_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("rkam_test_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::vector<ScanResult> integrable_results() {
    const auto AA = VariableLayout::action_angle();
    PoissonSeries h3 = PoissonSeries::monomial(AA, Interval(-3e-4), 0, {2, 0, 0, 0, 0, 0}) +
                       PoissonSeries::monomial(AA, Interval(-7.1e-4), 0, {0, 2, 0, 0, 0, 0}) +
                       PoissonSeries::monomial(AA, Interval(2e-3), 0, {4, 0, 0, 0, 0, 0});
    OrbitalConfig c = catalog_entry("HD40307").elements.to_config("HD40307");
    ScanOptions opt;
    opt.r_bar = 4;
    return run_scan(h3, {Interval(1e-6), Interval(2e-6)}, c, poincare_frame(c),
                    D2Grid::explicit_list({Interval(0.04, 0.045)}), opt);
}

}  // namespace

TEST_CASE("builtin catalog") {
    const auto& hd = catalog_entry("HD40307");
    CHECK(hd.elements.m1_mj == 0.0202);
    CHECK(hd.elements.m2_mj == 0.0275);
    CHECK(hd.elements.m0 == 0.77);
    CHECK(hd.elements.a1 == 0.081);
    CHECK(hd.elements.a2 == 0.134);
    CHECK(hd.elements.e1 == 0.060);
    CHECK(hd.elements.e1_err == 0.005);
    CHECK(hd.elements.e2 == 0.070);
    CHECK(hd.elements.e2_err == 0.005);
    const auto& hd1 = catalog_entry("hd 141399");
    CHECK(hd1.id == "HD141399");
    CHECK(hd1.resonance == std::array<int, 2>{1, -5});
    CHECK(hd1.K_F == 12);
    CHECK(hd1.N_S == 8);
    CHECK(catalog_entry("HD143761").resonance == std::array<int, 2>{2, -5});
    CHECK_THROWS_AS(catalog_entry("HD1"), ValidationError);

    OrbitalConfig c = hd.elements.to_config("HD40307");
    CHECK(c.m1 == doctest::Approx(0.0202 * 9.5458e-4));
    CHECK(c.e1.contains(0.055));
    CHECK(c.e1.contains(0.065));
    CHECK(c.w1.contains(234.0 * M_PI / 180.0));
}

TEST_CASE("presets") {
    RunManifest d = default_manifest("HD141399");
    CHECK(d.N_S == 4);
    CHECK(d.s_max == 8);
    CHECK(d.K_F == 12);
    CHECK(d.r_bar == 33);
    RunManifest p = default_manifest("HD141399", Preset::paper);
    CHECK(p.N_S == 8);
    CHECK(p.s_max == 15);
    CHECK(p.action_cap == 4);
}

TEST_CASE("manifest round trip") {
    RunManifest m = parse_manifest("system = HD40307\n# comment\ngrid = 0.01:0.09:5:0.001\nworkers = 2\n"
                                   "r_bar = 20  # shorter\nelements = observed\n");
    CHECK(m.r_bar == 20);
    CHECK(m.workers == 2);
    CHECK(m.element_mode == ElementMode::observed);
    CHECK(m.grid().cells.size() == 5);
    std::string s = save_manifest(m);
    RunManifest back = parse_manifest(s);
    CHECK(save_manifest(back) == s);

    RunManifest c = parse_manifest("system = HD143761\npreset = paper\ncells = 0.03, 0.01\nhalfwidth = 0\n");
    CHECK(c.N_S == 6);
    CHECK(c.grid().cells[0].mid() == 0.01);
    CHECK(save_manifest(parse_manifest(save_manifest(c))) == save_manifest(c));
}

TEST_CASE("manifest errors") {
    try {
        parse_manifest("system = HD40307\n\nm0 = heavy\n");
        FAIL("no ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.field() == "m0");
    }
    CHECK_THROWS_AS(parse_manifest("system = HD40307\ncolour = blue\n"), ParseError);
    CHECK_THROWS_AS(parse_manifest("system = HD40307\nK_F\n"), ParseError);
    CHECK_THROWS_AS(parse_manifest("r_bar = 3\n"), ParseError);
    CHECK_THROWS_AS(parse_manifest("system = HD40307\ne1 = 0.3\n"), ValidationError);
    CHECK_NOTHROW(parse_manifest("system = HD40307\ne1 = 0.3\nallow_high_e = true\n"));
    CHECK_THROWS_AS(parse_manifest("system = HD40307\nK_F = 2\n"), ValidationError);
    CHECK_THROWS_AS(parse_manifest("system = HD40307\ngrid = 0.01:0.05:0\n"), ValidationError);
    CHECK_THROWS_AS(parse_manifest("system = HD40307\ncells = 2.5\n"), ValidationError);
    try {
        parse_manifest("system = HD40307\ne1 = 0.3\na1 = 0.5\n");
        FAIL("no ValidationError");
    } catch (const ValidationError& e) {
        std::string w = e.what();
        CHECK(w.find("ecc") != std::string::npos);
        CHECK(w.find("a1") != std::string::npos);
    }
}

TEST_CASE("scan table for an integrable cell") {
    auto res = integrable_results();
    std::string csv = scan_csv(res);
    std::istringstream is(csv);
    std::string header, row, extra;
    std::getline(is, header);
    std::getline(is, row);
    CHECK(header == "d2_lo,d2_hi,verdict,abort_reason,imut_lo,imut_hi,imut_mid,chi2_norm_final,r_reached");
    CHECK(row.find(",convergent,") != std::string::npos);
    CHECK_FALSE(std::getline(is, extra));
    CHECK(scan_csv(integrable_results()) == csv);

    RunManifest m = default_manifest("HD40307");
    auto j = nlohmann::json::parse(scan_json(m, res));
    CHECK(j["cells"].size() == 1);
    CHECK(j["cells"][0]["verdict"] == "convergent");
    auto s = nlohmann::json::parse(summary_json(m, res));
    CHECK(s["n_convergent"] == 1);
}

TEST_CASE("norm files and classify") {
    ConvergenceReport rep;
    for (int r = 0; r < 33; ++r) {
        rep.chi1_norms.push_back(std::pow(0.3, r));
        rep.chi2_norms.push_back(1e-3 * std::pow(0.5, r));
    }
    std::string text = norms_csv(rep);
    CHECK(read_chi2_norms(text) == rep.chi2_norms);
    CHECK(read_chi2_norms("1e-3\n5e-4\n") == std::vector<double>{1e-3, 5e-4});
    CHECK(norms_file_name(7) == "norms_007.csv");

    fs::path d = scratch_dir("classify");
    std::ofstream(d / "good.csv") << text;
    {
        std::ofstream f(d / "flat.csv");
        for (int r = 0; r < 33; ++r) f << "1e-4\n";
    }
    std::ostringstream a, b;
    CHECK(cmd_classify((d / "good.csv").string(), 33, true, a) == 0);
    CHECK(a.str() == "convergent\n");
    cmd_classify((d / "flat.csv").string(), 33, true, b);
    CHECK(b.str() == "nonconvergent\n");
}

TEST_CASE("end-to-end scan is reproducible") {
    RunManifest m = parse_manifest("system = HD40307\ncells = 0.0364\nhalfwidth = 0\nr_bar = 2\n");
    fs::path d1 = scratch_dir("scan1"), d2 = scratch_dir("scan2");
    std::ostringstream log;
    m.out_dir = d1.string();
    REQUIRE(cmd_scan(m, log) == 0);
    m.out_dir = d2.string();
    REQUIRE(cmd_scan(m, log) == 0);
    for (const char* f : {"scan.csv", "scan.json", "summary.json", "norms_000.csv"}) {
        REQUIRE(fs::exists(d1 / f));
        CHECK(slurp(d1 / f) == slurp(d2 / f));
    }
    std::string csv = slurp(d1 / "scan.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}
