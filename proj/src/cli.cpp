#include "rkam/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rkam/oracles.hpp"

namespace rkam {

namespace {

using json = nlohmann::ordered_json;

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

double to_double(const std::string& v, int line, const std::string& field) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ParseError(line, field, "expected a number, got '" + v + "'");
    }
}

int to_int(const std::string& v, int line, const std::string& field) {
    try {
        std::size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ParseError(line, field, "expected an integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& v, int line, const std::string& field) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParseError(line, field, "expected true or false, got '" + v + "'");
}

json interval_json(const Interval& a) { return json::array({a.lo, a.hi}); }

double safe(double x) { return std::isfinite(x) ? x : std::nan(""); }

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << content;
    if (!f) throw std::runtime_error("write failed for " + p.string());
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------- catalog

OrbitalConfig CatalogElements::to_config(const std::string& name) const {
    OrbitalConfig c;
    c.name = name;
    c.m0 = m0;
    c.m1 = m1_mj * kJupiterMass;
    c.m2 = m2_mj * kJupiterMass;
    c.a1 = a1;
    c.a2 = a2;
    c.e1 = Interval(e1) + Interval(-e1_err, e1_err);
    c.e2 = Interval(e2) + Interval(-e2_err, e2_err);
    const Interval deg = iv_pi() / Interval(180.0);
    c.w1 = (Interval(w1_deg) + Interval(-w1_err, w1_err)) * deg;
    c.w2 = (Interval(w2_deg) + Interval(-w2_err, w2_err)) * deg;
    return c;
}

const std::vector<CatalogEntry>& builtin_catalog() {
    static const std::vector<CatalogEntry> cat = {
        {"HD141399", {1.14, 1.33, 1.18, 0.704, 2.14, 0.048, 0.009, 0.074, 0.025, 220, 40, 220, 30}, {1, -5}, 12, 8},
        {"HD143761", {0.99, 1.045, 0.079, 0.228, 0.427, 0.037, 0.004, 0.050, 0.004, 270.6, 6, 175, 125}, {2, -5}, 8, 6},
        {"HD40307", {0.77, 0.0202, 0.0275, 0.081, 0.134, 0.060, 0.005, 0.070, 0.005, 234, 1, 170, 10}, {1, -2}, 6, 8},
    };
    return cat;
}

const CatalogEntry& catalog_entry(const std::string& id) {
    std::string key;
    for (char ch : id)
        if (ch != ' ' && ch != '_') key += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    for (const auto& e : builtin_catalog())
        if (e.id == key) return e;
    throw ValidationError("unknown system '" + id + "' (builtin: HD141399, HD143761, HD40307)");
}

// ---------------------------------------------------------------- manifest

std::string to_string(Preset p) { return p == Preset::desk ? "desk" : "paper"; }

Preset parse_preset(const std::string& s) {
    if (s == "desk") return Preset::desk;
    if (s == "paper") return Preset::paper;
    throw ValidationError("unknown preset '" + s + "' (desk or paper)");
}

void apply_preset(RunManifest& m, Preset preset) {
    m.preset = preset;
    m.r_bar = 33;
    m.action_cap = 4;
    if (preset == Preset::desk) {
        m.N_S = 4;
        m.s_max = 8;
    } else {
        m.s_max = 15;
        if (!m.system.empty()) {
            try {
                m.N_S = catalog_entry(m.system).N_S;
            } catch (const ValidationError&) {
                // user-supplied system keeps its own N_S
            }
        }
    }
}

RunManifest default_manifest(const std::string& system, Preset preset) {
    const CatalogEntry& e = catalog_entry(system);
    RunManifest m;
    m.system = e.id;
    m.elements = e.elements;
    m.resonance = e.resonance;
    m.K_F = e.K_F;
    m.N_S = e.N_S;
    m.grid_spec = kDefaultGrid;
    apply_preset(m, preset);
    return m;
}

PipelineParams RunManifest::pipeline() const {
    PipelineParams p;
    p.expansion = ExpansionParams::make(config(), K_F, N_S, resonance);
    p.s_max = s_max;
    p.action_cap = action_cap;
    p.r_bar = r_bar;
    p.strict = strict;
    p.elements = element_mode;
    return p;
}

D2Grid parse_grid(const std::string& spec) {
    auto f = split(spec, ':');
    if (f.size() < 3 || f.size() > 4) throw ValidationError("grid must be lo:hi:n[:halfwidth], got '" + spec + "'");
    auto d = [&](std::size_t i) { return to_double(f[i], 0, "grid"); };
    int n = to_int(f[2], 0, "grid");
    if (n < 1) throw ValidationError("D2 grid is empty");
    return D2Grid::uniform(d(0), d(1), n, f.size() == 4 ? d(3) : kDefaultHalfWidth);
}

D2Grid RunManifest::grid() const {
    if (!cells.empty()) {
        std::vector<Interval> c;
        for (double m : cells) c.emplace_back(m - half_width, m + half_width);
        return D2Grid::explicit_list(std::move(c));
    }
    if (grid_spec.empty()) throw ValidationError("D2 grid is empty");
    return parse_grid(grid_spec);
}

void RunManifest::validate() const {
    std::string bad;
    auto collect = [&](auto&& fn) {
        try {
            fn();
        } catch (const ValidationError& e) {
            bad += std::string(bad.empty() ? "" : "; ") + e.what();
        }
    };
    collect([&] { config().validate(allow_high_e); });
    collect([&] { pipeline().expansion.validate(); });
    collect([&] { grid().validate(); });
    if (!cells.empty() && !grid_spec.empty()) bad += std::string(bad.empty() ? "" : "; ") + "both grid and cells set";
    if (s_max < 2) bad += std::string(bad.empty() ? "" : "; ") + "s_max must be at least 2";
    if (action_cap < 1) bad += std::string(bad.empty() ? "" : "; ") + "action_cap must be at least 1";
    if (r_bar < 1) bad += std::string(bad.empty() ? "" : "; ") + "r_bar must be at least 1";
    if (workers < 1) bad += std::string(bad.empty() ? "" : "; ") + "workers must be at least 1";
    if (!bad.empty()) throw ValidationError(bad);
}

RunManifest parse_manifest(const std::string& text) {
    RunManifest m;
    m.grid_spec = kDefaultGrid;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    bool have_system = false;
    while (std::getline(is, raw)) {
        ++line;
        auto hash = raw.find('#');
        std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError(line, "", "expected 'key = value'");
        std::string k = trim(s.substr(0, eq)), v = trim(s.substr(eq + 1));
        if (k.empty()) throw ParseError(line, "", "missing key");
        if (v.empty()) throw ParseError(line, k, "missing value");
        auto D = [&] { return to_double(v, line, k); };
        auto I = [&] { return to_int(v, line, k); };
        if (k == "system") {
            try {
                RunManifest base = default_manifest(v, m.preset);
                base.out_dir = m.out_dir;
                base.workers = m.workers;
                m = base;
            } catch (const ValidationError&) {
                m.system = v;  // user system: elements must follow
            }
            have_system = true;
        } else if (k == "preset") {
            try {
                apply_preset(m, parse_preset(v));
            } catch (const ValidationError& e) {
                throw ParseError(line, k, e.what());
            }
        } else if (k == "m0") m.elements.m0 = D();
        else if (k == "m1_mj") m.elements.m1_mj = D();
        else if (k == "m2_mj") m.elements.m2_mj = D();
        else if (k == "a1") m.elements.a1 = D();
        else if (k == "a2") m.elements.a2 = D();
        else if (k == "e1") m.elements.e1 = D();
        else if (k == "e1_err") m.elements.e1_err = D();
        else if (k == "e2") m.elements.e2 = D();
        else if (k == "e2_err") m.elements.e2_err = D();
        else if (k == "w1_deg") m.elements.w1_deg = D();
        else if (k == "w1_err_deg") m.elements.w1_err = D();
        else if (k == "w2_deg") m.elements.w2_deg = D();
        else if (k == "w2_err_deg") m.elements.w2_err = D();
        else if (k == "resonance") {
            auto f = split(v, ',');
            if (f.size() != 2) throw ParseError(line, k, "expected 'k1, k2'");
            m.resonance = {to_int(f[0], line, k), to_int(f[1], line, k)};
        } else if (k == "K_F") m.K_F = I();
        else if (k == "N_S") m.N_S = I();
        else if (k == "s_max") m.s_max = I();
        else if (k == "action_cap") m.action_cap = I();
        else if (k == "r_bar") m.r_bar = I();
        else if (k == "strict") m.strict = to_bool(v, line, k);
        else if (k == "elements") {
            if (v == "nominal") m.element_mode = ElementMode::nominal;
            else if (v == "observed") m.element_mode = ElementMode::observed;
            else throw ParseError(line, k, "expected nominal or observed");
        } else if (k == "grid") {
            m.grid_spec = v;
            m.cells.clear();
        } else if (k == "cells") {
            m.cells.clear();
            for (const auto& f : split(v, ',')) m.cells.push_back(to_double(f, line, k));
            m.grid_spec.clear();
        } else if (k == "halfwidth") m.half_width = D();
        else if (k == "out") m.out_dir = v;
        else if (k == "workers") m.workers = I();
        else if (k == "allow_high_e") m.allow_high_e = to_bool(v, line, k);
        else throw ParseError(line, k, "unknown key");
    }
    if (!have_system) throw ParseError(line, "system", "manifest must name a system");
    m.validate();
    return m;
}

RunManifest load_manifest(const std::string& path) { return parse_manifest(read_file(path)); }

std::string save_manifest(const RunManifest& m) {
    std::ostringstream os;
    const auto& e = m.elements;
    os << "system = " << m.system << "\n";
    os << "preset = " << to_string(m.preset) << "\n";
    os << "m0 = " << num(e.m0) << "\nm1_mj = " << num(e.m1_mj) << "\nm2_mj = " << num(e.m2_mj) << "\n";
    os << "a1 = " << num(e.a1) << "\na2 = " << num(e.a2) << "\n";
    os << "e1 = " << num(e.e1) << "\ne1_err = " << num(e.e1_err) << "\n";
    os << "e2 = " << num(e.e2) << "\ne2_err = " << num(e.e2_err) << "\n";
    os << "w1_deg = " << num(e.w1_deg) << "\nw1_err_deg = " << num(e.w1_err) << "\n";
    os << "w2_deg = " << num(e.w2_deg) << "\nw2_err_deg = " << num(e.w2_err) << "\n";
    os << "resonance = " << m.resonance[0] << ", " << m.resonance[1] << "\n";
    os << "K_F = " << m.K_F << "\nN_S = " << m.N_S << "\ns_max = " << m.s_max << "\n";
    os << "action_cap = " << m.action_cap << "\nr_bar = " << m.r_bar << "\n";
    os << "strict = " << (m.strict ? "true" : "false") << "\n";
    os << "elements = " << (m.element_mode == ElementMode::nominal ? "nominal" : "observed") << "\n";
    if (!m.cells.empty()) {
        os << "cells = ";
        for (std::size_t i = 0; i < m.cells.size(); ++i) os << (i ? ", " : "") << num(m.cells[i]);
        os << "\n";
    } else {
        os << "grid = " << m.grid_spec << "\n";
    }
    os << "halfwidth = " << num(m.half_width) << "\n";
    os << "out = " << m.out_dir << "\nworkers = " << m.workers << "\n";
    os << "allow_high_e = " << (m.allow_high_e ? "true" : "false") << "\n";
    return os.str();
}

// ---------------------------------------------------------------- outputs

std::string scan_csv(const std::vector<ScanResult>& results) {
    std::ostringstream os;
    os << "d2_lo,d2_hi,verdict,abort_reason,imut_lo,imut_hi,imut_mid,chi2_norm_final,r_reached\n";
    for (const auto& r : results) {
        double fin = r.report.chi2_norms.empty() ? std::nan("") : r.report.chi2_norms.back();
        os << num(r.d2.lo) << "," << num(r.d2.hi) << "," << to_string(r.report.verdict) << ","
           << to_string(r.report.abort_reason) << "," << num(r.imut ? r.imut->lo : std::nan("")) << ","
           << num(r.imut ? r.imut->hi : std::nan("")) << "," << num(r.imut_mid) << "," << num(fin) << ","
           << r.report.r_reached << "\n";
    }
    return os.str();
}

std::string norms_file_name(std::size_t cell) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "norms_%03zu.csv", cell);
    return buf;
}

std::string norms_csv(const ConvergenceReport& rep) {
    std::ostringstream os;
    os << "r,chi1_norm,chi2_norm\n";
    for (std::size_t i = 0; i < rep.chi2_norms.size(); ++i)
        os << i + 1 << "," << num(rep.chi1_norms[i]) << "," << num(rep.chi2_norms[i]) << "\n";
    return os.str();
}

std::vector<double> read_chi2_norms(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<double> out;
    int ln = 0;
    int col = -1;
    while (std::getline(is, line)) {
        ++ln;
        line = trim(line);
        if (line.empty()) continue;
        auto f = split(line, ',');
        if (col < 0) {
            for (std::size_t i = 0; i < f.size(); ++i)
                if (f[i] == "chi2_norm") col = static_cast<int>(i);
            if (col < 0) {
                // headerless: a single column of norms
                if (f.size() != 1) throw ParseError(ln, "chi2_norm", "missing chi2_norm column");
                col = 0;
                out.push_back(to_double(f[0], ln, "chi2_norm"));
            }
            continue;
        }
        if (static_cast<int>(f.size()) <= col) throw ParseError(ln, "chi2_norm", "short row");
        out.push_back(to_double(f[col], ln, "chi2_norm"));
    }
    if (out.empty()) throw ParseError(ln, "chi2_norm", "no norms found");
    return out;
}

std::string scan_json(const RunManifest& m, const std::vector<ScanResult>& results) {
    json j;
    j["system"] = m.system;
    j["preset"] = to_string(m.preset);
    j["elements"] = m.element_mode == ElementMode::nominal ? "nominal" : "observed";
    j["K_F"] = m.K_F;
    j["N_S"] = m.N_S;
    j["s_max"] = m.s_max;
    j["action_cap"] = m.action_cap;
    j["r_bar"] = m.r_bar;
    j["strict"] = m.strict;
    json cells = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        json c;
        c["cell"] = i;
        c["d2_lo"] = r.d2.lo;
        c["d2_hi"] = r.d2.hi;
        c["verdict"] = to_string(r.report.verdict);
        c["abort_reason"] = to_string(r.report.abort_reason);
        c["imut_lo"] = r.imut ? json(r.imut->lo) : json(nullptr);
        c["imut_hi"] = r.imut ? json(r.imut->hi) : json(nullptr);
        c["imut_mid"] = r.imut ? json(r.imut_mid) : json(nullptr);
        c["chi2_norm_final"] = r.report.chi2_norms.empty() ? json(nullptr) : json(safe(r.report.chi2_norms.back()));
        c["r_reached"] = r.report.r_reached;
        c["omega_final"] = json::array({interval_json(r.report.final_omega[0]), interval_json(r.report.final_omega[1])});
        c["residuals_contain_zero"] = r.report.residuals_contain_zero;
        c["detail"] = r.report.detail;
        c["norms_file"] = norms_file_name(i);
        cells.push_back(c);
    }
    j["cells"] = cells;
    return j.dump(2) + "\n";
}

std::string summary_json(const RunManifest& m, const std::vector<ScanResult>& results) {
    ScanSummary s = summarize(results);
    json j;
    j["system"] = m.system;
    j["preset"] = to_string(m.preset);
    j["n_cells"] = s.n_cells;
    j["n_convergent"] = s.n_convergent;
    j["max_convergent_d2_mid"] = s.max_convergent_d2_mid ? json(*s.max_convergent_d2_mid) : json(nullptr);
    j["max_stable_imut_deg"] = s.max_stable_imut_deg ? json(*s.max_stable_imut_deg) : json(nullptr);
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- commands

namespace {

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int cmd_scan(const RunManifest& m, std::ostream& log) {
    m.validate();
    const OrbitalConfig cfg = m.config();
    const PipelineParams params = m.pipeline();
    const D2Grid grid = m.grid();
    auto t0 = std::chrono::steady_clock::now();
    SymbolicModel model = build_symbolic_model(cfg, params);
    log << "symbolic model: " << model.htf_terms << " expansion terms, " << model.pre.birkhoff.h.size()
        << " terms in H^(III) (" << std::fixed << std::setprecision(1) << elapsed(t0) << " s)\n";
    ScanOptions opt;
    opt.r_bar = m.r_bar;
    opt.action_cap = m.action_cap;
    opt.strict = m.strict;
    opt.workers = m.workers;
    t0 = std::chrono::steady_clock::now();
    auto results = run_scan(model, cfg, grid, opt);
    log << results.size() << " cells in " << elapsed(t0) << " s\n";
    std::filesystem::path out(m.out_dir);
    std::filesystem::create_directories(out);
    write_file(out / "scan.csv", scan_csv(results));
    write_file(out / "scan.json", scan_json(m, results));
    write_file(out / "summary.json", summary_json(m, results));
    for (std::size_t i = 0; i < results.size(); ++i) write_file(out / norms_file_name(i), norms_csv(results[i].report));
    for (const auto& r : results)
        log << "  D2 [" << num(r.d2.lo) << ", " << num(r.d2.hi) << "] " << to_string(r.report.verdict)
            << (r.report.abort_reason == AbortReason::none ? "" : " (" + to_string(r.report.abort_reason) + ")")
            << " r=" << r.report.r_reached << "\n";
    return 0;
}

int cmd_expand(const RunManifest& m, std::optional<double> d2, std::ostream& log) {
    m.validate();
    const OrbitalConfig cfg = m.config();
    SymbolicModel model = build_symbolic_model(cfg, m.pipeline());
    std::filesystem::path out(m.out_dir);
    std::filesystem::create_directories(out);
    write_file(out / "hsec.txt", model.secular.hsec.to_text());
    write_file(out / "h3.txt", model.pre.birkhoff.h.to_text());
    log << "H^(sec): " << model.secular.hsec.size() << " terms -> " << (out / "hsec.txt").string() << "\n";
    log << "H^(III): " << model.pre.birkhoff.h.size() << " terms -> " << (out / "h3.txt").string() << "\n";
    log << "nu = " << model.pre.diag.nu[0] << ", " << model.pre.diag.nu[1] << "\n";
    log << "I* = " << model.pre.istar[0] << ", " << model.pre.istar[1] << "\n";
    if (d2) {
        PoissonSeries h0 = translate_and_fix_d2(model.pre.birkhoff.h, model.pre.istar, Interval(*d2), m.action_cap);
        write_file(out / "h0.txt", h0.to_text());
        auto w = frequency_vector(h0);
        log << "H^(0) at D2 = " << num(*d2) << ": " << h0.size() << " terms, omega = " << w[0] << ", " << w[1]
            << "\n";
    }
    return 0;
}

int cmd_classify(const std::string& norms_path, int r_bar, bool strict, std::ostream& out) {
    auto norms = read_chi2_norms(read_file(norms_path));
    Verdict v = classify_convergence(norms, r_bar, strict);
    out << to_string(v) << "\n";
    return 0;
}

int cmd_verify(const RunManifest& m, const VerifyOptions& opt, std::ostream& out) {
    const OrbitalConfig cfg = m.config();
    std::vector<oracle::Check> checks;
    auto run = [&](oracle::Check c) {
        out << (c.pass ? "PASS " : "FAIL ") << c.name << ": measured " << num(c.measured) << " (tolerance "
            << num(c.tolerance) << ") " << c.detail << "\n";
        out.flush();
        checks.push_back(std::move(c));
    };
    auto expect_fail = [&](oracle::Check c, const std::string& name) {
        oracle::Check n;
        n.name = name;
        n.pass = !c.pass;
        n.measured = c.measured;
        n.tolerance = c.tolerance;
        n.detail = "corrupted check " + std::string(c.pass ? "passed" : "failed") + ": " + c.detail;
        run(n);
    };
    const bool bad = opt.inject_fault;
    run(oracle::interval_containment(1, 10000));
    run(oracle::bracket_algebra(2, 100));
    const bool massless = cfg.m1 == 0.0 && cfg.m2 == 0.0;
    if (!massless) {
        double alpha = cfg.a1 / cfg.a2;
        run(oracle::laplace_table_vs_quadrature(alpha, 6, 30, bad));
        run(oracle::circular_slice(cfg, bad));
        run(oracle::kepler_quadratic(cfg));
        if (!opt.quick) {
            oracle::DisturbingOracleOptions d;
            d.corrupt_laplace = bad;
            run(oracle::disturbing_vs_quadrature(d));
        }
        if (!bad) {
            expect_fail(oracle::laplace_table_vs_quadrature(alpha, 6, 30, true),
                        "negative control: corrupted Laplace table is detected");
            expect_fail(oracle::circular_slice(cfg, true), "negative control: corrupted expansion is detected");
        }
    }
    PipelineParams p = m.pipeline();
    SymbolicModel model;
    bool have_model = false;
    if (massless) {
        // No perturbation: the secular model must come out empty and there is
        // no coordinate change to compose.
        SystemFrame fr = poincare_frame(cfg);
        SecularModel sec = build_secular(assemble_htf(cfg, fr, p.expansion), fr, p.expansion);
        oracle::Check c;
        c.name = "massless configuration has an empty secular model";
        c.measured = static_cast<double>(sec.hsec.size());
        c.pass = sec.hsec.empty();
        c.detail = std::to_string(sec.hsec.size()) + " secular terms";
        run(c);
        oracle::Check comp;
        comp.name = "coordinate-change composition";
        comp.pass = sec.hsec.empty();
        comp.detail = "nothing to compose";
        run(comp);
    } else {
        try {
            model = build_symbolic_model(cfg, p);
            have_model = true;
        } catch (const std::exception& e) {
            oracle::Check c;
            c.name = "symbolic model construction";
            c.detail = e.what();
            run(c);
        }
    }
    if (have_model) {
        run(oracle::eigenfrequencies(model.secular.hsec, model.pre.diag));
        const D2Grid g = m.grid();
        run(oracle::composition_consistency(model.secular.hsec, model.pre, g.cells[g.cells.size() / 2].mid(), 3));
        oracle::Check b;
        b.name = "Birkhoff residuals contain zero";
        b.pass = true;
        for (const auto& st : model.pre.birkhoff.stages) {
            b.pass = b.pass && st.residuals_contain_zero;
            b.measured = std::max(b.measured, st.max_residual);
        }
        b.detail = std::to_string(model.pre.birkhoff.stages.size()) + " stages";
        run(b);
    }
    int failed = 0;
    for (const auto& c : checks) failed += c.pass ? 0 : 1;
    out << (failed ? "FAILED " : "OK ") << checks.size() - failed << "/" << checks.size() << " checks passed\n";
    return failed ? 1 : 0;
}

}  // namespace rkam
