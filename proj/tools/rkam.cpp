// rkam: scan, verify, expand and classify from the command line.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rkam/cli.hpp"

namespace {

struct Common {
    std::string system;
    std::string manifest;
    std::string grid;
    std::string preset;
    std::string out;
    int workers = 0;
    bool allow_high_e = false;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--system", c.system, "builtin system: HD141399, HD143761, HD40307");
    sub->add_option("--manifest", c.manifest, "run manifest (key = value lines)");
    sub->add_option("--grid", c.grid, "D2 grid lo:hi:n[:halfwidth]");
    sub->add_option("--preset", c.preset, "desk or paper");
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--workers", c.workers, "worker threads for the D2 scan")->check(CLI::PositiveNumber);
    sub->add_flag("--allow-high-e", c.allow_high_e, "accept eccentricities of 0.1 and above");
}

rkam::RunManifest resolve(const Common& c) {
    if (c.manifest.empty() && c.system.empty()) throw rkam::ValidationError("give --system or --manifest");
    rkam::RunManifest m = c.manifest.empty() ? rkam::default_manifest(c.system) : rkam::load_manifest(c.manifest);
    if (!c.manifest.empty() && !c.system.empty() && rkam::catalog_entry(c.system).id != m.system)
        throw rkam::ValidationError("--system disagrees with the manifest");
    if (!c.preset.empty()) rkam::apply_preset(m, rkam::parse_preset(c.preset));
    if (!c.grid.empty()) {
        m.grid_spec = c.grid;
        m.cells.clear();
    }
    if (!c.out.empty()) m.out_dir = c.out;
    if (c.workers > 0) m.workers = c.workers;
    if (c.allow_high_e) m.allow_high_e = true;
    m.validate();
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kolmogorov normalization scan of secular two-planet models"};
    app.require_subcommand(1);

    Common scan_opt, verify_opt, expand_opt;
    auto* scan = app.add_subcommand("scan", "classify every D2 cell of a grid");
    add_common(scan, scan_opt);
    std::string save_path;
    scan->add_option("--save-manifest", save_path, "write the resolved manifest and exit");

    auto* verify = app.add_subcommand("verify", "run the oracle battery");
    add_common(verify, verify_opt);
    rkam::VerifyOptions vo;
    verify->add_flag("--inject-fault", vo.inject_fault, "corrupt the Laplace table; every dependent check must fail");
    verify->add_flag("--quick", vo.quick, "skip the disturbing-function quadrature");

    auto* expand = app.add_subcommand("expand", "write the secular and prenormalized Hamiltonians");
    add_common(expand, expand_opt);
    std::optional<double> d2;
    expand->add_option("--d2", d2, "also write H^(0) at this D2");

    auto* classify = app.add_subcommand("classify", "classify a chi2 norm sequence");
    std::string norms;
    int r_bar = 33;
    bool lenient = false;
    classify->add_option("norms", norms, "CSV with a chi2_norm column, or one norm per line")->required();
    classify->add_option("--r-bar", r_bar, "expected number of steps")->check(CLI::PositiveNumber);
    classify->add_flag("--lenient", lenient, "ratio test only at the last step");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*scan) {
            rkam::RunManifest m = resolve(scan_opt);
            if (!save_path.empty()) {
                std::ofstream(save_path) << rkam::save_manifest(m);
                return 0;
            }
            return rkam::cmd_scan(m, std::cerr);
        }
        if (*verify) return rkam::cmd_verify(resolve(verify_opt), vo, std::cout);
        if (*expand) return rkam::cmd_expand(resolve(expand_opt), d2, std::cerr);
        if (*classify) return rkam::cmd_classify(norms, r_bar, !lenient, std::cout);
    } catch (const rkam::ParseError& e) {
        std::cerr << "manifest error: " << e.what() << "\n";
        return 2;
    } catch (const rkam::ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
