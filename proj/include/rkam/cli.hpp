#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rkam/hamexp.hpp"
#include "rkam/scan.hpp"

namespace rkam {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& field, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + (field.empty() ? "" : ", field '" + field + "'") +
                             ": " + what),
          line_(line), field_(field) {}
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

// Orbital elements in the units of the catalog: planet masses in M_J,
// angles in degrees, +- errors as half-widths.
struct CatalogElements {
    double m0 = 1.0;
    double m1_mj = 0.0, m2_mj = 0.0;
    double a1 = 0.0, a2 = 0.0;
    double e1 = 0.0, e1_err = 0.0, e2 = 0.0, e2_err = 0.0;
    double w1_deg = 0.0, w1_err = 0.0, w2_deg = 0.0, w2_err = 0.0;

    OrbitalConfig to_config(const std::string& name) const;
};

struct CatalogEntry {
    std::string id;
    CatalogElements elements;
    std::array<int, 2> resonance{};
    int K_F = 0;
    int N_S = 0;
};

const std::vector<CatalogEntry>& builtin_catalog();
const CatalogEntry& catalog_entry(const std::string& id);  // ValidationError if unknown

enum class Preset { desk, paper };

struct RunManifest {
    std::string system;
    CatalogElements elements;
    std::array<int, 2> resonance{};
    int K_F = 0;
    int N_S = 0;
    int s_max = 8;
    int action_cap = 4;
    int r_bar = 33;
    bool strict = true;
    Preset preset = Preset::desk;
    ElementMode element_mode = ElementMode::nominal;
    // Either a uniform grid "lo:hi:n[:halfwidth]" or explicit midpoints.
    std::string grid_spec;
    std::vector<double> cells;
    double half_width = kDefaultHalfWidth;
    std::string out_dir = "rkam_out";
    int workers = 1;
    bool allow_high_e = false;

    OrbitalConfig config() const { return elements.to_config(system); }
    PipelineParams pipeline() const;
    D2Grid grid() const;
    // Throws ValidationError listing every violated constraint.
    void validate() const;
};

inline constexpr const char* kDefaultGrid = "0.0064:0.1064:21";

// Catalog defaults for a system under a preset.
RunManifest default_manifest(const std::string& system, Preset preset = Preset::desk);
void apply_preset(RunManifest& m, Preset preset);

// "key = value" lines; '#' starts a comment. Keys set after `system` and
// `preset` override their defaults.
RunManifest parse_manifest(const std::string& text);
RunManifest load_manifest(const std::string& path);
std::string save_manifest(const RunManifest& m);

D2Grid parse_grid(const std::string& spec);
std::string to_string(Preset p);
Preset parse_preset(const std::string& s);

// Output writers; every number is printed with 17 significant digits so
// that reruns are byte-identical.
std::string scan_csv(const std::vector<ScanResult>& results);
std::string scan_json(const RunManifest& m, const std::vector<ScanResult>& results);
std::string norms_csv(const ConvergenceReport& rep);
std::string summary_json(const RunManifest& m, const std::vector<ScanResult>& results);
std::string norms_file_name(std::size_t cell);

// chi2 column of a norms file written by norms_csv.
std::vector<double> read_chi2_norms(const std::string& text);

// Subcommands. Progress goes to `log`; the return value is the exit status.
int cmd_scan(const RunManifest& m, std::ostream& log);
int cmd_expand(const RunManifest& m, std::optional<double> d2, std::ostream& log);
int cmd_classify(const std::string& norms_path, int r_bar, bool strict, std::ostream& out);

struct VerifyOptions {
    bool inject_fault = false;  // corrupt the Laplace table in every dependent check
    bool quick = false;         // skip the disturbing-function quadrature
};
int cmd_verify(const RunManifest& m, const VerifyOptions& opt, std::ostream& out);

}  // namespace rkam
