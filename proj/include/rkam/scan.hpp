#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rkam/hamexp.hpp"
#include "rkam/kam.hpp"
#include "rkam/prenorm.hpp"
#include "rkam/secular.hpp"

namespace rkam {

inline constexpr double kDefaultHalfWidth = 0.0025;

struct D2Grid {
    std::vector<Interval> cells;  // sorted by midpoint
    std::string source = "explicit";

    // Cells [m - hw, m + hw] at n midpoints evenly spaced on [lo, hi].
    static D2Grid uniform(double lo, double hi, int n, double half_width = kDefaultHalfWidth);
    static D2Grid explicit_list(std::vector<Interval> cells);
    // Throws ValidationError if empty or some cell leaves (0, 2).
    void validate() const;
};

// Mutual inclination [rad] from D2 with Lambda from the frame and the
// configuration's eccentricity intervals.
Interval d2_to_mutual_inclination(const Interval& d2, const OrbitalConfig& cfg, const SystemFrame& frame);

// Which eccentricities and perihelia set I*: the central values of the
// observed intervals, or the full intervals.
enum class ElementMode { nominal, observed };

struct PipelineParams {
    ExpansionParams expansion;
    int s_max = 8;
    int action_cap = 4;
    int r_bar = 33;
    bool strict = true;
    ElementMode elements = ElementMode::nominal;
};

// Everything that does not depend on D2, built once per scan.
struct SymbolicModel {
    SystemFrame frame;
    std::size_t htf_terms = 0;
    SecularModel secular;
    Prenormalized pre;
};

OrbitalConfig nominal_elements(const OrbitalConfig& cfg);

SymbolicModel build_symbolic_model(const OrbitalConfig& cfg, const PipelineParams& params);

struct ScanResult {
    Interval d2;
    ConvergenceReport report;
    std::optional<Interval> imut;  // empty if D2 is inconsistent with e
    double imut_mid = 0.0;         // NaN when imut is empty
    std::string error;
};

struct ScanOptions {
    int r_bar = 33;
    int action_cap = 4;
    bool strict = true;
    int workers = 1;
};

// One cell: translate, fix D2, normalize.
ConvergenceReport run_cell(const PoissonSeries& h3, const std::array<Interval, 2>& istar, const Interval& d2,
                           const ScanOptions& opt);

std::vector<ScanResult> run_scan(const PoissonSeries& h3, const std::array<Interval, 2>& istar,
                                 const OrbitalConfig& cfg, const SystemFrame& frame, const D2Grid& grid,
                                 const ScanOptions& opt);

std::vector<ScanResult> run_scan(const SymbolicModel& model, const OrbitalConfig& cfg, const D2Grid& grid,
                                 const ScanOptions& opt);

struct ScanSummary {
    int n_cells = 0;
    int n_convergent = 0;
    std::optional<double> max_convergent_d2_mid;
    std::optional<double> max_stable_imut_deg;  // midpoint of that cell's i_mut
};

ScanSummary summarize(const std::vector<ScanResult>& results);

}  // namespace rkam
