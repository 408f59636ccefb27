#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rkam/pseries.hpp"

namespace rkam {

class ResonanceAbort : public std::runtime_error {
public:
    ResonanceAbort(const std::array<int, 2>& k, int r, const Interval& divisor)
        : std::runtime_error("k.omega contains zero for k=(" + std::to_string(k[0]) + "," + std::to_string(k[1]) +
                             ") at step " + std::to_string(r)),
          k_(k), r_(r), divisor_(divisor) {}
    const std::array<int, 2>& harmonic() const { return k_; }
    int step() const { return r_; }
    const Interval& divisor() const { return divisor_; }

private:
    std::array<int, 2> k_;
    int r_;
    Interval divisor_;
};

class OverflowAbort : public std::runtime_error {
public:
    explicit OverflowAbort(const std::string& w) : std::runtime_error(w) {}
};

inline constexpr double kOverflowGuard = 1e300;

// H^(r) split by column: col[s] holds the terms of order s, whose harmonics
// have |k|_1 <= 2s. The term omega.p is kept apart from col[0].
struct KamState {
    int r = 0;
    int r_bar = 0;
    std::vector<PoissonSeries> col;  // translated layout, indices 0..r_bar
    std::array<Interval, 2> omega;
    std::vector<double> chi1_norms;
    std::vector<double> chi2_norms;
    double max_residual = 0.0;       // largest |zeroed coefficient|
    bool residuals_contain_zero = true;
};

// Splits a translated H^(0) into columns. Angle-free terms linear in p form
// omega^(0); angle-free constants are dropped; angle-free terms of higher
// degree go to column 0; a term with harmonic k goes to column ceil(|k|_1/2).
KamState make_kam_state(const PoissonSeries& h0, int r_bar);

// Solves omega . d chi/dq = f - <f> term by term. Throws ResonanceAbort.
PoissonSeries solve_kolmogorov_homological(const PoissonSeries& f, const std::array<Interval, 2>& omega, int r);

// Throws ResonanceAbort unless k.omega excludes 0 for 0 < |k|_1 <= max_k.
void check_nonresonance(const std::array<Interval, 2>& omega, int max_k, int r);

// One Kolmogorov step r = state.r + 1.
KamState kolmogorov_step(const KamState& state);

enum class Verdict { convergent, nonconvergent, aborted };
enum class AbortReason { none, resonance, norm_blowup, degenerate };

std::string to_string(Verdict v);
std::string to_string(AbortReason a);

struct ConvergenceReport {
    Verdict verdict = Verdict::aborted;
    AbortReason abort_reason = AbortReason::none;
    int r_reached = 0;
    std::vector<double> chi1_norms;
    std::vector<double> chi2_norms;
    std::array<Interval, 2> final_omega;
    std::string detail;
    bool residuals_contain_zero = true;
};

// strict: any single ratio violation counts; otherwise the violation must
// hold from some r up to r_bar.
Verdict classify_convergence(const std::vector<double>& norms, int r_bar, bool strict = true);

ConvergenceReport run_normalization(const PoissonSeries& h0, int r_bar, bool strict = true);

}  // namespace rkam
