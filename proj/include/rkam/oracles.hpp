#pragma once

// Independent reference computations used by the test suite, the acceptance
// runner and the `verify` subcommand. None of these share code paths with
// the pipeline beyond the Interval type and the series container.

#include <cstdint>
#include <string>
#include <vector>

#include "rkam/hamexp.hpp"
#include "rkam/ival.hpp"
#include "rkam/prenorm.hpp"
#include "rkam/pseries.hpp"

namespace rkam::oracle {

struct Check {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
    double seconds = 0.0;
};

// Random sampling of every interval operation against 50-digit arithmetic.
Check interval_containment(std::uint64_t seed, int samples_per_op);

// Antisymmetry, Jacobi and Leibniz identities on random series.
Check bracket_algebra(std::uint64_t seed, int n_series);

// b_s^(j)(alpha) by the trapezoidal rule on the defining periodic integral,
// in 50-digit arithmetic.
double laplace_quadrature(double s, int j, double alpha);

// Exact perturbing function -G m1 m2/|r1-r2| + beta1 beta2 (v1.v2)/m0 at a
// point given in the same variables as the expansion. Angles of both
// planets are measured from the node line on the invariable plane.
double perturbation_exact(const OrbitalConfig& cfg, const SystemFrame& fr, const std::array<double, 4>& xieta,
                          double d2, double lam1, double lam2);

// Laplace coefficient table (from the series evaluator) compared with
// quadrature. `corrupt` perturbs one entry to exercise the negative control.
Check laplace_table_vs_quadrature(double alpha, int n_half, int jmax, bool corrupt);

// Taylor-Fourier coefficients of the disturbing function against
// Cauchy-integral x 2-D quadrature extraction from the exact function.
// Synthetic two-planet system with a2/a1 = 1/alpha.
struct DisturbingOracleOptions {
    double alpha = 0.4;
    double ecc = 0.05;
    double imut_deg = 2.0;
    int max_harmonic = 4;
    int max_order = 4;
    double rel_tol = 1e-6;
    bool corrupt_laplace = false;
};
Check disturbing_vs_quadrature(const DisturbingOracleOptions& opt);

// Circular coplanar slice of the expansion against the Laplace-coefficient
// expansion of 1/Delta.
Check circular_slice(const OrbitalConfig& cfg, bool corrupt_laplace);

// Second derivative of the Kepler part by Richardson-extrapolated finite
// differences in extended precision.
Check kepler_quadratic(const OrbitalConfig& cfg);

// Secular frequencies against a dense general eigensolver applied to A B,
// with A and B the midpoint xi and eta blocks of the quadratic part.
Check eigenfrequencies(const PoissonSeries& hsec, const Diagonalization& d);

// Pointwise consistency of the explicit coordinate changes: hsec against
// the diagonalized series, the diagonalized series against its action-angle
// form, and H^(III) against the translated series at D2 = d2.
Check composition_consistency(const PoissonSeries& hsec, const Prenormalized& pre, double d2, std::uint64_t seed);

}  // namespace rkam::oracle
