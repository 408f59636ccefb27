#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "rkam/hamexp.hpp"
#include "rkam/pseries.hpp"

namespace rkam {

class MixedSignFrequencies : public std::runtime_error {
public:
    explicit MixedSignFrequencies(const std::string& w) : std::runtime_error(w) {}
};

class DegenerateQuadraticPart : public std::runtime_error {
public:
    explicit DegenerateQuadraticPart(const std::string& w) : std::runtime_error(w) {}
};

class NegativeActionCenter : public std::runtime_error {
public:
    explicit NegativeActionCenter(const std::string& w) : std::runtime_error(w) {}
};

// xi = M x and eta = N y with N = M^-T, which is canonical. M is built in
// floating point from the midpoint blocks A (xi) and B (eta) so that both
// become diag(nu); N encloses the exact inverse transpose. M is row major.
struct Diagonalization {
    double theta = 0.0;                   // rotation angle of the inner eigenproblem
    std::array<double, 4> M{1, 0, 0, 1};
    std::array<Interval, 4> N{Interval(1.0), Interval(0.0), Interval(0.0), Interval(1.0)};
    std::array<Interval, 2> nu;           // secular frequencies, residual inflated
    PoissonSeries h;                      // cartesian layout in (x, y), D2 symbolic
    Interval offdiag_residual{0.0};       // hull of the dropped quadratic residuals
};

Diagonalization diagonalize_quadratic(const PoissonSeries& hsec);

// Substitutes x_j = sqrt(2) u_j cos phi_j, y_j = sqrt(2) u_j sin phi_j.
PoissonSeries to_action_angle(const PoissonSeries& hxy, int s_max);

struct BirkhoffStage {
    int order = 0;                     // s = d2 exponent + u degree / 2
    std::vector<PoissonSeries> gens;   // one per (d2, u degree) family, in order of application
    double max_residual = 0.0;         // largest |removed coefficient| after the transform
    bool residuals_contain_zero = true;
};

struct BirkhoffResult {
    PoissonSeries h;
    std::vector<BirkhoffStage> stages;
};

// Removes the angle dependence of every family of order 2..last_order.
BirkhoffResult birkhoff_normalize(const PoissonSeries& haa, const std::array<Interval, 2>& nu, int s_max,
                                  int last_order = 3);

// <{nu.I, B}> solve for one family: nu . dB/dphi = f - <f>.
PoissonSeries solve_birkhoff_homological(const PoissonSeries& f, const std::array<Interval, 2>& nu);

// I*_j = (x_j^2 + y_j^2)/2 at the observed point, averaged over a common
// rotation of both perihelia so that only their difference enters.
std::array<Interval, 2> compute_initial_actions(const Diagonalization& d, const OrbitalConfig& cfg,
                                                const SystemFrame& frame);

// I = p + I*, then D2 := d2. Half-integer powers of I are expanded to
// p-degree `action_cap`.
PoissonSeries translate_and_fix_d2(const PoissonSeries& h3, const std::array<Interval, 2>& istar, const Interval& d2,
                                   int action_cap = 4);

// Gradient of the angle-free p-linear part.
std::array<Interval, 2> frequency_vector(const PoissonSeries& htr);

struct Prenormalized {
    Diagonalization diag;
    BirkhoffResult birkhoff;
    std::array<Interval, 2> istar;
    int s_max = 0;
};

Prenormalized prenormalize(const PoissonSeries& hsec, const OrbitalConfig& cfg, const SystemFrame& frame, int s_max);

}  // namespace rkam
