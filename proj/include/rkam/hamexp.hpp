#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "rkam/ival.hpp"
#include "rkam/pseries.hpp"

namespace rkam {

// 1 M_J in solar masses.
inline constexpr double kJupiterMass = 9.5458e-4;

class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

class AlphaOutOfRange : public std::domain_error {
public:
    explicit AlphaOutOfRange(double alpha)
        : std::domain_error("Laplace coefficient requested for alpha=" + std::to_string(alpha) +
                            " outside [0, 0.9)") {}
};

class ExpansionDiverged : public std::runtime_error {
public:
    explicit ExpansionDiverged(const std::string& what) : std::runtime_error(what) {}
};

// Gravitational constant 4 pi^2 AU^3 / (Msun yr^2).
Interval gravitational_constant();

struct OrbitalConfig {
    std::string name;
    double m0 = 1.0;             // star [Msun]
    double m1 = 0.0, m2 = 0.0;   // minimal planet masses [Msun]
    double a1 = 0.0, a2 = 0.0;   // semi-major axes [AU]
    Interval e1, e2;             // eccentricities
    Interval w1, w2;             // perihelion arguments [rad]

    // Throws ValidationError listing every violated constraint.
    void validate(bool allow_high_e = false) const;
};

struct ExpansionParams {
    int K_F = 6;
    int N_S = 4;
    double mu = 0.0;
    std::array<int, 2> resonance{2, -1};  // k1* n1 + k2* n2 ~ 0

    void validate() const;
    static ExpansionParams make(const OrbitalConfig& cfg, int K_F, int N_S, std::array<int, 2> resonance);
};

struct SystemFrame {
    Interval G;
    std::array<Interval, 2> beta;     // m0 m_j/(m0+m_j)
    std::array<Interval, 2> mu_grav;  // G (m0+m_j)
    std::array<Interval, 2> Lambda;   // reference fast actions
    std::array<Interval, 2> n;        // mean motions [rad/yr]
    std::array<double, 2> a{};        // semi-major axes [AU]
};

SystemFrame poincare_frame(const OrbitalConfig& cfg);

// Observed (xi1, eta1, xi2, eta2).
std::array<Interval, 4> initial_secular_point(const OrbitalConfig& cfg, const SystemFrame& frame);

// Kepler part to degree 2 in L, constant dropped; fast layout.
PoissonSeries kepler_series(const SystemFrame& frame);

Interval laplace_coeff(double s, int j, double alpha);

// b_{n+1/2}^{(j)}(alpha) for n <= n_max and j <= j_max(n).
class LaplaceTable {
public:
    LaplaceTable() = default;
    LaplaceTable(double alpha, int n_max, double rel_cut = 1e-18, int j_cap = 2000);

    double alpha() const { return alpha_; }
    int n_max() const { return static_cast<int>(b_.size()) - 1; }
    int j_max(int n) const { return static_cast<int>(b_.at(n).size()) - 1; }
    const Interval& at(int n, int j) const { return b_.at(n).at(j); }
    // Fault injection for the negative control.
    void corrupt(int n, int j, double factor);
    // (1 - 2 alpha cos psi + alpha^2)^-(n+1/2) by the cosine series.
    double kernel(int n, double psi) const;

private:
    double alpha_ = 0.0;
    std::vector<std::vector<Interval>> b_;
};

struct DisturbingOptions {
    int grid = 0;              // points per fast angle; 0 picks from alpha and K_F
    bool corrupt_laplace = false;
    int trig_cap = -1;         // defaults to K_F
};

// mu-part of the Hamiltonian in the fast layout, degree <= 1 in L, total
// order <= 2 N_S, |k| <= K_F.
PoissonSeries disturbing_series(const OrbitalConfig& cfg, const SystemFrame& frame, const ExpansionParams& params,
                                const DisturbingOptions& opt = {});

PoissonSeries assemble_htf(const OrbitalConfig& cfg, const SystemFrame& frame, const ExpansionParams& params,
                           const DisturbingOptions& opt = {});

TruncationCaps htf_caps(const ExpansionParams& params);

}  // namespace rkam
