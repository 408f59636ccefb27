#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "rkam/hamexp.hpp"
#include "rkam/pseries.hpp"

namespace rkam {

class SmallDivisor : public std::runtime_error {
public:
    SmallDivisor(const std::array<int, 2>& k, const Interval& divisor)
        : std::runtime_error("small divisor k.n with k=(" + std::to_string(k[0]) + "," + std::to_string(k[1]) +
                             ") contains zero"),
          k_(k), divisor_(divisor) {}
    const std::array<int, 2>& harmonic() const { return k_; }
    const Interval& divisor() const { return divisor_; }

private:
    std::array<int, 2> k_;
    Interval divisor_;
};

// chi with {n.L, chi} + f = <f>_lambda, i.e. n . d chi/d lambda = f - <f>.
// f must be free of L. Throws SmallDivisor when some k.n contains 0.
PoissonSeries solve_fast_homological(const PoissonSeries& f, const std::array<Interval, 2>& n);

// <{a, b}>_lambda computed one harmonic at a time.
PoissonSeries averaged_bracket(const PoissonSeries& a, const PoissonSeries& b, BracketBlock block);

struct SecularModel {
    PoissonSeries hsec;  // cartesian layout, D2 symbolic, constants dropped
    PoissonSeries chi;   // fast layout generator of the averaging step
    int n_s = 0;
};

// order_two = false keeps only the plain average (order one in the masses).
SecularModel build_secular(const PoissonSeries& htf, const SystemFrame& frame, const ExpansionParams& params,
                          bool order_two = true);

// Fast-layout series at L = 0 and lambda-free to the cartesian layout.
PoissonSeries fast_to_cartesian(const PoissonSeries& h, const TruncationCaps& caps);

}  // namespace rkam
