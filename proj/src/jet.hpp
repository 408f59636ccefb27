#pragma once

// Truncated multivariate Taylor jets in double precision, used to expand the
// orbital elements and the interaction term around circular orbits. Symbols
// are, in order, L1 L2 xi1 eta1 xi2 eta2 D2. Eccentricity symbols weigh 1,
// D2 weighs 2, L weighs 0 and its total degree is capped separately.

#include <array>
#include <cstdint>
#include <vector>

namespace rkam::jet {

inline constexpr int kVars = 7;
using Exps = std::array<std::uint8_t, kVars>;

class Space {
public:
    Space(std::array<bool, kVars> active, int weight_cap, int l_cap);

    int size() const { return static_cast<int>(mono_.size()); }
    int weight_cap() const { return wcap_; }
    int l_cap() const { return lcap_; }
    const Exps& exps(int i) const { return mono_[i]; }
    int weight(int i) const { return weight_[i]; }
    // Index of a monomial or -1 when it lies outside the space.
    int find(const Exps& e) const;
    int var_index(int v) const;  // index of the degree-1 monomial in symbol v

    // out = a * b (out must not alias a or b).
    void mul(const double* a, const double* b, double* out) const;
    // out = sum_n c[n] x^n where x has no constant term.
    void compose(const double* x, const std::vector<double>& c, double* out) const;
    // Nilpotency bound: x^n vanishes for n > max_power() when x(0) = 0.
    int max_power() const { return wcap_ + lcap_; }

private:
    std::array<bool, kVars> active_;
    int wcap_, lcap_;
    std::vector<Exps> mono_;
    std::vector<int> weight_;
    std::array<int, kVars> stride_{};
    std::vector<int> lookup_;
    std::vector<int> row_off_, pj_, pt_;
    mutable std::vector<double> tmp1_, tmp2_;
};

// Product of jets living on disjoint symbol sets, landing in a third space.
class CrossMap {
public:
    CrossMap(const Space& a, const Space& b, const Space& out);
    // out += a * b
    void mul_add(const double* a, const double* b, double* out, double scale = 1.0) const;

private:
    int na_, nb_;
    std::vector<int> map_;
};

// Index map from a subspace into a larger space.
class Embedding {
public:
    Embedding(const Space& from, const Space& to);
    void add(const double* a, double* out, double scale = 1.0) const;

private:
    std::vector<int> map_;
};

// Taylor coefficients of elementary functions about c0.
std::vector<double> taylor_inverse(double c0, int n);
std::vector<double> taylor_sqrt(double c0, int n);
std::vector<double> taylor_sin0(int n);  // sin about 0
std::vector<double> taylor_cos0(int n);  // cos about 0

}  // namespace rkam::jet
