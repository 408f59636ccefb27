#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rkam/ival.hpp"

namespace rkam {

class LayoutMismatch : public std::logic_error {
public:
    LayoutMismatch() : std::logic_error("Poisson series layouts differ") {}
};

class MissingBlock : public std::logic_error {
public:
    explicit MissingBlock(const std::string& what) : std::logic_error(what) {}
};

// Which symbols a series is written in.
//  fast:        L1 L2 xi1 eta1 xi2 eta2 | lam1 lam2
//  cartesian:   xi1 eta1 xi2 eta2        (or x1 y1 x2 y2 after diagonalization)
//  action_angle u1 u2 | phi1 phi2        (u_j = sqrt(I_j))
//  translated:  p1 p2 | q1 q2
// D2 is carried as a separate exponent in every layout.
enum class LayoutKind : std::uint8_t { fast, cartesian, action_angle, translated };

struct VariableLayout {
    LayoutKind kind = LayoutKind::cartesian;
    bool xy_names = false;  // cartesian only: print x/y instead of xi/eta

    static constexpr int kMaxPoly = 6;
    static constexpr int kMaxAng = 2;

    int n_dof() const { return 2; }
    int n_poly() const;
    int n_ang() const;
    bool is_action(int poly_index) const;  // counts toward the action-degree cap
    bool is_ecc(int poly_index) const;     // counts toward the e,i total order
    std::string poly_name(int i) const;
    std::string ang_name(int i) const;
    bool operator==(const VariableLayout& o) const { return kind == o.kind; }
    bool operator!=(const VariableLayout& o) const { return kind != o.kind; }

    static VariableLayout fast() { return {LayoutKind::fast, false}; }
    static VariableLayout cartesian(bool xy = false) { return {LayoutKind::cartesian, xy}; }
    static VariableLayout action_angle() { return {LayoutKind::action_angle, false}; }
    static VariableLayout translated() { return {LayoutKind::translated, false}; }
};

enum class Parity : std::uint8_t { cos = 0, sin = 1 };

// Negative entries switch a cap off.
struct TruncationCaps {
    int max_trig_degree = -1;
    int max_total_order = -1;
    int max_action_degree = -1;
    int s_max = -1;
};

struct PsTerm {
    int d2_exp = 0;
    std::array<int, VariableLayout::kMaxPoly> poly_exp{};
    std::array<int, VariableLayout::kMaxAng> k{};
    Parity parity = Parity::cos;
    Interval coeff;
};

// Packed (d2, poly, k, parity) key; 5 bits per exponent, 8 per harmonic.
using PsKey = std::uint64_t;

struct KeyCodec {
    static constexpr int kExpBits = 5;
    static constexpr int kMaxExp = (1 << kExpBits) - 1;
    static constexpr int kHarmOffset = 128;
    static PsKey pack(int d2, const std::array<int, 6>& e, const std::array<int, 2>& k, Parity par);
    static int d2(PsKey key) { return static_cast<int>((key >> 47) & 31u); }
    static int exp(PsKey key, int i) { return static_cast<int>((key >> (17 + 5 * (5 - i))) & 31u); }
    static int harm(PsKey key, int j) {
        return static_cast<int>((key >> (1 + 8 * (1 - j))) & 255u) - kHarmOffset;
    }
    static Parity parity(PsKey key) { return static_cast<Parity>(key & 1u); }
    static std::array<int, 6> exps(PsKey key);
    static std::array<int, 2> harms(PsKey key);
};

class PoissonSeries {
public:
    using Entry = std::pair<PsKey, Interval>;

    PoissonSeries() = default;
    explicit PoissonSeries(VariableLayout layout, TruncationCaps caps = {}) : layout_(layout), caps_(caps) {}

    const VariableLayout& layout() const { return layout_; }
    const TruncationCaps& caps() const { return caps_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    const std::vector<Entry>& entries() const { return terms_; }
    PsTerm term(std::size_t i) const;
    std::vector<PsTerm> terms() const;

    // Structural degrees of a key in this layout.
    int trig_degree(PsKey key) const;
    int ecc_degree(PsKey key) const;
    int action_degree(PsKey key) const;
    int total_order(PsKey key) const { return 2 * KeyCodec::d2(key) + ecc_degree(key); }
    bool within_caps(PsKey key) const;

    // Returns the stored coefficient or [0,0].
    Interval coeff(const PsTerm& t) const;
    Interval coeff(PsKey key) const;

    // Replaces the caps and drops every term that violates them.
    void set_caps(const TruncationCaps& caps);

    // Build from a canonicalized term list (duplicates are summed).
    static PoissonSeries from_terms(VariableLayout layout, const std::vector<PsTerm>& terms,
                                    TruncationCaps caps = {});
    static PoissonSeries constant(VariableLayout layout, const Interval& c, TruncationCaps caps = {});
    // Single monomial c * D2^d2 * prod(sym^e) * trig(k).
    static PoissonSeries monomial(VariableLayout layout, const Interval& c, int d2,
                                  const std::array<int, 6>& e, const std::array<int, 2>& k = {0, 0},
                                  Parity par = Parity::cos, TruncationCaps caps = {});

    // Canonicalizes (k sign, sin at k=0) and enforces caps.
    static bool canonicalize(std::array<int, 2>& k, Parity par, Interval& c);

    // Internal mutable construction.
    class Builder;

    std::string to_text() const;
    static PoissonSeries from_text(const std::string& text, VariableLayout layout, TruncationCaps caps = {});

    // Pointwise evaluation with doubles: poly values in layout order, angle
    // values, and D2.
    double eval(const std::array<double, 6>& poly, const std::array<double, 2>& ang, double d2) const;
    Interval eval(const std::array<Interval, 6>& poly, const std::array<Interval, 2>& ang,
                  const Interval& d2) const;

private:
    VariableLayout layout_{};
    TruncationCaps caps_{};
    std::vector<Entry> terms_;  // sorted by key, no exact zeros

    friend class Builder;
};

class PoissonSeries::Builder {
public:
    Builder(VariableLayout layout, TruncationCaps caps);
    void add(PsKey key, const Interval& c);
    // Adds c * trig with harmonic k (not yet canonical).
    void add_raw(int d2, const std::array<int, 6>& e, std::array<int, 2> k, Parity par, Interval c);
    void add_series(const PoissonSeries& s, const Interval& scale);
    PoissonSeries finish();
    const PoissonSeries& proto() const { return proto_; }

private:
    PoissonSeries proto_;
    std::unordered_map<PsKey, std::size_t> index_;
    std::vector<Entry> acc_;
};

enum class BracketBlock { full, fast, secular };

PoissonSeries operator+(const PoissonSeries& a, const PoissonSeries& b);
PoissonSeries operator-(const PoissonSeries& a, const PoissonSeries& b);
PoissonSeries operator*(const Interval& s, const PoissonSeries& a);

PoissonSeries ps_mul(const PoissonSeries& a, const PoissonSeries& b);
PoissonSeries ps_poisson(const PoissonSeries& a, const PoissonSeries& b, BracketBlock block = BracketBlock::full);

// sum_{j<=max_brackets} (1/j!) L_chi^j H with L_chi F = {F, chi}. With
// max_brackets < 0 the series runs until a bracket comes back empty.
PoissonSeries ps_lie_transform(const PoissonSeries& h, const PoissonSeries& chi, int max_brackets = -1,
                               BracketBlock block = BracketBlock::full);

// Keeps terms whose harmonic vanishes on the selected angles.
PoissonSeries ps_average(const PoissonSeries& h, const std::array<bool, 2>& angles = {true, true});

struct TruncationRule {
    int trig_degree = -1;
    int total_order_n = -1;  // keeps 2*d2 + ecc degree <= 2N
    int action_degree = -1;
};
PoissonSeries ps_truncate(const PoissonSeries& h, const TruncationRule& rule);

// Sum over terms of [mig, mag] of the coefficient.
Interval ps_norm(const PoissonSeries& h);

// Drops every term of positive degree in the given poly symbols (sets them to 0).
PoissonSeries ps_zero_symbols(const PoissonSeries& h, const std::array<bool, 6>& zero);

// Replaces D2 by a numeric interval.
PoissonSeries ps_fix_d2(const PoissonSeries& h, const Interval& d2);

// Terms whose key satisfies the predicate.
template <class Pred>
PoissonSeries ps_filter(const PoissonSeries& h, Pred pred) {
    PoissonSeries::Builder b(h.layout(), h.caps());
    for (const auto& [key, c] : h.entries())
        if (pred(key)) b.add(key, c);
    return b.finish();
}

// Max coefficient magnitude (upper bound).
double ps_max_mag(const PoissonSeries& h);

// True if every coefficient of the series contains zero.
bool ps_all_contain_zero(const PoissonSeries& h);

std::ostream& operator<<(std::ostream& os, const PoissonSeries& s);

}  // namespace rkam
