#include "jet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rkam::jet {

namespace {

constexpr std::array<int, kVars> kWeight{0, 0, 1, 1, 1, 1, 2};

bool is_l(int v) { return v < 2; }

}  // namespace

Space::Space(std::array<bool, kVars> active, int weight_cap, int l_cap)
    : active_(active), wcap_(weight_cap), lcap_(l_cap) {
    // Enumerate by recursion over the active symbols.
    Exps cur{};
    auto rec = [&](auto&& self, int v, int w, int l) -> void {
        if (v == kVars) {
            mono_.push_back(cur);
            return;
        }
        if (!active_[v]) {
            cur[v] = 0;
            self(self, v + 1, w, l);
            return;
        }
        for (int e = 0;; ++e) {
            int nw = w + e * kWeight[v];
            int nl = l + (is_l(v) ? e : 0);
            if (nw > wcap_ || nl > lcap_) break;
            if (kWeight[v] == 0 && !is_l(v)) break;
            cur[v] = static_cast<std::uint8_t>(e);
            self(self, v + 1, nw, nl);
        }
        cur[v] = 0;
    };
    rec(rec, 0, 0, 0);

    auto wt = [](const Exps& e) {
        int w = 0;
        for (int v = 0; v < kVars; ++v) w += e[v] * kWeight[v];
        return w;
    };
    auto ld = [](const Exps& e) { return e[0] + e[1]; };
    std::sort(mono_.begin(), mono_.end(), [&](const Exps& a, const Exps& b) {
        int wa = wt(a), wb = wt(b);
        if (wa != wb) return wa < wb;
        if (ld(a) != ld(b)) return ld(a) < ld(b);
        return a > b;
    });
    weight_.resize(mono_.size());
    for (std::size_t i = 0; i < mono_.size(); ++i) weight_[i] = wt(mono_[i]);

    int s = 1;
    for (int v = kVars - 1; v >= 0; --v) {
        stride_[v] = s;
        int range = active_[v] ? (is_l(v) ? lcap_ : wcap_ / kWeight[v]) + 1 : 1;
        s *= range;
    }
    lookup_.assign(static_cast<std::size_t>(s), -1);
    for (std::size_t i = 0; i < mono_.size(); ++i) {
        int code = 0;
        for (int v = 0; v < kVars; ++v) code += mono_[i][v] * stride_[v];
        lookup_[static_cast<std::size_t>(code)] = static_cast<int>(i);
    }

    // Pair table: j runs over the graded prefix that can still fit.
    int n = size();
    row_off_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 0; i < n; ++i) {
        row_off_[i] = static_cast<int>(pj_.size());
        for (int j = 0; j < n && weight_[i] + weight_[j] <= wcap_; ++j) {
            Exps e;
            for (int v = 0; v < kVars; ++v) e[v] = static_cast<std::uint8_t>(mono_[i][v] + mono_[j][v]);
            int t = find(e);
            if (t < 0) continue;
            pj_.push_back(j);
            pt_.push_back(t);
        }
    }
    row_off_[n] = static_cast<int>(pj_.size());
    tmp1_.resize(n);
    tmp2_.resize(n);
}

int Space::find(const Exps& e) const {
    int code = 0, w = 0, l = 0;
    for (int v = 0; v < kVars; ++v) {
        if (e[v] == 0) continue;
        if (!active_[v]) return -1;
        w += e[v] * kWeight[v];
        if (is_l(v)) l += e[v];
        code += e[v] * stride_[v];
    }
    if (w > wcap_ || l > lcap_) return -1;
    return lookup_[static_cast<std::size_t>(code)];
}

int Space::var_index(int v) const {
    Exps e{};
    e[v] = 1;
    return find(e);
}

void Space::mul(const double* a, const double* b, double* out) const {
    int n = size();
    std::fill(out, out + n, 0.0);
    const int* pj = pj_.data();
    const int* pt = pt_.data();
    for (int i = 0; i < n; ++i) {
        double ai = a[i];
        if (ai == 0.0) continue;
        for (int p = row_off_[i], e = row_off_[i + 1]; p < e; ++p) out[pt[p]] += ai * b[pj[p]];
    }
}

void Space::compose(const double* x, const std::vector<double>& c, double* out) const {
    int n = size();
    if (x[0] != 0.0) throw std::logic_error("jet compose: argument has a constant term");
    std::fill(out, out + n, 0.0);
    if (c.empty()) return;
    out[0] = c[0];
    if (c.size() < 2) return;
    std::vector<double>& pw = tmp1_;
    std::vector<double>& nx = tmp2_;
    std::copy(x, x + n, pw.begin());
    for (std::size_t k = 1; k < c.size(); ++k) {
        bool any = false;
        for (int i = 0; i < n; ++i) {
            if (pw[i] != 0.0) any = true;
            out[i] += c[k] * pw[i];
        }
        if (!any || k + 1 == c.size()) break;
        mul(pw.data(), x, nx.data());
        std::swap(pw, nx);
    }
}

CrossMap::CrossMap(const Space& a, const Space& b, const Space& out) : na_(a.size()), nb_(b.size()) {
    map_.assign(static_cast<std::size_t>(na_) * nb_, -1);
    for (int i = 0; i < na_; ++i)
        for (int j = 0; j < nb_; ++j) {
            Exps e;
            for (int v = 0; v < kVars; ++v) e[v] = static_cast<std::uint8_t>(a.exps(i)[v] + b.exps(j)[v]);
            map_[static_cast<std::size_t>(i) * nb_ + j] = out.find(e);
        }
}

void CrossMap::mul_add(const double* a, const double* b, double* out, double scale) const {
    for (int i = 0; i < na_; ++i) {
        double ai = a[i] * scale;
        if (ai == 0.0) continue;
        const int* row = map_.data() + static_cast<std::size_t>(i) * nb_;
        for (int j = 0; j < nb_; ++j)
            if (row[j] >= 0) out[row[j]] += ai * b[j];
    }
}

Embedding::Embedding(const Space& from, const Space& to) {
    map_.resize(from.size());
    for (int i = 0; i < from.size(); ++i) {
        map_[i] = to.find(from.exps(i));
        if (map_[i] < 0) throw std::logic_error("jet embedding: monomial missing from target");
    }
}

void Embedding::add(const double* a, double* out, double scale) const {
    for (std::size_t i = 0; i < map_.size(); ++i) out[map_[i]] += scale * a[i];
}

std::vector<double> taylor_inverse(double c0, int n) {
    std::vector<double> c(static_cast<std::size_t>(n) + 1);
    double p = 1.0 / c0;
    for (int k = 0; k <= n; ++k) {
        c[k] = p;
        p = -p / c0;
    }
    return c;
}

std::vector<double> taylor_sqrt(double c0, int n) {
    // binom(1/2, k) c0^(1/2-k)
    std::vector<double> c(static_cast<std::size_t>(n) + 1);
    double b = 1.0, p = std::sqrt(c0);
    for (int k = 0; k <= n; ++k) {
        c[k] = b * p;
        b *= (0.5 - k) / (k + 1);
        p /= c0;
    }
    return c;
}

std::vector<double> taylor_sin0(int n) {
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    double f = 1.0;
    for (int k = 1; k <= n; ++k) {
        f /= k;
        if (k % 2) c[k] = ((k / 2) % 2 ? -f : f);
    }
    return c;
}

std::vector<double> taylor_cos0(int n) {
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    double f = 1.0;
    c[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        f /= k;
        if (k % 2 == 0) c[k] = ((k / 2) % 2 ? -f : f);
    }
    return c;
}

}  // namespace rkam::jet
