#include "rkam/pseries.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>

namespace rkam {

// ---------------------------------------------------------------- layout

int VariableLayout::n_poly() const {
    switch (kind) {
        case LayoutKind::fast: return 6;
        case LayoutKind::cartesian: return 4;
        case LayoutKind::action_angle: return 2;
        case LayoutKind::translated: return 2;
    }
    return 0;
}

int VariableLayout::n_ang() const { return kind == LayoutKind::cartesian ? 0 : 2; }

bool VariableLayout::is_action(int i) const {
    switch (kind) {
        case LayoutKind::fast: return i < 2;
        case LayoutKind::translated: return i < 2;
        default: return false;
    }
}

bool VariableLayout::is_ecc(int i) const {
    switch (kind) {
        case LayoutKind::fast: return i >= 2 && i < 6;
        case LayoutKind::cartesian: return i < 4;
        case LayoutKind::action_angle: return i < 2;
        case LayoutKind::translated: return false;
    }
    return false;
}

std::string VariableLayout::poly_name(int i) const {
    static const char* fast_n[] = {"L1", "L2", "xi1", "eta1", "xi2", "eta2"};
    static const char* cart_n[] = {"xi1", "eta1", "xi2", "eta2"};
    static const char* xy_n[] = {"x1", "y1", "x2", "y2"};
    static const char* aa_n[] = {"u1", "u2"};
    static const char* tr_n[] = {"p1", "p2"};
    switch (kind) {
        case LayoutKind::fast: return fast_n[i];
        case LayoutKind::cartesian: return xy_names ? xy_n[i] : cart_n[i];
        case LayoutKind::action_angle: return aa_n[i];
        case LayoutKind::translated: return tr_n[i];
    }
    return "?";
}

std::string VariableLayout::ang_name(int i) const {
    static const char* fast_n[] = {"lam1", "lam2"};
    static const char* aa_n[] = {"phi1", "phi2"};
    static const char* tr_n[] = {"q1", "q2"};
    switch (kind) {
        case LayoutKind::fast: return fast_n[i];
        case LayoutKind::action_angle: return aa_n[i];
        case LayoutKind::translated: return tr_n[i];
        default: return "?";
    }
}

// ---------------------------------------------------------------- keys

PsKey KeyCodec::pack(int d2, const std::array<int, 6>& e, const std::array<int, 2>& k, Parity par) {
    if (d2 < 0 || d2 > kMaxExp) throw std::out_of_range("D2 exponent outside packable range");
    PsKey key = static_cast<PsKey>(d2) << 47;
    for (int i = 0; i < 6; ++i) {
        if (e[i] < 0 || e[i] > kMaxExp) throw std::out_of_range("exponent outside packable range");
        key |= static_cast<PsKey>(e[i]) << (17 + 5 * (5 - i));
    }
    for (int j = 0; j < 2; ++j) {
        int h = k[j] + kHarmOffset;
        if (h < 0 || h > 255) throw std::out_of_range("harmonic outside packable range");
        key |= static_cast<PsKey>(h) << (1 + 8 * (1 - j));
    }
    return key | static_cast<PsKey>(par);
}

std::array<int, 6> KeyCodec::exps(PsKey key) {
    std::array<int, 6> e{};
    for (int i = 0; i < 6; ++i) e[i] = exp(key, i);
    return e;
}

std::array<int, 2> KeyCodec::harms(PsKey key) { return {harm(key, 0), harm(key, 1)}; }

// ---------------------------------------------------------------- series

int PoissonSeries::trig_degree(PsKey key) const {
    return std::abs(KeyCodec::harm(key, 0)) + std::abs(KeyCodec::harm(key, 1));
}

int PoissonSeries::ecc_degree(PsKey key) const {
    int d = 0;
    for (int i = 0; i < layout_.n_poly(); ++i)
        if (layout_.is_ecc(i)) d += KeyCodec::exp(key, i);
    return d;
}

int PoissonSeries::action_degree(PsKey key) const {
    int d = 0;
    for (int i = 0; i < layout_.n_poly(); ++i)
        if (layout_.is_action(i)) d += KeyCodec::exp(key, i);
    return d;
}

bool PoissonSeries::within_caps(PsKey key) const {
    if (caps_.max_trig_degree >= 0 && trig_degree(key) > caps_.max_trig_degree) return false;
    if (caps_.max_action_degree >= 0 && action_degree(key) > caps_.max_action_degree) return false;
    if (caps_.max_total_order >= 0 || caps_.s_max >= 0) {
        int tot = total_order(key);
        if (caps_.max_total_order >= 0 && tot > caps_.max_total_order) return false;
        if (caps_.s_max >= 0 && (tot + 1) / 2 > caps_.s_max) return false;
    }
    return true;
}

PsTerm PoissonSeries::term(std::size_t i) const {
    const auto& [key, c] = terms_.at(i);
    PsTerm t;
    t.d2_exp = KeyCodec::d2(key);
    t.poly_exp = KeyCodec::exps(key);
    t.k = KeyCodec::harms(key);
    t.parity = KeyCodec::parity(key);
    t.coeff = c;
    return t;
}

std::vector<PsTerm> PoissonSeries::terms() const {
    std::vector<PsTerm> out;
    out.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) out.push_back(term(i));
    return out;
}

Interval PoissonSeries::coeff(PsKey key) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                               [](const Entry& e, PsKey k) { return e.first < k; });
    if (it != terms_.end() && it->first == key) return it->second;
    return Interval(0.0);
}

Interval PoissonSeries::coeff(const PsTerm& t) const {
    std::array<int, 2> k = t.k;
    Interval c(1.0);
    if (!canonicalize(k, t.parity, c)) return Interval(0.0);
    Interval v = coeff(KeyCodec::pack(t.d2_exp, t.poly_exp, k, t.parity));
    return c.lo < 0 ? -v : v;
}

void PoissonSeries::set_caps(const TruncationCaps& caps) {
    caps_ = caps;
    std::vector<Entry> kept;
    kept.reserve(terms_.size());
    for (auto& e : terms_)
        if (within_caps(e.first)) kept.push_back(e);
    terms_.swap(kept);
}

bool PoissonSeries::canonicalize(std::array<int, 2>& k, Parity par, Interval& c) {
    int first = k[0] != 0 ? k[0] : k[1];
    if (first == 0) return par == Parity::cos;
    if (first < 0) {
        k[0] = -k[0];
        k[1] = -k[1];
        if (par == Parity::sin) c = -c;
    }
    return true;
}

PoissonSeries PoissonSeries::from_terms(VariableLayout layout, const std::vector<PsTerm>& terms,
                                        TruncationCaps caps) {
    Builder b(layout, caps);
    for (const auto& t : terms) b.add_raw(t.d2_exp, t.poly_exp, t.k, t.parity, t.coeff);
    return b.finish();
}

PoissonSeries PoissonSeries::constant(VariableLayout layout, const Interval& c, TruncationCaps caps) {
    return monomial(layout, c, 0, {}, {0, 0}, Parity::cos, caps);
}

PoissonSeries PoissonSeries::monomial(VariableLayout layout, const Interval& c, int d2,
                                      const std::array<int, 6>& e, const std::array<int, 2>& k, Parity par,
                                      TruncationCaps caps) {
    Builder b(layout, caps);
    b.add_raw(d2, e, k, par, c);
    return b.finish();
}

PoissonSeries::Builder::Builder(VariableLayout layout, TruncationCaps caps) : proto_(layout, caps) {}

void PoissonSeries::Builder::add(PsKey key, const Interval& c) {
    if (c.is_zero()) return;
    if (!proto_.within_caps(key)) return;
    auto [it, inserted] = index_.try_emplace(key, acc_.size());
    if (inserted) {
        acc_.emplace_back(key, c);
    } else {
        acc_[it->second].second += c;
    }
}

void PoissonSeries::Builder::add_raw(int d2, const std::array<int, 6>& e, std::array<int, 2> k, Parity par,
                                     Interval c) {
    if (!canonicalize(k, par, c)) return;
    add(KeyCodec::pack(d2, e, k, par), c);
}

void PoissonSeries::Builder::add_series(const PoissonSeries& s, const Interval& scale) {
    if (s.layout() != proto_.layout()) throw LayoutMismatch();
    for (const auto& [key, c] : s.entries()) add(key, scale.is_point() && scale.lo == 1.0 ? c : c * scale);
}

PoissonSeries PoissonSeries::Builder::finish() {
    PoissonSeries out = proto_;
    out.terms_.reserve(acc_.size());
    for (auto& e : acc_)
        if (!e.second.is_zero()) out.terms_.push_back(e);
    std::sort(out.terms_.begin(), out.terms_.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    acc_.clear();
    index_.clear();
    return out;
}

// ---------------------------------------------------------------- text IO

std::string PoissonSeries::to_text() const {
    std::ostringstream os;
    char buf[80];
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        PsTerm t = term(i);
        os << t.d2_exp << " |";
        for (int j = 0; j < layout_.n_poly(); ++j) os << ' ' << t.poly_exp[j];
        os << " |";
        for (int j = 0; j < layout_.n_ang(); ++j) os << ' ' << t.k[j];
        os << " | " << (t.parity == Parity::cos ? "cos" : "sin") << " | ";
        std::snprintf(buf, sizeof buf, "%.17g %.17g", t.coeff.lo, t.coeff.hi);
        os << buf << '\n';
    }
    return os.str();
}

PoissonSeries PoissonSeries::from_text(const std::string& text, VariableLayout layout, TruncationCaps caps) {
    Builder b(layout, caps);
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            std::size_t bar = line.find('|', start);
            fields.push_back(line.substr(start, bar == std::string::npos ? std::string::npos : bar - start));
            if (bar == std::string::npos) break;
            start = bar + 1;
        }
        if (fields.size() != 5) throw std::runtime_error("series text line " + std::to_string(lineno) + ": expected 5 fields");
        std::istringstream f0(fields[0]), f1(fields[1]), f2(fields[2]), f3(fields[3]), f4(fields[4]);
        PsTerm t;
        f0 >> t.d2_exp;
        for (int j = 0; j < layout.n_poly(); ++j) f1 >> t.poly_exp[j];
        for (int j = 0; j < layout.n_ang(); ++j) f2 >> t.k[j];
        std::string par;
        f3 >> par;
        if (par != "cos" && par != "sin") throw std::runtime_error("series text line " + std::to_string(lineno) + ": bad parity");
        t.parity = par == "cos" ? Parity::cos : Parity::sin;
        double lo = 0, hi = 0;
        f4 >> lo >> hi;
        if (f0.fail() || f1.fail() || f2.fail() || f4.fail())
            throw std::runtime_error("series text line " + std::to_string(lineno) + ": malformed numbers");
        b.add_raw(t.d2_exp, t.poly_exp, t.k, t.parity, Interval(lo, hi));
    }
    return b.finish();
}

// ---------------------------------------------------------------- evaluation

double PoissonSeries::eval(const std::array<double, 6>& poly, const std::array<double, 2>& ang, double d2) const {
    double sum = 0.0;
    for (const auto& [key, c] : terms_) {
        double v = c.mid() * std::pow(d2, KeyCodec::d2(key));
        for (int i = 0; i < layout_.n_poly(); ++i) {
            int e = KeyCodec::exp(key, i);
            if (e) v *= std::pow(poly[i], e);
        }
        double arg = 0.0;
        for (int j = 0; j < layout_.n_ang(); ++j) arg += KeyCodec::harm(key, j) * ang[j];
        v *= KeyCodec::parity(key) == Parity::cos ? std::cos(arg) : std::sin(arg);
        sum += v;
    }
    return sum;
}

Interval PoissonSeries::eval(const std::array<Interval, 6>& poly, const std::array<Interval, 2>& ang,
                             const Interval& d2) const {
    Interval sum(0.0);
    for (const auto& [key, c] : terms_) {
        Interval v = c * iv_pow(d2, KeyCodec::d2(key));
        for (int i = 0; i < layout_.n_poly(); ++i) {
            int e = KeyCodec::exp(key, i);
            if (e) v *= iv_pow(poly[i], e);
        }
        Interval arg(0.0);
        for (int j = 0; j < layout_.n_ang(); ++j) arg += Interval(KeyCodec::harm(key, j)) * ang[j];
        v *= KeyCodec::parity(key) == Parity::cos ? iv_cos(arg) : iv_sin(arg);
        sum += v;
    }
    return sum;
}

// ---------------------------------------------------------------- algebra

namespace {

void require_same(const PoissonSeries& a, const PoissonSeries& b) {
    if (a.layout() != b.layout()) throw LayoutMismatch();
}

// Product of trig(k) and trig(l): result parity and the signs of the
// 1/2-weighted terms at k-l and k+l.
struct TrigProd {
    Parity par;
    int s_minus;
    int s_plus;
};

inline TrigProd trig_prod(Parity p1, Parity p2) {
    if (p1 == Parity::cos && p2 == Parity::cos) return {Parity::cos, 1, 1};
    if (p1 == Parity::sin && p2 == Parity::sin) return {Parity::cos, 1, -1};
    if (p1 == Parity::sin && p2 == Parity::cos) return {Parity::sin, 1, 1};
    return {Parity::sin, -1, 1};
}

inline Parity flip(Parity p) { return p == Parity::cos ? Parity::sin : Parity::cos; }

// Canonical pair of a bracket block.
struct PairSpec {
    bool angle;  // q is an angle (index q), p a poly symbol
    int q;
    int p;
    bool half;   // action is u^2: d/dI = (1/2u) d/du
};

std::vector<PairSpec> pairs_for(const VariableLayout& lay, BracketBlock block) {
    std::vector<PairSpec> out;
    switch (lay.kind) {
        case LayoutKind::fast:
            if (block != BracketBlock::secular) {
                out.push_back({true, 0, 0, false});
                out.push_back({true, 1, 1, false});
            }
            if (block != BracketBlock::fast) {
                out.push_back({false, 3, 2, false});
                out.push_back({false, 5, 4, false});
            }
            break;
        case LayoutKind::cartesian:
            if (block == BracketBlock::fast) throw MissingBlock("fast block needs (L, lambda) symbols");
            out.push_back({false, 1, 0, false});
            out.push_back({false, 3, 2, false});
            break;
        case LayoutKind::action_angle:
            if (block != BracketBlock::full) throw MissingBlock("action-angle layout has only the full block");
            out.push_back({true, 0, 0, true});
            out.push_back({true, 1, 1, true});
            break;
        case LayoutKind::translated:
            if (block != BracketBlock::full) throw MissingBlock("translated layout has only the full block");
            out.push_back({true, 0, 0, false});
            out.push_back({true, 1, 1, false});
            break;
    }
    return out;
}

struct Unpacked {
    int d2;
    std::array<int, 6> e;
    std::array<int, 2> k;
    Parity par;
};

Unpacked unpack(PsKey key) {
    return {KeyCodec::d2(key), KeyCodec::exps(key), KeyCodec::harms(key), KeyCodec::parity(key)};
}

// Emits c * (num/den) at harmonics k-l and k+l.
inline void emit_pair(PoissonSeries::Builder& b, const PoissonSeries& proto, int d2, const std::array<int, 6>& e,
                      const std::array<int, 2>& k, const std::array<int, 2>& l, Parity par, const Interval& cd,
                      int num_minus, int num_plus, double den) {
    if (num_minus != 0) {
        std::array<int, 2> h{k[0] - l[0], k[1] - l[1]};
        Interval c = cd * Interval(num_minus / den);
        if (PoissonSeries::canonicalize(h, par, c)) {
            PsKey key = KeyCodec::pack(d2, e, h, par);
            if (proto.within_caps(key)) b.add(key, c);
        }
    }
    if (num_plus != 0) {
        std::array<int, 2> h{k[0] + l[0], k[1] + l[1]};
        Interval c = cd * Interval(num_plus / den);
        if (PoissonSeries::canonicalize(h, par, c)) {
            PsKey key = KeyCodec::pack(d2, e, h, par);
            if (proto.within_caps(key)) b.add(key, c);
        }
    }
}

// Cheap lower bounds used to skip hopeless pairs before any arithmetic.
struct Degrees {
    int ecc;
    int act;
};

}  // namespace

PoissonSeries operator+(const PoissonSeries& a, const PoissonSeries& b) {
    require_same(a, b);
    PoissonSeries::Builder out(a.layout(), a.caps());
    out.add_series(a, Interval(1.0));
    out.add_series(b, Interval(1.0));
    return out.finish();
}

PoissonSeries operator-(const PoissonSeries& a, const PoissonSeries& b) {
    require_same(a, b);
    PoissonSeries::Builder out(a.layout(), a.caps());
    out.add_series(a, Interval(1.0));
    out.add_series(b, Interval(-1.0));
    return out.finish();
}

PoissonSeries operator*(const Interval& s, const PoissonSeries& a) {
    PoissonSeries::Builder out(a.layout(), a.caps());
    out.add_series(a, s);
    return out.finish();
}

PoissonSeries ps_mul(const PoissonSeries& a, const PoissonSeries& b) {
    require_same(a, b);
    PoissonSeries::Builder out(a.layout(), a.caps());
    const PoissonSeries& proto = out.proto();
    const TruncationCaps& caps = a.caps();
    for (const auto& [ka, ca] : a.entries()) {
        Unpacked ua = unpack(ka);
        int ord_a = a.total_order(ka);
        int act_a = a.action_degree(ka);
        for (const auto& [kb, cb] : b.entries()) {
            if (caps.max_total_order >= 0 && ord_a + a.total_order(kb) > caps.max_total_order) continue;
            if (caps.max_action_degree >= 0 && act_a + a.action_degree(kb) > caps.max_action_degree) continue;
            Unpacked ub = unpack(kb);
            std::array<int, 6> e;
            for (int i = 0; i < 6; ++i) e[i] = ua.e[i] + ub.e[i];
            TrigProd tp = trig_prod(ua.par, ub.par);
            Interval cd = ca * cb;
            emit_pair(out, proto, ua.d2 + ub.d2, e, ua.k, ub.k, tp.par, cd, tp.s_minus, tp.s_plus, 2.0);
        }
    }
    return out.finish();
}

PoissonSeries ps_poisson(const PoissonSeries& a, const PoissonSeries& b, BracketBlock block) {
    require_same(a, b);
    const auto pairs = pairs_for(a.layout(), block);
    PoissonSeries::Builder out(a.layout(), a.caps());
    const PoissonSeries& proto = out.proto();
    const TruncationCaps& caps = a.caps();

    // A bracket lowers the e,i order by 2 in every layout that has one
    // (cartesian pair, or one u^2 in action-angle), and the action degree by
    // one in the fast and translated layouts.
    const int ord_drop = (a.layout().kind == LayoutKind::translated) ? 0 : 2;

    std::vector<Unpacked> ub_all;
    std::vector<Degrees> db_all;
    ub_all.reserve(b.size());
    for (const auto& [kb, cb] : b.entries()) {
        ub_all.push_back(unpack(kb));
        db_all.push_back({b.total_order(kb), b.action_degree(kb)});
    }

    for (const auto& [ka, ca] : a.entries()) {
        Unpacked ua = unpack(ka);
        int ord_a = a.total_order(ka);
        for (std::size_t ib = 0; ib < b.size(); ++ib) {
            const Unpacked& ub = ub_all[ib];
            const Interval& cb = b.entries()[ib].second;
            if (caps.max_total_order >= 0 && ord_a + db_all[ib].ecc - ord_drop > caps.max_total_order &&
                a.layout().kind != LayoutKind::fast)
                continue;
            bool have_cd = false;
            Interval cd;
            for (const PairSpec& ps : pairs) {
                std::array<int, 6> e;
                for (int i = 0; i < 6; ++i) e[i] = ua.e[i] + ub.e[i];
                if (ps.angle) {
                    int ap = ua.e[ps.p], bp = ub.e[ps.p];
                    int kq = ua.k[ps.q], lq = ub.k[ps.q];
                    // term1 = dA/dq * dB/dp, term2 = dA/dp * dB/dq
                    int t1 = kq * bp;
                    int t2 = ap * lq;
                    if (t1 == 0 && t2 == 0) continue;
                    int drop = ps.half ? 2 : 1;
                    e[ps.p] -= drop;
                    if (e[ps.p] < 0) continue;
                    // d/dq of cos = -sin, of sin = +cos
                    int sa = ua.par == Parity::cos ? -1 : 1;
                    int sb = ub.par == Parity::cos ? -1 : 1;
                    TrigProd p1 = trig_prod(flip(ua.par), ub.par);
                    TrigProd p2 = trig_prod(ua.par, flip(ub.par));
                    int nm = t1 * sa * p1.s_minus - t2 * sb * p2.s_minus;
                    int np = t1 * sa * p1.s_plus - t2 * sb * p2.s_plus;
                    if (nm == 0 && np == 0) continue;
                    if (!have_cd) {
                        cd = ca * cb;
                        have_cd = true;
                    }
                    double den = ps.half ? 4.0 : 2.0;
                    emit_pair(out, proto, ua.d2 + ub.d2, e, ua.k, ub.k, p1.par, cd, nm, np, den);
                } else {
                    int aq = ua.e[ps.q], ap = ua.e[ps.p];
                    int bq = ub.e[ps.q], bp = ub.e[ps.p];
                    int n = aq * bp - ap * bq;
                    if (n == 0) continue;
                    e[ps.q] -= 1;
                    e[ps.p] -= 1;
                    if (e[ps.q] < 0 || e[ps.p] < 0) continue;
                    TrigProd tp = trig_prod(ua.par, ub.par);
                    if (!have_cd) {
                        cd = ca * cb;
                        have_cd = true;
                    }
                    emit_pair(out, proto, ua.d2 + ub.d2, e, ua.k, ub.k, tp.par, cd, n * tp.s_minus, n * tp.s_plus,
                              2.0);
                }
            }
        }
    }
    return out.finish();
}

PoissonSeries ps_lie_transform(const PoissonSeries& h, const PoissonSeries& chi, int max_brackets,
                               BracketBlock block) {
    require_same(h, chi);
    PoissonSeries::Builder out(h.layout(), h.caps());
    out.add_series(h, Interval(1.0));
    PoissonSeries term = h;
    for (int j = 1; max_brackets < 0 || j <= max_brackets; ++j) {
        if (term.empty() || chi.empty()) break;
        term = Interval(1.0) / Interval(static_cast<double>(j)) * ps_poisson(term, chi, block);
        if (term.empty()) break;
        out.add_series(term, Interval(1.0));
        if (max_brackets < 0 && j > 200) throw std::runtime_error("Lie series did not terminate within caps");
    }
    return out.finish();
}

PoissonSeries ps_average(const PoissonSeries& h, const std::array<bool, 2>& angles) {
    return ps_filter(h, [&](PsKey key) {
        for (int j = 0; j < 2; ++j)
            if (angles[j] && KeyCodec::harm(key, j) != 0) return false;
        return true;
    });
}

PoissonSeries ps_truncate(const PoissonSeries& h, const TruncationRule& rule) {
    return ps_filter(h, [&](PsKey key) {
        if (rule.trig_degree >= 0 && h.trig_degree(key) > rule.trig_degree) return false;
        if (rule.total_order_n >= 0 && h.total_order(key) > 2 * rule.total_order_n) return false;
        if (rule.action_degree >= 0 && h.action_degree(key) > rule.action_degree) return false;
        return true;
    });
}

Interval ps_norm(const PoissonSeries& h) {
    Interval sum(0.0);
    for (const auto& e : h.entries()) sum += iv_magnitude(e.second);
    return sum;
}

PoissonSeries ps_zero_symbols(const PoissonSeries& h, const std::array<bool, 6>& zero) {
    return ps_filter(h, [&](PsKey key) {
        for (int i = 0; i < 6; ++i)
            if (zero[i] && KeyCodec::exp(key, i) > 0) return false;
        return true;
    });
}

PoissonSeries ps_fix_d2(const PoissonSeries& h, const Interval& d2) {
    PoissonSeries::Builder b(h.layout(), h.caps());
    std::vector<Interval> pw{Interval(1.0)};
    for (const auto& [key, c] : h.entries()) {
        int d = KeyCodec::d2(key);
        while (static_cast<int>(pw.size()) <= d) pw.push_back(pw.back() * d2);
        PsKey nk = KeyCodec::pack(0, KeyCodec::exps(key), KeyCodec::harms(key), KeyCodec::parity(key));
        b.add(nk, d == 0 ? c : c * pw[d]);
    }
    return b.finish();
}

double ps_max_mag(const PoissonSeries& h) {
    double m = 0.0;
    for (const auto& e : h.entries()) m = std::fmax(m, e.second.mag());
    return m;
}

bool ps_all_contain_zero(const PoissonSeries& h) {
    for (const auto& e : h.entries())
        if (!e.second.contains_zero()) return false;
    return true;
}

std::ostream& operator<<(std::ostream& os, const PoissonSeries& s) { return os << s.to_text(); }

}  // namespace rkam
