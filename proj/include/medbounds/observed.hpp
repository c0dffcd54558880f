#pragma once

// Observed-data model: conditional joint tables p_{ym.a} / p_{yml.a}, count tables,
// random distributions and the elementary point-identified functionals.

#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "medbounds/errors.hpp"
#include "medbounds/rational.hpp"
#include "medbounds/rng.hpp"
#include "medbounds/types.hpp"

namespace medbounds {

template <Setting S>
inline constexpr int kCellsPerArm = S == Setting::I ? 4 : 8;

template <Setting S>
inline constexpr int kCells = 2 * kCellsPerArm<S>;

/// Within-arm index of (y, m) or (y, m, l). Canonical order is lexicographic in (y, m[, l]).
constexpr int arm_cell(int y, int m) { return y * 2 + m; }
constexpr int arm_cell(int y, int m, int l) { return (y * 2 + m) * 2 + l; }

/// Flat index of a cell with the conditioning arm last: (y, m[, l], a).
constexpr int cell_index(int k, int a) { return k * 2 + a; }
constexpr int cell_index(int y, int m, int a) { return cell_index(arm_cell(y, m), a); }
constexpr int cell_index(int y, int m, int l, int a) { return cell_index(arm_cell(y, m, l), a); }

/// Symbol name of a flat cell index: p00_1, p010_0, ...
template <Setting S>
std::string cell_symbol(int idx) {
    const int a = idx & 1;
    const int k = idx >> 1;
    std::string s = "p";
    if constexpr (S == Setting::I) {
        s += std::to_string(k >> 1);
        s += std::to_string(k & 1);
    } else {
        s += std::to_string(k >> 2);
        s += std::to_string((k >> 1) & 1);
        s += std::to_string(k & 1);
    }
    return s + "_" + std::to_string(a);
}

/// Conditional joint table of the observed variables given each treatment arm.
template <class T, Setting S>
class ObservedDist {
public:
    static constexpr Setting setting = S;
    static constexpr int cells_per_arm = kCellsPerArm<S>;
    static constexpr int num_cells = kCells<S>;
    using Cells = std::array<T, num_cells>;

    ObservedDist() = delete;

    /// Validates cells in [0,1] and per-arm normalization (exact for rationals, 1e-12 otherwise).
    static ObservedDist from_cells(Cells cells) {
        ObservedDist d(std::move(cells));
        d.validate();
        return d;
    }

    const T& operator[](int idx) const { return cells_[idx]; }
    const Cells& cells() const { return cells_; }

    const T& p(int y, int m, int a) const
        requires(S == Setting::I)
    {
        return cells_[cell_index(y, m, a)];
    }
    const T& p(int y, int m, int l, int a) const
        requires(S == Setting::II)
    {
        return cells_[cell_index(y, m, l, a)];
    }

    T arm_total(int a) const {
        T s(0);
        for (int k = 0; k < cells_per_arm; ++k) s += cells_[cell_index(k, a)];
        return s;
    }

    friend bool operator==(const ObservedDist& a, const ObservedDist& b) {
        return a.cells_ == b.cells_;
    }

private:
    explicit ObservedDist(Cells cells) : cells_(std::move(cells)) {}

    void validate() const {
        const T tol = is_exact_v<T> ? T(0) : T(1e-12);
        for (int i = 0; i < num_cells; ++i) {
            if (cells_[i] < -tol || cells_[i] > T(1) + tol)
                throw InvalidDistribution("cell " + cell_symbol<S>(i) + " outside [0,1]");
        }
        for (int a = 0; a < 2; ++a) {
            T dev = arm_total(a) - T(1);
            if (dev > tol || dev < -tol)
                throw InvalidDistribution("arm A=" + std::to_string(a) + " does not sum to 1");
        }
    }

    Cells cells_;
};

template <class T>
using ObservedDistI = ObservedDist<T, Setting::I>;
template <class T>
using ObservedDistII = ObservedDist<T, Setting::II>;

template <class To, class From, Setting S>
ObservedDist<To, S> dist_cast(const ObservedDist<From, S>& d) {
    typename ObservedDist<To, S>::Cells c;
    for (int i = 0; i < kCells<S>; ++i) c[i] = scalar_cast<To>(d[i]);
    return ObservedDist<To, S>::from_cells(std::move(c));
}

// ---------------------------------------------------------------------------
// Marginals and conditionals

/// Pr(Y=1 | A=a).
template <class T, Setting S>
T prob_y1(const ObservedDist<T, S>& d, int a) {
    T s(0);
    for (int k = kCellsPerArm<S> / 2; k < kCellsPerArm<S>; ++k) s += d[cell_index(k, a)];
    return s;
}

/// Pr(M=m | A=a).
template <class T, Setting S>
T prob_m(const ObservedDist<T, S>& d, int m, int a) {
    T s(0);
    for (int y = 0; y < 2; ++y) {
        if constexpr (S == Setting::I) {
            s += d.p(y, m, a);
        } else {
            for (int l = 0; l < 2; ++l) s += d.p(y, m, l, a);
        }
    }
    return s;
}

/// Pr(Y=1, M=m | A=a).
template <class T, Setting S>
T prob_y1_m(const ObservedDist<T, S>& d, int m, int a) {
    if constexpr (S == Setting::I) {
        return d.p(1, m, a);
    } else {
        return T(d.p(1, m, 0, a) + d.p(1, m, 1, a));
    }
}

/// Pr(L=l | A=a).
template <class T>
T prob_l(const ObservedDistII<T>& d, int l, int a) {
    T s(0);
    for (int y = 0; y < 2; ++y)
        for (int m = 0; m < 2; ++m) s += d.p(y, m, l, a);
    return s;
}

/// Pr(M=m, L=l | A=a).
template <class T>
T prob_ml(const ObservedDistII<T>& d, int m, int l, int a) {
    return T(d.p(0, m, l, a) + d.p(1, m, l, a));
}

/// Pr(Y=1 | A=a, M=m), or nullopt when Pr(M=m | A=a) = 0.
template <class T>
std::optional<T> cond_y1_given_m(const ObservedDistI<T>& d, int m, int a) {
    T den = prob_m(d, m, a);
    if (den == 0) return std::nullopt;
    return T(d.p(1, m, a) / den);
}

/// Pr(Y=1 | A=a, M=m, L=l), or nullopt when Pr(M=m, L=l | A=a) = 0.
template <class T>
std::optional<T> cond_y1_given_ml(const ObservedDistII<T>& d, int m, int l, int a) {
    T den = prob_ml(d, m, l, a);
    if (den == 0) return std::nullopt;
    return T(d.p(1, m, l, a) / den);
}

/// Pr(M=m | A=a, L=l), or nullopt when Pr(L=l | A=a) = 0.
template <class T>
std::optional<T> cond_m_given_l(const ObservedDistII<T>& d, int m, int l, int a) {
    T den = prob_l(d, l, a);
    if (den == 0) return std::nullopt;
    return T(prob_ml(d, m, l, a) / den);
}

// ---------------------------------------------------------------------------
// Undefined-conditional handling shared by the plug-in and Frechet formulas.

enum class UndefinedPolicy {
    Throw,  ///< raise UndefinedConditional
    Widen,  ///< replace the conditional by [0, 1] and propagate intervals
};

namespace detail {

template <class T>
T vmax(const T& a, const T& b) {
    return a < b ? b : a;
}
template <class T>
T vmin(const T& a, const T& b) {
    return b < a ? b : a;
}
template <class T>
Interval<T> vmax(const Interval<T>& a, const Interval<T>& b) {
    return {vmax(a.lower, b.lower), vmax(a.upper, b.upper)};
}
template <class T>
Interval<T> vmin(const Interval<T>& a, const Interval<T>& b) {
    return {vmin(a.lower, b.lower), vmin(a.upper, b.upper)};
}

/// Value domain for formula evaluation: V is either T (strict) or Interval<T> (widened).
template <class T, class V>
struct Domain {
    static V lift(const T& x) {
        if constexpr (std::is_same_v<V, T>) {
            return x;
        } else {
            return V{x, x};
        }
    }

    /// A conditional that is only needed when `required`; otherwise any value works
    /// because it is multiplied by, or paired in a Frechet term with, a zero probability.
    static V conditional(const std::optional<T>& c, bool required, const char* what) {
        if (c) return lift(*c);
        if (!required) return lift(T(0));
        if constexpr (std::is_same_v<V, T>) {
            throw UndefinedConditional(std::string("undefined conditional ") + what);
        } else {
            return V{T(0), T(1)};
        }
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementary estimands

/// Pr(Y=1 | A=1) - Pr(Y=1 | A=0).
template <class T, Setting S>
T total_effect(const ObservedDist<T, S>& d) {
    return T(prob_y1(d, 1) - prob_y1(d, 0));
}

namespace detail {

/// Mediation-formula value of Pr{Y(ay, M(am))=1} with L following am in setting II.
template <class T, class V>
V mediation_term(const ObservedDistI<T>& d, int ay, int am) {
    using D = Domain<T, V>;
    V out = D::lift(T(0));
    for (int m = 0; m < 2; ++m) {
        T w = prob_m(d, m, am);
        V y = D::conditional(cond_y1_given_m(d, m, ay), w > 0, "Pr(Y=1|A,M)");
        out = out + y * D::lift(w);
    }
    return out;
}

template <class T, class V>
V mediation_term(const ObservedDistII<T>& d, int ay, int am) {
    using D = Domain<T, V>;
    V out = D::lift(T(0));
    for (int m = 0; m < 2; ++m) {
        for (int l = 0; l < 2; ++l) {
            T pl = prob_l(d, l, am);
            V pm = D::conditional(cond_m_given_l(d, m, l, am), pl > 0, "Pr(M|A,L)");
            V w = pm * D::lift(pl);
            // the Y conditional is needed whenever Pr(M=m, L=l | A=am) > 0
            V y = D::conditional(cond_y1_given_ml(d, m, l, ay), prob_ml(d, m, l, am) > 0,
                                 "Pr(Y=1|A,M,L)");
            out = out + y * w;
        }
    }
    return out;
}

template <class T, Setting S, class V>
V mediation_value(const ObservedDist<T, S>& d, const Estimand& e) {
    const int a = e.arm;
    if (e.kind == EstimandKind::MEDIATION_POINT_NDE) {
        return mediation_term<T, V>(d, 1, a) - mediation_term<T, V>(d, 0, a);
    }
    if (e.kind == EstimandKind::MEDIATION_POINT_NIE) {
        return mediation_term<T, V>(d, a, 1) - mediation_term<T, V>(d, a, 0);
    }
    throw UnsupportedEstimand("mediation point estimate requires MEDIATION_POINT_NDE/NIE");
}

}  // namespace detail

/// Plug-in mediation-formula value (point-identified under no unmeasured confounding plus
/// cross-world independence). Setting II uses the sequential version with L under the
/// mediator arm. Throws UndefinedConditional when a needed conditioning cell is empty.
template <class T, Setting S>
T mediation_point_estimate(const ObservedDist<T, S>& d, const Estimand& e) {
    if (e.setting != S) throw UnsupportedEstimand("estimand setting does not match distribution");
    return detail::mediation_value<T, S, T>(d, e);
}

/// Same as mediation_point_estimate but undefined conditionals become [0, 1].
template <class T, Setting S>
Interval<T> mediation_point_range(const ObservedDist<T, S>& d, const Estimand& e) {
    if (e.setting != S) throw UnsupportedEstimand("estimand setting does not match distribution");
    return detail::mediation_value<T, S, Interval<T>>(d, e);
}

// ---------------------------------------------------------------------------
// Transforms and generators

/// p_{ym.a} = sum_l p_{yml.a}.
template <class T>
ObservedDistI<T> marginalize_L(const ObservedDistII<T>& d) {
    typename ObservedDistI<T>::Cells c;
    for (int y = 0; y < 2; ++y)
        for (int m = 0; m < 2; ++m)
            for (int a = 0; a < 2; ++a)
                c[cell_index(y, m, a)] = T(d.p(y, m, 0, a) + d.p(y, m, 1, a));
    return ObservedDistI<T>::from_cells(std::move(c));
}

/// Setting-II table with L identically 0 and the given (Y, M) law.
template <class T>
ObservedDistII<T> embed_degenerate_L(const ObservedDistI<T>& d) {
    typename ObservedDistII<T>::Cells c;
    c.fill(T(0));
    for (int y = 0; y < 2; ++y)
        for (int m = 0; m < 2; ++m)
            for (int a = 0; a < 2; ++a) c[cell_index(y, m, 0, a)] = d.p(y, m, a);
    return ObservedDistII<T>::from_cells(std::move(c));
}

/// Resolution of the grid random conditionals are drawn on: k / 2^24, 0 < k < 2^24.
inline constexpr int kRandomGridBits = 24;

namespace detail {

inline Rational grid_uniform(Rng& rng) {
    std::uint64_t k;
    do {
        k = rng.next_u64() >> (64 - kRandomGridBits);
    } while (k == 0);
    Rational r(static_cast<unsigned long>(k), 1UL << kRandomGridBits);
    r.canonicalize();
    return r;
}

}  // namespace detail

/// Random setting-I table from uniform Pr(M=1|a) and Pr(Y=1|a,m); exact, deterministic per seed.
inline ObservedDistI<Rational> random_dist1(std::uint64_t seed) {
    Rng rng(seed);
    Rational pm[2], py[2][2];
    for (int a = 0; a < 2; ++a) pm[a] = detail::grid_uniform(rng);
    for (int a = 0; a < 2; ++a)
        for (int m = 0; m < 2; ++m) py[a][m] = detail::grid_uniform(rng);
    ObservedDistI<Rational>::Cells c;
    for (int a = 0; a < 2; ++a)
        for (int m = 0; m < 2; ++m) {
            Rational w = m ? pm[a] : Rational(1 - pm[a]);
            c[cell_index(1, m, a)] = py[a][m] * w;
            c[cell_index(0, m, a)] = (1 - py[a][m]) * w;
        }
    return ObservedDistI<Rational>::from_cells(std::move(c));
}

/// Random setting-II table: Pr(L=1|a), Pr(M=1|a,l), Pr(Y=1|a,l,m) independently uniform.
/// With `degenerate_l` the L draw is replaced by Pr(L=1|a) = 0.
inline ObservedDistII<Rational> random_dist2(std::uint64_t seed, bool degenerate_l = false) {
    Rng rng(seed);
    Rational pl[2], pm[2][2], py[2][2][2];
    for (int a = 0; a < 2; ++a) pl[a] = detail::grid_uniform(rng);
    for (int a = 0; a < 2; ++a)
        for (int l = 0; l < 2; ++l) pm[a][l] = detail::grid_uniform(rng);
    for (int a = 0; a < 2; ++a)
        for (int l = 0; l < 2; ++l)
            for (int m = 0; m < 2; ++m) py[a][l][m] = detail::grid_uniform(rng);
    if (degenerate_l) pl[0] = pl[1] = 0;
    ObservedDistII<Rational>::Cells c;
    for (int a = 0; a < 2; ++a)
        for (int l = 0; l < 2; ++l)
            for (int m = 0; m < 2; ++m) {
                Rational wl = l ? pl[a] : Rational(1 - pl[a]);
                Rational wm = m ? pm[a][l] : Rational(1 - pm[a][l]);
                Rational w = wl * wm;
                c[cell_index(1, m, l, a)] = py[a][l][m] * w;
                c[cell_index(0, m, l, a)] = (1 - py[a][l][m]) * w;
            }
    return ObservedDistII<Rational>::from_cells(std::move(c));
}

// ---------------------------------------------------------------------------
// Count tables

/// Integer counts per (a[, l], m, y) cell, indexed like ObservedDist cells.
struct CountTable {
    Setting setting = Setting::I;
    std::array<std::uint64_t, 16> counts{};

    int num_cells() const { return setting == Setting::I ? 8 : 16; }

    std::uint64_t arm_total(int a) const {
        std::uint64_t n = 0;
        for (int i = a; i < num_cells(); i += 2) n += counts[i];
        return n;
    }

    void validate() const {
        for (int a = 0; a < 2; ++a)
            if (arm_total(a) == 0) throw EmptyArm(a);
    }
};

/// Per-arm sample proportions n(cell) / n(arm), exact.
template <Setting S>
ObservedDist<Rational, S> dist_from_counts(const CountTable& t) {
    if (t.setting != S) throw DimensionMismatch("count table setting does not match");
    t.validate();
    typename ObservedDist<Rational, S>::Cells c;
    for (int i = 0; i < kCells<S>; ++i) {
        Rational r(static_cast<unsigned long>(t.counts[i]),
                   static_cast<unsigned long>(t.arm_total(i & 1)));
        r.canonicalize();
        c[i] = r;
    }
    return ObservedDist<Rational, S>::from_cells(std::move(c));
}

namespace detail {

inline std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

inline int parse_binary(const std::string& s, int line_no) {
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw ParseError("line " + std::to_string(line_no) + ": expected 0 or 1, got '" + s + "'");
}

inline std::uint64_t parse_count(const std::string& s, int line_no) {
    if (s.empty() || s.size() > 19)
        throw ParseError("line " + std::to_string(line_no) + ": bad count '" + s + "'");
    std::uint64_t n = 0;
    for (char ch : s) {
        if (ch < '0' || ch > '9')
            throw ParseError("line " + std::to_string(line_no) + ": bad count '" + s + "'");
        n = n * 10 + static_cast<std::uint64_t>(ch - '0');
    }
    return n;
}

}  // namespace detail

/// Parses the count CSV: header `a,m,y,n` (setting I) or `a,l,m,y,n` (setting II),
/// one row per cell, LF line endings. Duplicate cells are rejected.
inline CountTable parse_counts_csv(std::istream& in, Setting setting) {
    const std::string expected = setting == Setting::I ? "a,m,y,n" : "a,l,m,y,n";
    const std::size_t fields = setting == Setting::I ? 4 : 5;
    CountTable t;
    t.setting = setting;
    std::array<bool, 16> seen{};
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            throw ParseError("line " + std::to_string(line_no) + ": CRLF line endings not accepted");
        if (!have_header) {
            if (line != expected)
                throw ParseError("header must be exactly '" + expected + "', got '" + line + "'");
            have_header = true;
            continue;
        }
        if (line.empty()) continue;
        auto f = detail::split_commas(line);
        if (f.size() != fields)
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(fields) + " fields");
        int a = detail::parse_binary(f[0], line_no);
        int idx;
        if (setting == Setting::I) {
            int m = detail::parse_binary(f[1], line_no);
            int y = detail::parse_binary(f[2], line_no);
            idx = cell_index(y, m, a);
        } else {
            int l = detail::parse_binary(f[1], line_no);
            int m = detail::parse_binary(f[2], line_no);
            int y = detail::parse_binary(f[3], line_no);
            idx = cell_index(y, m, l, a);
        }
        if (seen[idx]) throw ParseError("line " + std::to_string(line_no) + ": duplicate cell");
        seen[idx] = true;
        t.counts[idx] = detail::parse_count(f.back(), line_no);
    }
    if (!have_header) throw ParseError("empty count file");
    return t;
}

inline CountTable read_counts_csv(const std::string& path, Setting setting) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open count file '" + path + "'");
    return parse_counts_csv(in, setting);
}

/// Writes the nonzero cells in header order.
inline void write_counts_csv(std::ostream& out, const CountTable& t) {
    if (t.setting == Setting::I) {
        out << "a,m,y,n\n";
        for (int a = 0; a < 2; ++a)
            for (int m = 0; m < 2; ++m)
                for (int y = 0; y < 2; ++y) {
                    auto n = t.counts[cell_index(y, m, a)];
                    if (n) out << a << ',' << m << ',' << y << ',' << n << '\n';
                }
    } else {
        out << "a,l,m,y,n\n";
        for (int a = 0; a < 2; ++a)
            for (int l = 0; l < 2; ++l)
                for (int m = 0; m < 2; ++m)
                    for (int y = 0; y < 2; ++y) {
                        auto n = t.counts[cell_index(y, m, l, a)];
                        if (n) out << a << ',' << l << ',' << m << ',' << y << ',' << n << '\n';
                    }
    }
}

}  // namespace medbounds
