#pragma once

// Randomization-only bounds from the response-type linear program: exact numeric optimum
// with witness models, and symbolic bounds from the vertices of the dual polyhedron.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "medbounds/double_description.hpp"
#include "medbounds/errors.hpp"
#include "medbounds/linear_expr.hpp"
#include "medbounds/observed.hpp"
#include "medbounds/rational.hpp"
#include "medbounds/response_types.hpp"
#include "medbounds/scm.hpp"
#include "medbounds/simplex.hpp"
#include "medbounds/types.hpp"

namespace medbounds {

/// P q = p, 1'q = 1, objective c over all combos. Combos with the same pair of observed
/// cells (one per arm) have identical P columns; `columns` merges them, keeping the
/// smallest and largest objective entry with a representative combo for each.
template <Setting S>
struct ConstraintSystem {
    struct Column {
        int cell0 = 0;  // flat cell index realized in arm 0
        int cell1 = 0;  // flat cell index realized in arm 1
        int c_min = 0;
        int c_max = 0;
        int combo_min = -1;
        int combo_max = -1;
    };

    Estimand estimand;
    LDriver driver = LDriver::Mediator;
    std::vector<int> c;
    std::vector<Column> columns;

    /// Entry of the full observed-cell matrix.
    int P(int cell, int combo) const {
        return ResponseTypes<S>::observed_cell(combo, cell & 1) == cell ? 1 : 0;
    }
};

template <Setting S>
ConstraintSystem<S> build_system(const Estimand& e, LDriver driver = LDriver::Mediator) {
    if (e.setting != S) throw UnsupportedEstimand("estimand setting does not match system");
    if (!e.randomization_only())
        throw UnsupportedEstimand(label(e) + " needs the coupling system, not the observed-cell LP");
    using RT = ResponseTypes<S>;
    const Contrast k = contrast_of(e, driver);
    ConstraintSystem<S> sys;
    sys.estimand = e;
    sys.driver = driver;
    sys.c.resize(RT::num_combos);
    constexpr int per_arm = kCellsPerArm<S>;
    std::vector<typename ConstraintSystem<S>::Column> by_sig(per_arm * per_arm);
    for (int combo = 0; combo < RT::num_combos; ++combo) {
        const int v = contrast_value<S>(combo, k);
        sys.c[combo] = v;
        const int c0 = RT::observed_cell(combo, 0);
        const int c1 = RT::observed_cell(combo, 1);
        auto& col = by_sig[(c0 >> 1) * per_arm + (c1 >> 1)];
        if (col.combo_min < 0) {
            col = {c0, c1, v, v, combo, combo};
        } else {
            if (v < col.c_min) {
                col.c_min = v;
                col.combo_min = combo;
            }
            if (v > col.c_max) {
                col.c_max = v;
                col.combo_max = combo;
            }
        }
    }
    for (const auto& col : by_sig)
        if (col.combo_min >= 0) sys.columns.push_back(col);
    return sys;
}

/// Cells kept in the reduced parametrization (all but y = m [= l] = 1 in each arm).
template <Setting S>
std::vector<int> reduced_cells() {
    std::vector<int> out;
    for (int i = 0; i < kCells<S>; ++i)
        if (!LinearExpr<S>::is_folded_cell(i)) out.push_back(i);
    return out;
}

// ---------------------------------------------------------------------------
// Numeric LP

template <Setting S>
struct LpBounds {
    Interval<Rational> interval;
    Scm<Rational, S> lower_witness;
    Scm<Rational, S> upper_witness;
};

namespace detail {

/// Equality rows: every arm-0 cell and every arm-1 cell but the last; together with
/// per-column arm totals of one they imply both normalizations.
template <Setting S>
std::vector<int> numeric_rows() {
    std::vector<int> rows;
    for (int i = 0; i < kCells<S>; ++i)
        if ((i & 1) == 0 || i != LinearExpr<S>::last_cell(1)) rows.push_back(i);
    return rows;
}

template <Setting S>
Scm<Rational, S> witness_from(const ConstraintSystem<S>& sys, const std::vector<Rational>& x,
                              bool lower) {
    Scm<Rational, S> scm;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] == 0) continue;
        const auto& col = sys.columns[j];
        scm.atoms.push_back({lower ? col.combo_min : col.combo_max, x[j]});
    }
    std::sort(scm.atoms.begin(), scm.atoms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return scm;
}

}  // namespace detail

/// Exact min and max of c.q over response-type laws reproducing `d`, with a witness law
/// attaining each endpoint.
template <Setting S>
LpBounds<S> numeric_bounds(const ConstraintSystem<S>& sys, const ObservedDist<Rational, S>& d) {
    if (sys.estimand.setting != S) throw DimensionMismatch("system and distribution differ");
    const auto rows = detail::numeric_rows<S>();
    const std::size_t n = sys.columns.size();
    RationalMatrix A(rows.size(), std::vector<Rational>(n));
    std::vector<Rational> b(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        b[r] = d[rows[r]];
        for (std::size_t j = 0; j < n; ++j) {
            const auto& col = sys.columns[j];
            A[r][j] = (col.cell0 == rows[r] || col.cell1 == rows[r]) ? 1 : 0;
        }
    }
    std::vector<Rational> cmin(n), cmax(n);
    for (std::size_t j = 0; j < n; ++j) {
        cmin[j] = sys.columns[j].c_min;
        cmax[j] = sys.columns[j].c_max;
    }
    ExactSimplex lp(A, b);
    LpSolution lo = lp.minimize(cmin);
    LpSolution hi = lp.maximize(cmax);
    return {{lo.value, hi.value},
            detail::witness_from(sys, lo.x, true),
            detail::witness_from(sys, hi.x, false)};
}

// ---------------------------------------------------------------------------
// Symbolic bounds

struct SymbolicStats {
    DdStats lower_dd;
    DdStats upper_dd;
    std::size_t lower_vertices = 0;
    std::size_t upper_vertices = 0;
    std::size_t pruned = 0;
    std::size_t prune_lps = 0;
};

namespace detail {

/// Vertices of { w : w0 + R_j . y <= obj_j } as affine expressions w0 + sum_i y_i p_i,
/// with R_j the reduced-cell indicator of column j.
template <Setting S>
std::vector<LinearExpr<S>> dual_vertices(const ConstraintSystem<S>& sys,
                                         const std::vector<int>& obj, const DdOptions& opt,
                                         DdStats* stats) {
    const auto cells = reduced_cells<S>();
    const std::size_t dim = cells.size() + 2;  // homogenizing x0, then w0, then y
    IntMatrix H;
    H.reserve(sys.columns.size() + 1);
    for (std::size_t j = 0; j < sys.columns.size(); ++j) {
        const auto& col = sys.columns[j];
        IntVector row(dim);
        row[0] = obj[j];
        row[1] = -1;
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (col.cell0 == cells[i] || col.cell1 == cells[i]) row[2 + i] = -1;
        H.push_back(std::move(row));
    }
    IntVector x0(dim);
    x0[0] = 1;
    H.push_back(std::move(x0));

    std::vector<LinearExpr<S>> out;
    for (const IntVector& z : extreme_rays(H, opt, stats)) {
        if (z[0] == 0) continue;  // recession direction
        LinearExpr<S> e;
        e.constant = Rational(z[1], z[0]);
        e.constant.canonicalize();
        for (std::size_t i = 0; i < cells.size(); ++i) {
            Rational v(z[2 + i], z[0]);
            v.canonicalize();
            e.coef[cells[i]] = v;
        }
        out.push_back(std::move(e));
    }
    return out;
}

/// Rank of the column vectors (1, R_j) over the given column subset.
template <Setting S>
std::size_t active_rank(const ConstraintSystem<S>& sys, const std::vector<std::size_t>& active) {
    const auto cells = reduced_cells<S>();
    const std::size_t dim = cells.size() + 1;
    std::vector<std::vector<Rational>> rows;
    std::vector<std::size_t> pivots;
    for (std::size_t j : active) {
        std::vector<Rational> v(dim);
        v[0] = 1;
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (sys.columns[j].cell0 == cells[i] || sys.columns[j].cell1 == cells[i]) v[1 + i] = 1;
        for (std::size_t e = 0; e < rows.size(); ++e) {
            if (v[pivots[e]] == 0) continue;
            const Rational f = v[pivots[e]] / rows[e][pivots[e]];
            for (std::size_t t = 0; t < dim; ++t) v[t] -= f * rows[e][t];
        }
        auto nz = std::find_if(v.begin(), v.end(), [](const Rational& x) { return x != 0; });
        if (nz == v.end()) continue;
        pivots.push_back(static_cast<std::size_t>(nz - v.begin()));
        rows.push_back(std::move(v));
    }
    return rows.size();
}

/// Value of a reduced expression at the observed point of column j (a vertex of the
/// observed polytope).
template <Setting S>
Rational value_at_column(const LinearExpr<S>& e, const typename ConstraintSystem<S>::Column& col) {
    return Rational(e.constant + e.coef[col.cell0] + e.coef[col.cell1]);
}

}  // namespace detail

/// Removes terms that never strictly beat all others on the observed polytope.
/// `lower` selects the max-side (true) or min-side (false) meaning of "beat".
/// Exact duplicates collapse to one representative first; then each term is tested in
/// canonical order by the LP  max t  s.t.  +-(e_k - e_j) >= t for all kept j != k,
/// over valid distributions, and dropped when t <= 0.
/// With `sys`, a term whose tight columns have full rank is kept without an LP: it is
/// the unique optimum of the dual on an open set of distributions.
template <Setting S>
std::vector<LinearExpr<S>> prune_dominated(std::vector<LinearExpr<S>> terms, bool lower,
                                           const ConstraintSystem<S>* sys = nullptr,
                                           SymbolicStats* stats = nullptr) {
    for (auto& t : terms) t.canonicalize();
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    if (terms.size() <= 1) return terms;

    std::vector<bool> certified(terms.size(), false);
    if (sys) {
        const std::size_t full = reduced_cells<S>().size() + 1;
        for (std::size_t k = 0; k < terms.size(); ++k) {
            std::vector<std::size_t> active;
            for (std::size_t j = 0; j < sys->columns.size(); ++j) {
                const auto& col = sys->columns[j];
                const Rational v = detail::value_at_column<S>(terms[k], col);
                if (lower ? v == col.c_min : v == col.c_max) active.push_back(j);
            }
            certified[k] = detail::active_rank(*sys, active) == full;
        }
    }

    constexpr int nc = kCells<S>;
    std::vector<bool> keep(terms.size(), true);
    for (std::size_t k = 0; k < terms.size(); ++k) {
        if (certified[k]) continue;
        std::vector<std::size_t> others;
        for (std::size_t j = 0; j < terms.size(); ++j)
            if (j != k && keep[j]) others.push_back(j);
        if (others.empty()) continue;
        // variables: cells (nc), t+ , t-, one slack per other term
        const std::size_t nv = nc + 2 + others.size();
        RationalMatrix A;
        std::vector<Rational> b;
        for (int a = 0; a < 2; ++a) {
            std::vector<Rational> row(nv);
            for (int i = a; i < nc; i += 2) row[i] = 1;
            A.push_back(std::move(row));
            b.push_back(1);
        }
        const Rational sgn = lower ? 1 : -1;
        for (std::size_t s = 0; s < others.size(); ++s) {
            const auto& ek = terms[k];
            const auto& ej = terms[others[s]];
            // sgn*(ek - ej)(p) - t - slack = 0
            std::vector<Rational> row(nv);
            for (int i = 0; i < nc; ++i) row[i] = sgn * (ek.coef[i] - ej.coef[i]);
            row[nc] = -1;
            row[nc + 1] = 1;
            row[nc + 2 + s] = -1;
            A.push_back(std::move(row));
            b.push_back(-sgn * (ek.constant - ej.constant));
        }
        std::vector<Rational> obj(nv);
        obj[nc] = 1;
        obj[nc + 1] = -1;
        ExactSimplex lp(A, b);
        const Rational t = lp.maximize(obj).value;
        if (stats) ++stats->prune_lps;
        if (t <= 0) {
            keep[k] = false;
            if (stats) ++stats->pruned;
        }
    }
    std::vector<LinearExpr<S>> out;
    for (std::size_t k = 0; k < terms.size(); ++k)
        if (keep[k]) out.push_back(terms[k]);
    return out;
}

/// Symbolic sharp bounds: dual vertices of the min and max problems, pruned, in canonical order.
template <Setting S>
BoundExpr<S> symbolic_bounds(const ConstraintSystem<S>& sys, const DdOptions& opt = {},
                             SymbolicStats* stats = nullptr) {
    SymbolicStats local;
    std::vector<int> cmin, neg_cmax;
    for (const auto& col : sys.columns) {
        cmin.push_back(col.c_min);
        neg_cmax.push_back(-col.c_max);
    }
    BoundExpr<S> out;
    out.estimand = label(sys.estimand);
    out.lower = detail::dual_vertices(sys, cmin, opt, &local.lower_dd);
    auto upper = detail::dual_vertices(sys, neg_cmax, opt, &local.upper_dd);
    for (auto& e : upper) e = -e;
    out.upper = std::move(upper);
    local.lower_vertices = out.lower.size();
    local.upper_vertices = out.upper.size();
    out.lower = prune_dominated(std::move(out.lower), true, &sys, &local);
    out.upper = prune_dominated(std::move(out.upper), false, &sys, &local);
    if (stats) *stats = local;
    return out;
}

}  // namespace medbounds
