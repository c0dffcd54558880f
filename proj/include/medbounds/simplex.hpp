#pragma once

// Dense two-phase simplex over exact rationals for  min c.x  s.t.  A x = b, x >= 0.

#include <cstddef>
#include <vector>

#include "medbounds/errors.hpp"
#include "medbounds/rational.hpp"

namespace medbounds {

using RationalMatrix = std::vector<std::vector<Rational>>;

struct LpSolution {
    Rational value;
    std::vector<Rational> x;
};

/// Phase 1 runs in the constructor; each minimize/maximize continues from the last
/// optimal basis, which stays primal feasible for any objective.
class ExactSimplex {
public:
    ExactSimplex(const RationalMatrix& A, const std::vector<Rational>& b) : n_(0) {
        const std::size_t m = A.size();
        if (b.size() != m) throw DimensionMismatch("simplex: A and b row counts differ");
        n_ = m ? A.front().size() : 0;
        for (const auto& row : A)
            if (row.size() != n_) throw DimensionMismatch("simplex: ragged constraint matrix");

        // columns: n_ structural, m artificial; last entry of each row is the rhs
        const std::size_t width = n_ + m + 1;
        rows_.assign(m, std::vector<Rational>(width));
        basis_.resize(m);
        for (std::size_t r = 0; r < m; ++r) {
            const bool flip = b[r] < 0;
            for (std::size_t j = 0; j < n_; ++j) rows_[r][j] = flip ? Rational(-A[r][j]) : A[r][j];
            rows_[r][n_ + r] = 1;
            rows_[r][width - 1] = flip ? Rational(-b[r]) : b[r];
            basis_[r] = n_ + r;
        }

        std::vector<Rational> phase1(n_ + m);
        for (std::size_t j = n_; j < n_ + m; ++j) phase1[j] = 1;
        optimize(phase1, n_ + m);
        if (objective_value(phase1) != 0) throw Infeasible("linear program is infeasible");

        // drive artificials out of the basis; rows where that is impossible are redundant
        for (std::size_t r = 0; r < rows_.size();) {
            if (basis_[r] < n_) {
                ++r;
                continue;
            }
            std::size_t enter = n_;
            for (std::size_t j = 0; j < n_; ++j)
                if (rows_[r][j] != 0) {
                    enter = j;
                    break;
                }
            if (enter == n_) {
                rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
                basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
                continue;
            }
            pivot(r, enter);
            ++r;
        }
        for (auto& row : rows_) {
            Rational rhs = row.back();
            row.resize(n_ + 1);
            row[n_] = rhs;
        }
    }

    std::size_t num_vars() const { return n_; }
    std::size_t rank() const { return rows_.size(); }

    LpSolution minimize(const std::vector<Rational>& c) {
        if (c.size() != n_) throw DimensionMismatch("simplex: objective length mismatch");
        optimize(c, n_);
        return {objective_value(c), primal()};
    }

    LpSolution maximize(const std::vector<Rational>& c) {
        std::vector<Rational> neg(c.size());
        for (std::size_t j = 0; j < c.size(); ++j) neg[j] = -c[j];
        LpSolution s = minimize(neg);
        s.value = -s.value;
        return s;
    }

private:
    Rational objective_value(const std::vector<Rational>& c) const {
        Rational v = 0;
        for (std::size_t r = 0; r < rows_.size(); ++r)
            if (c[basis_[r]] != 0) v += c[basis_[r]] * rows_[r].back();
        return v;
    }

    std::vector<Rational> primal() const {
        std::vector<Rational> x(n_);
        for (std::size_t r = 0; r < rows_.size(); ++r)
            if (basis_[r] < n_) x[basis_[r]] = rows_[r].back();
        return x;
    }

    void pivot(std::size_t pr, std::size_t pc) {
        auto& prow = rows_[pr];
        const Rational inv = 1 / prow[pc];
        for (auto& v : prow)
            if (v != 0) v *= inv;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (r == pr || rows_[r][pc] == 0) continue;
            const Rational f = rows_[r][pc];
            auto& row = rows_[r];
            for (std::size_t j = 0; j < prow.size(); ++j)
                if (prow[j] != 0) row[j] -= f * prow[j];
        }
        basis_[pr] = pc;
    }

    /// Primal simplex on the first `ncols` columns. Dantzig pricing, switching to Bland's
    /// rule after a run of degenerate pivots so cycling cannot occur.
    void optimize(const std::vector<Rational>& c, std::size_t ncols) {
        const std::size_t m = rows_.size();
        std::vector<Rational> d(ncols);
        std::size_t degenerate_run = 0;
        while (true) {
            // reduced costs d_j = c_j - c_B . column_j
            for (std::size_t j = 0; j < ncols; ++j) d[j] = c[j];
            for (std::size_t r = 0; r < m; ++r) {
                const Rational& cb = c[basis_[r]];
                if (cb == 0) continue;
                for (std::size_t j = 0; j < ncols; ++j)
                    if (rows_[r][j] != 0) d[j] -= cb * rows_[r][j];
            }
            const bool bland = degenerate_run > 2 * m + 8;
            std::size_t enter = ncols;
            for (std::size_t j = 0; j < ncols; ++j) {
                if (d[j] >= 0) continue;
                if (bland) {
                    enter = j;
                    break;
                }
                if (enter == ncols || d[j] < d[enter]) enter = j;
            }
            if (enter == ncols) return;

            std::size_t leave = m;
            Rational best;
            for (std::size_t r = 0; r < m; ++r) {
                const Rational& a = rows_[r][enter];
                if (a <= 0) continue;
                Rational ratio = rows_[r].back() / a;
                if (leave == m || ratio < best || (ratio == best && basis_[r] < basis_[leave])) {
                    leave = r;
                    best = ratio;
                }
            }
            if (leave == m) throw Unbounded("linear program is unbounded");
            degenerate_run = best == 0 ? degenerate_run + 1 : 0;
            pivot(leave, enter);
        }
    }

    std::size_t n_;
    std::vector<std::vector<Rational>> rows_;
    std::vector<std::size_t> basis_;
};

}  // namespace medbounds
