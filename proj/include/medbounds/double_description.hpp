#pragma once

// Double description method: extreme rays of a pointed cone { z : H z >= 0 } with integer H,
// in exact integer arithmetic.

#include <algorithm>
#include <bitset>
#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "medbounds/errors.hpp"
#include "medbounds/rational.hpp"

namespace medbounds {

using IntVector = std::vector<mpz_class>;
using IntMatrix = std::vector<IntVector>;

inline constexpr std::size_t kMaxDdRows = 512;

struct DdOptions {
    /// Upper bound on the cumulative number of rays created.
    std::uint64_t node_budget = 10'000'000;
};

struct DdStats {
    std::uint64_t nodes = 0;
    std::size_t max_live_rays = 0;
};

namespace detail {

inline void normalize_ray(IntVector& r) {
    mpz_class g = 0;
    for (const auto& v : r) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    if (g > 1)
        for (auto& v : r) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
}

inline mpz_class dot(const IntVector& a, const IntVector& b) {
    mpz_class s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
    return s;
}

/// Indices of a maximal linearly independent subset of rows, scanned in the given order.
inline std::vector<std::size_t> independent_rows(const IntMatrix& H,
                                                 const std::vector<std::size_t>& order,
                                                 std::size_t dim) {
    std::vector<std::vector<Rational>> echelon;  // reduced rows with their pivot columns
    std::vector<std::size_t> pivots, picked;
    for (std::size_t idx : order) {
        std::vector<Rational> v(dim);
        for (std::size_t j = 0; j < dim; ++j) v[j] = Rational(H[idx][j]);
        for (std::size_t e = 0; e < echelon.size(); ++e) {
            const std::size_t pc = pivots[e];
            if (v[pc] == 0) continue;
            const Rational f = v[pc] / echelon[e][pc];
            for (std::size_t j = 0; j < dim; ++j) v[j] -= f * echelon[e][j];
        }
        auto nz = std::find_if(v.begin(), v.end(), [](const Rational& x) { return x != 0; });
        if (nz == v.end()) continue;
        pivots.push_back(static_cast<std::size_t>(nz - v.begin()));
        echelon.push_back(std::move(v));
        picked.push_back(idx);
        if (picked.size() == dim) break;
    }
    return picked;
}

/// Columns of the inverse of the square matrix formed by `rows` of H, scaled to integers.
inline IntMatrix inverse_columns(const IntMatrix& H, const std::vector<std::size_t>& rows) {
    const std::size_t n = rows.size();
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational(H[rows[i]][j]);
        a[i][n + i] = 1;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (a[piv][col] == 0) ++piv;
        std::swap(a[piv], a[col]);
        const Rational inv = 1 / a[col][col];
        for (auto& v : a[col]) v *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            const Rational f = a[r][col];
            for (std::size_t j = 0; j < 2 * n; ++j) a[r][j] -= f * a[col][j];
        }
    }
    IntMatrix out(n, IntVector(n));
    for (std::size_t c = 0; c < n; ++c) {
        mpz_class lcm = 1;
        for (std::size_t r = 0; r < n; ++r)
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), a[r][n + c].get_den_mpz_t());
        for (std::size_t r = 0; r < n; ++r) {
            Rational v = a[r][n + c] * lcm;
            out[c][r] = v.get_num();
        }
        normalize_ray(out[c]);
    }
    return out;
}

inline bool lex_less(const IntVector& a, const IntVector& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace detail

/// Extreme rays of { z : H z >= 0 }. Rows are inserted in lexicographic order.
/// Throws DimensionMismatch when the cone is not pointed (H lacks full column rank)
/// and ResourceExhausted when the node budget runs out.
inline IntMatrix extreme_rays(const IntMatrix& H, const DdOptions& opt = {},
                              DdStats* stats = nullptr) {
    if (H.empty()) throw DimensionMismatch("double description: no constraints");
    const std::size_t dim = H.front().size();
    if (H.size() > kMaxDdRows) throw DimensionMismatch("double description: too many rows");
    for (const auto& row : H)
        if (row.size() != dim) throw DimensionMismatch("double description: ragged matrix");

    std::vector<std::size_t> order(H.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return detail::lex_less(H[a], H[b]); });

    const auto basis = detail::independent_rows(H, order, dim);
    if (basis.size() < dim) throw DimensionMismatch("double description: cone is not pointed");

    using ZeroSet = std::bitset<kMaxDdRows>;
    struct Ray {
        IntVector z;
        ZeroSet zeros;
    };
    std::vector<Ray> rays;
    {
        IntMatrix gens = detail::inverse_columns(H, basis);
        ZeroSet all;
        for (std::size_t b : basis) all.set(b);
        for (std::size_t i = 0; i < dim; ++i) {
            ZeroSet z = all;
            z.reset(basis[i]);
            rays.push_back({std::move(gens[i]), z});
        }
    }
    DdStats local;
    local.nodes = rays.size();
    local.max_live_rays = rays.size();

    std::vector<bool> in_basis(H.size(), false);
    for (std::size_t b : basis) in_basis[b] = true;
    std::size_t rows_done = dim;
    const std::size_t adjacency_floor = dim >= 2 ? dim - 2 : 0;

    for (std::size_t row : order) {
        if (in_basis[row]) continue;
        const IntVector& h = H[row];
        std::vector<mpz_class> val(rays.size());
        std::vector<std::size_t> pos, neg;
        for (std::size_t i = 0; i < rays.size(); ++i) {
            val[i] = detail::dot(h, rays[i].z);
            if (val[i] > 0) {
                pos.push_back(i);
            } else if (val[i] < 0) {
                neg.push_back(i);
            } else {
                rays[i].zeros.set(row);
            }
        }
        std::vector<Ray> next;
        if (!neg.empty()) {
            for (std::size_t p : pos) {
                for (std::size_t n : neg) {
                    const ZeroSet common = rays[p].zeros & rays[n].zeros;
                    if (common.count() < adjacency_floor) continue;
                    bool adjacent = true;
                    for (std::size_t k = 0; k < rays.size(); ++k) {
                        if (k == p || k == n) continue;
                        if ((rays[k].zeros & common) == common) {
                            adjacent = false;
                            break;
                        }
                    }
                    if (!adjacent) continue;
                    IntVector z(dim);
                    for (std::size_t j = 0; j < dim; ++j)
                        z[j] = val[p] * rays[n].z[j] - val[n] * rays[p].z[j];
                    detail::normalize_ray(z);
                    ZeroSet zs = common;
                    zs.set(row);
                    next.push_back({std::move(z), zs});
                    if (++local.nodes > opt.node_budget) {
                        if (stats) *stats = local;
                        throw ResourceExhausted("vertex enumeration exceeded node budget", rows_done,
                                                H.size(), local.nodes, rays.size() + next.size());
                    }
                }
            }
        }
        std::vector<Ray> kept;
        kept.reserve(pos.size() + next.size() + rays.size() - pos.size() - neg.size());
        for (std::size_t i = 0; i < rays.size(); ++i)
            if (val[i] >= 0) kept.push_back(std::move(rays[i]));
        for (auto& r : next) kept.push_back(std::move(r));
        rays = std::move(kept);
        local.max_live_rays = std::max(local.max_live_rays, rays.size());
        ++rows_done;
    }
    if (stats) *stats = local;

    IntMatrix out;
    out.reserve(rays.size());
    for (auto& r : rays) out.push_back(std::move(r.z));
    std::sort(out.begin(), out.end(), detail::lex_less);
    return out;
}

}  // namespace medbounds
