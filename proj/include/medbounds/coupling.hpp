#pragma once

// Cross-world couplings: models that keep every single-world law identified from the data
// but leave the dependence between worlds free. coupling_bounds optimizes the cross-world
// term over them; sample_coupling draws one at random.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "medbounds/errors.hpp"
#include "medbounds/observed.hpp"
#include "medbounds/rational.hpp"
#include "medbounds/response_types.hpp"
#include "medbounds/rng.hpp"
#include "medbounds/scm.hpp"
#include "medbounds/simplex.hpp"
#include "medbounds/types.hpp"

namespace medbounds {

namespace detail {

using BitEvent = std::vector<std::pair<int, int>>;  // (coordinate, value) conjunction

/// LP over joint laws of `bits` binary coordinates: Pr(event_i) = prob_i for every row,
/// objective = sum of probabilities of the objective events.
struct CouplingProgram {
    int bits = 0;
    std::vector<std::pair<BitEvent, Rational>> rows;
    std::vector<BitEvent> objective;

    void require(BitEvent e, Rational p) { rows.emplace_back(std::move(e), std::move(p)); }
};

inline bool satisfies(std::uint32_t x, const BitEvent& e) {
    return std::all_of(e.begin(), e.end(),
                       [x](const auto& f) { return static_cast<int>((x >> f.first) & 1) == f.second; });
}

inline Interval<Rational> solve_coupling(const CouplingProgram& prog) {
    const std::size_t n = std::size_t{1} << prog.bits;
    RationalMatrix A;
    std::vector<Rational> b;
    A.emplace_back(n, Rational(1));
    b.emplace_back(1);
    for (const auto& [event, p] : prog.rows) {
        std::vector<Rational> row(n);
        for (std::size_t x = 0; x < n; ++x)
            if (satisfies(static_cast<std::uint32_t>(x), event)) row[x] = 1;
        A.push_back(std::move(row));
        b.push_back(p);
    }
    std::vector<Rational> c(n);
    for (std::size_t x = 0; x < n; ++x)
        for (const auto& e : prog.objective)
            if (satisfies(static_cast<std::uint32_t>(x), e)) c[x] += 1;
    ExactSimplex lp(A, b);
    const Rational lo = lp.minimize(c).value;
    const Rational hi = lp.maximize(c).value;
    return {lo, hi};
}

[[noreturn]] inline void undefined(const char* what) {
    throw UndefinedConditional(std::string("undefined conditional ") + what);
}

/// Coordinates: 0 = M(a*), 1 + m = Y(b, m).
inline CouplingProgram rr_program(const ObservedDistI<Rational>& d, int mediator_arm) {
    const int b = 1 - mediator_arm;
    CouplingProgram prog;
    prog.bits = 3;
    prog.require({{0, 1}}, prob_m(d, 1, mediator_arm));
    for (int m = 0; m < 2; ++m) {
        if (auto y = cond_y1_given_m(d, m, b)) {
            prog.require({{1 + m, 1}}, *y);
        } else if (prob_m(d, m, mediator_arm) > 0) {
            undefined("Pr(Y=1|A,M)");
        }
        prog.objective.push_back({{0, m}, {1 + m, 1}});
    }
    return prog;
}

/// Marginals of L(a) and M(a, l'), plus the identified joint of L(a) with M(a, L(a)).
/// Coordinates: l_bit = L(a), m_base + l' = M(a, l').
inline void require_lm_world(CouplingProgram& prog, const ObservedDistII<Rational>& d, int a,
                             int l_bit, int m_base) {
    prog.require({{l_bit, 1}}, prob_l(d, 1, a));
    for (int l = 0; l < 2; ++l) {
        auto pm = cond_m_given_l(d, 1, l, a);
        if (!pm) continue;  // L(a) never equals l, so M(a, l) is irrelevant
        prog.require({{m_base + l, 1}}, *pm);
        prog.require({{l_bit, l}, {m_base + l, 1}}, Rational(prob_l(d, l, a) * *pm));
    }
}

/// Coordinates: 0 = L(a), 1 + l = M(a, l), 3 + 2l + m = Y(b, l, m).
inline CouplingProgram nested_program(const ObservedDistII<Rational>& d, int arm) {
    const int b = 1 - arm;
    CouplingProgram prog;
    prog.bits = 7;
    require_lm_world(prog, d, arm, 0, 1);
    for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m) {
            const int yb = 3 + 2 * l + m;
            if (auto y = cond_y1_given_ml(d, m, l, b)) {
                prog.require({{yb, 1}}, *y);
            } else if (prob_ml(d, m, l, arm) > 0) {
                undefined("Pr(Y=1|A,M,L)");
            }
            prog.objective.push_back({{0, l}, {1 + l, m}, {yb, 1}});
        }
    return prog;
}

/// Coordinates: 0 = L(a*), 1 + l = M(a*, l), 3 = L(b), 4 + 2l + m = Y(b, l, m).
inline CouplingProgram tchetgen_program(const ObservedDistII<Rational>& d, int outcome_arm,
                                        int mediator_arm) {
    const int b = outcome_arm;
    CouplingProgram prog;
    prog.bits = 8;
    require_lm_world(prog, d, mediator_arm, 0, 1);
    prog.require({{3, 1}}, prob_l(d, 1, b));
    for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m) {
            const int yb = 4 + 2 * l + m;
            if (auto y = cond_y1_given_ml(d, m, l, b)) {
                prog.require({{yb, 1}}, *y);
                prog.require({{3, l}, {yb, 1}}, Rational(prob_l(d, l, b) * *y));
            } else if (prob_m(d, m, mediator_arm) > 0 && prob_l(d, l, b) > 0) {
                undefined("Pr(Y=1|A,M,L)");
            }
            // Y(b, L(b), M(a*, L(a*))) = 1 with L(b) = l and M(a*, L(a*)) = m
            for (int ls = 0; ls < 2; ++ls)
                prog.objective.push_back({{3, l}, {0, ls}, {1 + ls, m}, {yb, 1}});
        }
    return prog;
}

template <Setting S>
Interval<Rational> nde_interval(const ObservedDist<Rational, S>& d, const Interval<Rational>& cross,
                                int mediator_arm) {
    if (mediator_arm == 0) {
        const Rational p0 = prob_y1(d, 0);
        return {cross.lower - p0, cross.upper - p0};
    }
    const Rational p1 = prob_y1(d, 1);
    return {p1 - cross.upper, p1 - cross.lower};
}

}  // namespace detail

/// Sharp range of the NDE over all cross-world couplings of the identified single-world
/// laws (the envelope that the Frechet formulas over-approximate).
template <Setting S>
Interval<Rational> coupling_bounds(const ObservedDist<Rational, S>& d, const Estimand& e) {
    if (e.setting != S) throw UnsupportedEstimand("estimand setting does not match distribution");
    if constexpr (S == Setting::I) {
        if (e.kind != EstimandKind::NDE_FRECHET)
            throw UnsupportedEstimand("setting I couplings bound NDE(a*) only");
        return detail::nde_interval(d, detail::solve_coupling(detail::rr_program(d, e.arm)), e.arm);
    } else {
        if (e.kind == EstimandKind::NDE_FRECHET)
            return detail::nde_interval(d, detail::solve_coupling(detail::nested_program(d, e.arm)),
                                        e.arm);
        if (e.kind == EstimandKind::NDE_TCHETGEN)
            return detail::nde_interval(
                d, detail::solve_coupling(detail::tchetgen_program(d, e.arm, e.mediator_arm)),
                e.mediator_arm);
        throw UnsupportedEstimand(label(e) + " is not a cross-world-only estimand");
    }
}

// ---------------------------------------------------------------------------
// Random couplings

namespace detail {

/// Law over 2^k states of k bits with the given marginals: a random mixture of a
/// shared-uniform coupling (each bit comonotone or antitone in U) and the independent one.
inline std::vector<Rational> random_block_law(const std::vector<Rational>& p, Rng& rng) {
    const std::size_t k = p.size();
    std::vector<Rational> independent(std::size_t{1} << k);
    for (std::size_t s = 0; s < independent.size(); ++s) {
        Rational w = 1;
        for (std::size_t i = 0; i < k; ++i) w *= ((s >> i) & 1) ? p[i] : Rational(1 - p[i]);
        independent[s] = w;
    }
    // bit i is 1 on [0, p_i) (upward) or on [1 - p_i, 1) (downward)
    std::vector<bool> up(k);
    std::vector<Rational> cuts = {Rational(0), Rational(1)};
    for (std::size_t i = 0; i < k; ++i) {
        up[i] = rng.below(2) == 1;
        cuts.push_back(up[i] ? p[i] : Rational(1 - p[i]));
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<Rational> shared(independent.size());
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        const Rational len = cuts[j + 1] - cuts[j];
        if (len == 0) continue;
        const Rational mid = (cuts[j] + cuts[j + 1]) / 2;
        std::size_t s = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const bool one = up[i] ? mid < p[i] : mid >= 1 - p[i];
            if (one) s |= std::size_t{1} << i;
        }
        shared[s] += len;
    }
    const Rational lambda(static_cast<long>(rng.below(9)), 8L);
    std::vector<Rational> law(independent.size());
    for (std::size_t s = 0; s < law.size(); ++s)
        law[s] = lambda * shared[s] + (1 - lambda) * independent[s];
    return law;
}

/// Product of independent blocks, concatenating their bits (first block lowest).
inline std::vector<Rational> product_law(const std::vector<std::vector<Rational>>& blocks) {
    std::vector<Rational> law = {Rational(1)};
    for (const auto& blk : blocks) {
        std::vector<Rational> next(law.size() * blk.size());
        for (std::size_t t = 0; t < blk.size(); ++t)
            for (std::size_t s = 0; s < law.size(); ++s) next[t * law.size() + s] = law[s] * blk[t];
        law = std::move(next);
    }
    return law;
}

/// North-west corner transport plan between two laws after random state orderings.
inline std::vector<std::tuple<std::size_t, std::size_t, Rational>> random_transport(
    const std::vector<Rational>& mu, const std::vector<Rational>& nu, Rng& rng) {
    auto shuffled_support = [&rng](const std::vector<Rational>& law) {
        std::vector<std::size_t> idx;
        for (std::size_t s = 0; s < law.size(); ++s)
            if (law[s] > 0) idx.push_back(s);
        for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
        return idx;
    };
    const auto rows = shuffled_support(mu), cols = shuffled_support(nu);
    std::vector<std::tuple<std::size_t, std::size_t, Rational>> plan;
    std::size_t i = 0, j = 0;
    Rational ri = rows.empty() ? Rational(0) : mu[rows[0]];
    Rational cj = cols.empty() ? Rational(0) : nu[cols[0]];
    while (i < rows.size() && j < cols.size()) {
        const Rational m = std::min(ri, cj);
        if (m > 0) plan.emplace_back(rows[i], cols[j], m);
        ri -= m;
        cj -= m;
        if (ri == 0 && ++i < rows.size()) ri = mu[rows[i]];
        if (cj == 0 && ++j < cols.size()) cj = nu[cols[j]];
    }
    return plan;
}

/// Single-world state of arm a: setting I bits [M(a), Y(a,0), Y(a,1)];
/// setting II bits [L(a), M(a,0), M(a,1), Y(a,l,m) at 3 + 2l + m].
template <Setting S>
std::vector<Rational> world_law(const ObservedDist<Rational, S>& d, int a, Rng& rng) {
    auto need = [](const std::optional<Rational>& x, const char* what) {
        if (!x) undefined(what);
        return *x;
    };
    if constexpr (S == Setting::I) {
        std::vector<Rational> ym;
        for (int m = 0; m < 2; ++m) ym.push_back(need(cond_y1_given_m(d, m, a), "Pr(Y=1|A,M)"));
        return product_law({random_block_law({prob_m(d, 1, a)}, rng), random_block_law(ym, rng)});
    } else {
        std::vector<Rational> ml, yml;
        for (int l = 0; l < 2; ++l) ml.push_back(need(cond_m_given_l(d, 1, l, a), "Pr(M|A,L)"));
        for (int l = 0; l < 2; ++l)
            for (int m = 0; m < 2; ++m)
                yml.push_back(need(cond_y1_given_ml(d, m, l, a), "Pr(Y=1|A,M,L)"));
        return product_law({random_block_law({prob_l(d, 1, a)}, rng), random_block_law(ml, rng),
                            random_block_law(yml, rng)});
    }
}

template <Setting S>
int combo_of_worlds(std::size_t s0, std::size_t s1) {
    Combo c;
    const std::size_t s[2] = {s0, s1};
    for (int a = 0; a < 2; ++a) {
        if constexpr (S == Setting::I) {
            c.fm |= static_cast<int>(s[a] & 1) << a;
            for (int m = 0; m < 2; ++m) c.fy |= static_cast<int>((s[a] >> (1 + m)) & 1) << (a * 2 + m);
        } else {
            c.fl |= static_cast<int>(s[a] & 1) << a;
            for (int l = 0; l < 2; ++l)
                c.fm |= static_cast<int>((s[a] >> (1 + l)) & 1) << (a * 2 + l);
            for (int l = 0; l < 2; ++l)
                for (int m = 0; m < 2; ++m)
                    c.fy |= static_cast<int>((s[a] >> (3 + 2 * l + m)) & 1) << ((a * 2 + l) * 2 + m);
        }
    }
    return ResponseTypes<S>::encode(c);
}

}  // namespace detail

/// Random model whose single-world laws reproduce every identified conditional of `d`
/// exactly while the two worlds are coupled by a random mixture of extreme transport plans.
template <Setting S>
Scm<Rational, S> sample_coupling(const ObservedDist<Rational, S>& d, std::uint64_t seed) {
    Rng rng(seed);
    const auto w0 = detail::world_law(d, 0, rng);
    const auto w1 = detail::world_law(d, 1, rng);
    const int plans = 1 + static_cast<int>(rng.below(3));
    std::vector<long> weights(plans);
    for (auto& w : weights) w = 1 + static_cast<long>(rng.below(8));
    const long total = std::accumulate(weights.begin(), weights.end(), 0L);
    std::map<int, Rational> atoms;
    for (int k = 0; k < plans; ++k) {
        const Rational wk(weights[k], total);
        for (const auto& [s0, s1, mass] : detail::random_transport(w0, w1, rng))
            atoms[detail::combo_of_worlds<S>(s0, s1)] += wk * mass;
    }
    Scm<Rational, S> scm;
    for (auto& [c, w] : atoms) {
        w.canonicalize();
        scm.atoms.emplace_back(c, w);
    }
    return scm;
}

}  // namespace medbounds
