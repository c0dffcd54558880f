#pragma once

// Structural models as laws over response-type combos, and exact counterfactual truths.

#include <cstdint>
#include <utility>
#include <vector>

#include "medbounds/errors.hpp"
#include "medbounds/observed.hpp"
#include "medbounds/rational.hpp"
#include "medbounds/response_types.hpp"
#include "medbounds/rng.hpp"
#include "medbounds/types.hpp"

namespace medbounds {

/// Law over response-type combos, stored as (combo, weight) atoms.
template <class T, Setting S>
struct Scm {
    static constexpr Setting setting = S;
    std::vector<std::pair<int, T>> atoms;

    static Scm point_mass(const Combo& c) { return Scm{{{ResponseTypes<S>::encode(c), T(1)}}}; }

    T total() const {
        T s(0);
        for (const auto& [c, w] : atoms) s += w;
        return s;
    }

    void validate() const {
        const T tol = is_exact_v<T> ? T(0) : T(1e-9);
        for (const auto& [c, w] : atoms) {
            if (c < 0 || c >= ResponseTypes<S>::num_combos)
                throw InvalidDistribution("combo index out of range");
            if (w < -tol) throw InvalidDistribution("negative combo weight");
        }
        T dev = total() - T(1);
        if (dev > tol || dev < -tol) throw InvalidDistribution("combo weights do not sum to 1");
    }
};

template <class T>
using ScmI = Scm<T, Setting::I>;
template <class T>
using ScmII = Scm<T, Setting::II>;

/// p(cell | a) = total weight of combos realizing the cell in arm a.
template <class T, Setting S>
ObservedDist<T, S> observed_of(const Scm<T, S>& scm) {
    typename ObservedDist<T, S>::Cells c;
    c.fill(T(0));
    for (const auto& [combo, w] : scm.atoms) {
        const Combo k = ResponseTypes<S>::decode(combo);
        for (int a = 0; a < 2; ++a) c[ResponseTypes<S>::observed_cell(k, a)] += w;
    }
    return ObservedDist<T, S>::from_cells(std::move(c));
}

/// Nested counterfactual Y(a_y, L(a_l1), M(a_m, L(a_l2))) entering an estimand.
struct NestedTerm {
    int a_y, a_l1, a_m, a_l2;
};

/// The estimand as a difference of two nested counterfactual probabilities.
/// Randomization-only kinds use the intervention where L follows `driver`.
inline std::pair<NestedTerm, NestedTerm> nested_contrast(const Estimand& e,
                                                         LDriver driver = LDriver::Mediator) {
    const int a = e.arm;
    switch (e.kind) {
        case EstimandKind::SDE:
        case EstimandKind::SIE:
        case EstimandKind::TE: {
            const Contrast k = contrast_of(e, driver);
            return {{k.first.ay, k.first.al, k.first.am, k.first.al},
                    {k.second.ay, k.second.al, k.second.am, k.second.al}};
        }
        case EstimandKind::NDE_FRECHET:
        case EstimandKind::MEDIATION_POINT_NDE: return {{1, a, a, a}, {0, a, a, a}};
        case EstimandKind::MEDIATION_POINT_NIE: return {{a, 1, 1, 1}, {a, 0, 0, 0}};
        case EstimandKind::NDE_TCHETGEN: {
            // L follows the outcome arm; the mediator comes from world a*
            const int ms = e.mediator_arm;
            return {{1, 1, ms, ms}, {0, 0, ms, ms}};
        }
    }
    throw UnsupportedEstimand("unknown estimand kind");
}

/// Exact expectation of the estimand's counterfactual contrast under the model.
template <class T, Setting S>
T true_effect(const Scm<T, S>& scm, const Estimand& e, LDriver driver = LDriver::Mediator) {
    if (e.setting != S) throw UnsupportedEstimand("estimand setting does not match model");
    if (e.kind == EstimandKind::NDE_TCHETGEN && S != Setting::II)
        throw UnsupportedEstimand("Tchetgen NDE is defined in setting II only");
    const auto [p, n] = nested_contrast(e, driver);
    T v(0);
    for (const auto& [combo, w] : scm.atoms) {
        const Combo c = ResponseTypes<S>::decode(combo);
        const int d = ResponseTypes<S>::nested(c, p.a_y, p.a_l1, p.a_m, p.a_l2) -
                      ResponseTypes<S>::nested(c, n.a_y, n.a_l1, n.a_m, n.a_l2);
        if (d > 0) {
            v += w;
        } else if (d < 0) {
            v -= w;
        }
    }
    return v;
}

/// Uniform draw from the simplex over all combos (Dirichlet with unit concentration),
/// so component types are arbitrarily dependent.
template <Setting S>
Scm<double, S> sample_scm(std::uint64_t seed) {
    Rng rng(seed);
    Scm<double, S> scm;
    scm.atoms.resize(ResponseTypes<S>::num_combos);
    double total = 0;
    for (int i = 0; i < ResponseTypes<S>::num_combos; ++i) {
        const double e = rng.exponential();
        scm.atoms[i] = {i, e};
        total += e;
    }
    for (auto& [c, w] : scm.atoms) w /= total;
    return scm;
}

/// Independent-bit law: every component-function bit is an independent Bernoulli whose
/// probability is the matching observed conditional. It reproduces `d` and satisfies
/// cross-world independence. Undefined conditionals are set to 0 (they are never used).
template <Setting S>
Scm<Rational, S> product_scm(const ObservedDist<Rational, S>& d) {
    using RT = ResponseTypes<S>;
    // probability that each bit of each component function is 1
    std::vector<Rational> pl, pm, py;
    auto value = [](const std::optional<Rational>& x) { return x ? *x : Rational(0); };
    if constexpr (S == Setting::I) {
        for (int a = 0; a < 2; ++a) pm.push_back(prob_m(d, 1, a));
        for (int a = 0; a < 2; ++a)
            for (int m = 0; m < 2; ++m) py.push_back(value(cond_y1_given_m(d, m, a)));
    } else {
        for (int a = 0; a < 2; ++a) pl.push_back(prob_l(d, 1, a));
        for (int a = 0; a < 2; ++a)
            for (int l = 0; l < 2; ++l) pm.push_back(value(cond_m_given_l(d, 1, l, a)));
        for (int a = 0; a < 2; ++a)
            for (int l = 0; l < 2; ++l)
                for (int m = 0; m < 2; ++m) py.push_back(value(cond_y1_given_ml(d, m, l, a)));
    }
    auto bits_law = [](const std::vector<Rational>& p) {
        std::vector<Rational> law(std::size_t{1} << p.size());
        for (std::size_t f = 0; f < law.size(); ++f) {
            Rational w = 1;
            for (std::size_t i = 0; i < p.size(); ++i)
                w *= ((f >> i) & 1) ? p[i] : Rational(1 - p[i]);
            law[f] = w;
        }
        return law;
    };
    const auto lL = bits_law(pl), lM = bits_law(pm), lY = bits_law(py);
    Scm<Rational, S> scm;
    for (int fl = 0; fl < RT::num_l_types; ++fl) {
        if (lL[fl] == 0) continue;
        for (int fm = 0; fm < RT::num_m_types; ++fm) {
            if (lM[fm] == 0) continue;
            Rational w = lL[fl] * lM[fm];
            for (int fy = 0; fy < RT::num_y_types; ++fy) {
                if (lY[fy] == 0) continue;
                scm.atoms.push_back({RT::encode({fl, fm, fy}), Rational(w * lY[fy])});
            }
        }
    }
    return scm;
}

/// Estimand value under the independent-bit law of `d`, by the sequential g-formula
/// (no enumeration of response types).
template <Setting S>
Rational product_law_effect(const ObservedDist<Rational, S>& d, const Estimand& e,
                            LDriver driver = LDriver::Mediator) {
    auto value = [](const std::optional<Rational>& x) { return x ? *x : Rational(0); };
    auto term = [&](const NestedTerm& t) {
        Rational out = 0;
        if constexpr (S == Setting::I) {
            for (int m = 0; m < 2; ++m)
                out += value(cond_y1_given_m(d, m, t.a_y)) * prob_m(d, m, t.a_m);
        } else {
            // L(a_l1) and L(a_l2) coincide when the arms agree, otherwise independent
            for (int l1 = 0; l1 < 2; ++l1)
                for (int l2 = 0; l2 < 2; ++l2) {
                    Rational wl;
                    if (t.a_l1 == t.a_l2) {
                        if (l1 != l2) continue;
                        wl = prob_l(d, l1, t.a_l1);
                    } else {
                        wl = prob_l(d, l1, t.a_l1) * prob_l(d, l2, t.a_l2);
                    }
                    if (wl == 0) continue;
                    for (int m = 0; m < 2; ++m)
                        out += wl * value(cond_m_given_l(d, m, l2, t.a_m)) *
                               value(cond_y1_given_ml(d, m, l1, t.a_y));
                }
        }
        return out;
    };
    const auto [p, n] = nested_contrast(e, driver);
    return term(p) - term(n);
}

}  // namespace medbounds
