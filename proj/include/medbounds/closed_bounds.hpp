#pragma once

// Closed-form bounds: sharp randomization-only term lists for SDE/SIE in both settings,
// and Frechet-inequality bounds on natural direct effects when only cross-world
// independence is dropped.

#include <array>
#include <string_view>
#include <vector>

#include "medbounds/errors.hpp"
#include "medbounds/linear_expr.hpp"
#include "medbounds/observed.hpp"
#include "medbounds/types.hpp"

namespace medbounds {

/// Where a closed form comes from: printed as such, or obtained from the printed
/// construction by exchanging the arms.
enum class Provenance { PaperForm, ArmSymmetry, Lp };

inline std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::PaperForm: return "paper-form";
        case Provenance::ArmSymmetry: return "arm-symmetry";
        case Provenance::Lp: return "lp";
    }
    return "?";
}

namespace detail {

struct TermLists {
    std::array<std::string_view, 5> lower;
    std::array<std::string_view, 5> upper;
    std::size_t count;
};

// Term lists in display order. Terms that differ from reference_bounds.hpp are the
// corrected misprints (verified against the LP and its witnesses).
inline const TermLists& setting1_terms(EstimandKind kind, int arm) {
    static const TermLists sde1 = {
        {"-2*p00_1 + p01_0 - p01_1 - p10_1", "-1 + p00_0 - p01_1 + p10_1", "-p00_1 - p01_1"},
        {"p00_0 + p01_0 - p01_1 + p10_0 + p10_1", "1 - p00_1 - p01_1",
         "2 - 2*p00_1 - p01_1 - p10_0 - p10_1"},
        3};
    static const TermLists sde0 = {
        {"-p00_1 + p01_0 - p01_1 - p10_0 - p10_1", "-2 + 2*p00_0 + p01_0 + p10_0 + p10_1",
         "-1 + p00_0 + p01_0"},
        {"2*p00_0 + p01_0 - p01_1 + p10_0", "p00_0 + p01_0", "1 - p00_1 + p01_0 - p10_0"},
        3};
    static const TermLists sie1 = {
        {"-p00_1 - p01_1", "-p00_0 - p00_1 - p10_0", "-1 + p00_0 - p01_1 + p10_0"},
        {"2 - p00_0 - p00_1 - p01_1 - p10_0 - p10_1", "1 - p00_1 - p01_1",
         "p00_0 + p10_0 + p10_1"},
        3};
    static const TermLists sie0 = {
        {"-p00_1 - p10_0 - p10_1", "-2 + p00_0 + p00_1 + p01_0 + p10_0 + p10_1",
         "-1 + p00_0 + p01_0"},
        {"1 - p00_1 + p01_0 - p10_1", "p00_0 + p01_0", "p00_0 + p00_1 + p10_1"},
        3};
    if (kind == EstimandKind::SDE) return arm ? sde1 : sde0;
    return arm ? sie1 : sie0;
}

inline const TermLists& setting2_terms(EstimandKind kind, int arm) {
    static const TermLists sde1 = {
        {"-2*p000_1 - 2*p010_1 - p100_1 - p110_1 - 2*p001_1 + p011_0 - p011_1 - p101_1",
         "-1 - p000_1 - p010_1 + p001_0 - p011_1 + p101_1",
         "-1 - p000_1 + p010_0 + p110_1 - p001_1 - p011_1",
         "-1 + p000_0 - p010_1 + p100_1 - p001_1 - p011_1", "-p000_1 - p010_1 - p001_1 - p011_1"},
        {"2 - p000_1 - 2*p010_1 - p110_0 - p110_1 - p001_1 - p011_1",
         "2 - p000_1 - p010_1 - 2*p001_1 - p011_1 - p101_0 - p101_1",
         "p000_0 + p010_0 + p100_0 + p100_1 + p110_0 + p110_1 + p001_0 + p011_0 - p011_1 + p101_0 "
         "+ p101_1",
         "1 - p000_1 - p010_1 - p001_1 - p011_1",
         "2 - 2*p000_1 - p010_1 - p100_0 - p100_1 - p001_1 - p011_1"},
        5};
    static const TermLists sde0 = {
        {"-p000_1 - p010_1 - p100_0 - p100_1 - p110_0 - p110_1 - p001_1 + p011_0 - p011_1 - p101_0 "
         "- p101_1",
         "-2 + p000_0 + p010_0 + 2*p001_0 + p011_0 + p101_0 + p101_1",
         "-2 + p000_0 + 2*p010_0 + p110_0 + p110_1 + p001_0 + p011_0",
         "-2 + 2*p000_0 + p010_0 + p100_0 + p100_1 + p001_0 + p011_0",
         "-1 + p000_0 + p010_0 + p001_0 + p011_0"},
        {"1 + p000_0 - p010_1 - p110_0 + p001_0 + p011_0",
         "1 + p000_0 + p010_0 - p001_1 + p011_0 - p101_0",
         "2*p000_0 + 2*p010_0 + p100_0 + p110_0 + 2*p001_0 + p011_0 - p011_1 + p101_0",
         "p000_0 + p010_0 + p001_0 + p011_0", "1 - p000_1 + p010_0 - p100_0 + p001_0 + p011_0"},
        5};
    static const TermLists sie1 = {
        {"-p000_1 - p001_1 - p010_1 - p011_1",
         "-p000_0 - p000_1 - p001_0 - p001_1 - p010_0 - p010_1 - p100_0 - p101_0 - p110_0",
         "-1 - p000_1 - p001_1 + p010_0 - p011_1 + p110_0",
         "-1 - p000_1 + p001_0 - p010_1 - p011_1 + p101_0",
         "-1 + p000_0 - p001_1 - p010_1 - p011_1 + p100_0"},
        {"2 - p000_0 - p000_1 - p001_1 - p010_1 - p011_1 - p100_0 - p100_1",
         "1 - p000_1 - p001_1 - p010_1 - p011_1",
         "2 - p000_1 - p001_0 - p001_1 - p010_1 - p011_1 - p101_0 - p101_1",
         "2 - p000_1 - p001_1 - p010_0 - p010_1 - p011_1 - p110_0 - p110_1",
         "p000_0 + p001_0 + p010_0 + p100_0 + p100_1 + p101_0 + p101_1 + p110_0 + p110_1"},
        5};
    static const TermLists sie0 = {
        {"-p000_1 - p001_1 - p010_1 - p100_0 - p100_1 - p101_0 - p101_1 - p110_0 - p110_1",
         "-2 + p000_0 + p001_0 + p010_0 + p010_1 + p011_0 + p110_0 + p110_1",
         "-2 + p000_0 + p001_0 + p001_1 + p010_0 + p011_0 + p101_0 + p101_1",
         "-2 + p000_0 + p000_1 + p001_0 + p010_0 + p011_0 + p100_0 + p100_1",
         "-1 + p000_0 + p001_0 + p010_0 + p011_0"},
        {"1 - p000_1 + p001_0 + p010_0 + p011_0 - p100_1", "p000_0 + p001_0 + p010_0 + p011_0",
         "1 + p000_0 - p001_1 + p010_0 + p011_0 - p101_1",
         "1 + p000_0 + p001_0 - p010_1 + p011_0 - p110_1",
         "p000_0 + p000_1 + p001_0 + p001_1 + p010_0 + p010_1 + p100_1 + p101_1 + p110_1"},
        5};
    if (kind == EstimandKind::SDE) return arm ? sde1 : sde0;
    return arm ? sie1 : sie0;
}

template <Setting S>
BoundExpr<S> build_closed_expr(EstimandKind kind, int arm) {
    const TermLists& t = S == Setting::I ? setting1_terms(kind, arm) : setting2_terms(kind, arm);
    BoundExpr<S> b;
    b.estimand = label(kind == EstimandKind::SDE ? Estimand::sde(S, arm) : Estimand::sie(S, arm));
    for (std::size_t i = 0; i < t.count; ++i) {
        b.lower.push_back(parse_linear_expr<S>(t.lower[i]));
        b.upper.push_back(parse_linear_expr<S>(t.upper[i]));
    }
    return b;
}

}  // namespace detail

/// Closed-form sharp bound expression for SDE(arm) or SIE(arm).
template <Setting S>
const BoundExpr<S>& closed_form_expr(EstimandKind kind, int arm) {
    if (kind != EstimandKind::SDE && kind != EstimandKind::SIE)
        throw UnsupportedEstimand("closed-form term lists exist for SDE and SIE only");
    check_arm(arm);
    static const std::array<BoundExpr<S>, 4> cache = {
        detail::build_closed_expr<S>(EstimandKind::SDE, 0),
        detail::build_closed_expr<S>(EstimandKind::SDE, 1),
        detail::build_closed_expr<S>(EstimandKind::SIE, 0),
        detail::build_closed_expr<S>(EstimandKind::SIE, 1)};
    return cache[(kind == EstimandKind::SIE ? 2 : 0) + arm];
}

template <class T>
Interval<T> sde1_bounds(const ObservedDistI<T>& d, int arm) {
    return closed_form_expr<Setting::I>(EstimandKind::SDE, arm).evaluate(d);
}

template <class T>
Interval<T> sie1_bounds(const ObservedDistI<T>& d, int arm) {
    return closed_form_expr<Setting::I>(EstimandKind::SIE, arm).evaluate(d);
}

template <class T>
Interval<T> gabriel_sde2_bounds(const ObservedDistII<T>& d, int arm) {
    return closed_form_expr<Setting::II>(EstimandKind::SDE, arm).evaluate(d);
}

template <class T>
Interval<T> gabriel_sie2_bounds(const ObservedDistII<T>& d, int arm) {
    return closed_form_expr<Setting::II>(EstimandKind::SIE, arm).evaluate(d);
}

// ---------------------------------------------------------------------------
// Frechet bounds

namespace detail {

template <class T, class V>
struct FrechetParts {
    V cross_lo;
    V cross_hi;
};

/// Pr{Y(b, M(a*)) = 1} in setting I: one two-event Frechet pair per mediator value.
template <class T, class V>
FrechetParts<T, V> rr_cross(const ObservedDistI<T>& d, int mediator_arm) {
    using D = Domain<T, V>;
    const int b = 1 - mediator_arm;
    V lo = D::lift(T(0)), hi = D::lift(T(0));
    for (int m = 0; m < 2; ++m) {
        const T pm = prob_m(d, m, mediator_arm);
        const V y = D::conditional(cond_y1_given_m(d, m, b), pm > 0, "Pr(Y=1|A,M)");
        const V vm = D::lift(pm);
        lo = lo + vmax(D::lift(T(0)), V(y + vm - D::lift(T(1))));
        hi = hi + vmin(y, vm);
    }
    return {lo, hi};
}

/// Pr{Y(b, L(a), M(a, L(a))) = 1} in setting II: three-event Frechet terms per (l, m),
/// each sum clamped by 1.
template <class T, class V>
FrechetParts<T, V> nested_cross(const ObservedDistII<T>& d, int arm) {
    using D = Domain<T, V>;
    const int b = 1 - arm;
    V lo = D::lift(T(0)), hi = D::lift(T(0));
    for (int m = 0; m < 2; ++m) {
        for (int l = 0; l < 2; ++l) {
            const T pl = prob_l(d, l, arm);
            const V vm = D::conditional(cond_m_given_l(d, m, l, arm), pl > 0, "Pr(M|A,L)");
            const V y = D::conditional(cond_y1_given_ml(d, m, l, b), prob_ml(d, m, l, arm) > 0,
                                       "Pr(Y=1|A,M,L)");
            const V vl = D::lift(pl);
            lo = lo + vmax(D::lift(T(0)), V(y + vm + vl - D::lift(T(2))));
            hi = hi + vmin(vmin(y, vm), vl);
        }
    }
    return {vmin(D::lift(T(1)), lo), vmin(D::lift(T(1)), hi)};
}

/// Pr{Y(b, L(b), M(a*, L(a*))) = 1}: Frechet on Pr{M = m | a*} and the g-formula
/// Pr{Y(b, m) = 1} = sum_l Pr(Y=1 | b, l, m) Pr(L=l | b).
template <class T, class V>
FrechetParts<T, V> tchetgen_cross(const ObservedDistII<T>& d, int outcome_arm, int mediator_arm) {
    using D = Domain<T, V>;
    const int b = outcome_arm;
    V lo = D::lift(T(0)), hi = D::lift(T(0));
    for (int m = 0; m < 2; ++m) {
        const T pm = prob_m(d, m, mediator_arm);
        V ym = D::lift(T(0));
        for (int l = 0; l < 2; ++l) {
            const T pl = prob_l(d, l, b);
            const V y = D::conditional(cond_y1_given_ml(d, m, l, b), pm > 0 && pl > 0,
                                       "Pr(Y=1|A,M,L)");
            ym = ym + y * D::lift(pl);
        }
        const V vm = D::lift(pm);
        lo = lo + vmax(D::lift(T(0)), V(vm + ym - D::lift(T(1))));
        hi = hi + vmin(vm, ym);
    }
    return {lo, hi};
}

/// NDE(a*) from bounds on the cross-world term: a* = 0 gives cross - Pr(Y=1|0),
/// a* = 1 gives Pr(Y=1|1) - cross.
template <class T, class V, Setting S>
Interval<T> nde_from_cross(const ObservedDist<T, S>& d, const FrechetParts<T, V>& c,
                           int mediator_arm) {
    using D = Domain<T, V>;
    V lo, hi;
    if (mediator_arm == 0) {
        const V p0 = D::lift(prob_y1(d, 0));
        lo = c.cross_lo - p0;
        hi = c.cross_hi - p0;
    } else {
        const V p1 = D::lift(prob_y1(d, 1));
        lo = p1 - c.cross_hi;
        hi = p1 - c.cross_lo;
    }
    if constexpr (std::is_same_v<V, T>) {
        return {lo, hi};
    } else {
        return {lo.lower, hi.upper};
    }
}

}  // namespace detail

/// Frechet bounds on NDE(arm) in setting I. Arm 0 is the printed construction; arm 1
/// exchanges the arms.
template <class T>
Interval<T> rr_frechet_nde1(const ObservedDistI<T>& d, int arm,
                            UndefinedPolicy policy = UndefinedPolicy::Throw) {
    check_arm(arm);
    if (policy == UndefinedPolicy::Throw)
        return detail::nde_from_cross<T, T>(d, detail::rr_cross<T, T>(d, arm), arm);
    return detail::nde_from_cross<T, Interval<T>>(d, detail::rr_cross<T, Interval<T>>(d, arm),
                                                  arm);
}

/// Frechet bounds on NDE(arm, arm, arm) in setting II, with the min{1, .} clamps applied
/// to each sum before subtracting the identified term.
template <class T>
Interval<T> frechet_nde000(const ObservedDistII<T>& d, int arm = 0,
                           UndefinedPolicy policy = UndefinedPolicy::Throw) {
    check_arm(arm);
    if (policy == UndefinedPolicy::Throw)
        return detail::nde_from_cross<T, T>(d, detail::nested_cross<T, T>(d, arm), arm);
    return detail::nde_from_cross<T, Interval<T>>(d, detail::nested_cross<T, Interval<T>>(d, arm),
                                                  arm);
}

/// Frechet bounds on NDE(a*) in setting II with L following the outcome arm.
/// `outcome_arm` feeds the Y and L terms, `mediator_arm` = a* the mediator term.
template <class T>
Interval<T> tchetgen_nde2(const ObservedDistII<T>& d, int outcome_arm, int mediator_arm,
                          UndefinedPolicy policy = UndefinedPolicy::Throw) {
    if (check_arm(outcome_arm) == check_arm(mediator_arm))
        throw UnsupportedEstimand("outcome arm and mediator arm must differ");
    if (policy == UndefinedPolicy::Throw)
        return detail::nde_from_cross<T, T>(
            d, detail::tchetgen_cross<T, T>(d, outcome_arm, mediator_arm), mediator_arm);
    return detail::nde_from_cross<T, Interval<T>>(
        d, detail::tchetgen_cross<T, Interval<T>>(d, outcome_arm, mediator_arm), mediator_arm);
}

// ---------------------------------------------------------------------------
// Dispatch

/// Which estimand a family bounds at a given arm.
inline Estimand family_estimand(BoundFamily f, int arm) {
    switch (f) {
        case BoundFamily::SJOLANDER_SDE: return Estimand::sde(Setting::I, arm);
        case BoundFamily::SJOLANDER_SIE: return Estimand::sie(Setting::I, arm);
        case BoundFamily::RR_FRECHET_NDE: return Estimand::nde_frechet(Setting::I, arm);
        case BoundFamily::GABRIEL_SDE: return Estimand::sde(Setting::II, arm);
        case BoundFamily::GABRIEL_SIE: return Estimand::sie(Setting::II, arm);
        case BoundFamily::FRECHET_NDE000: return Estimand::nde_frechet(Setting::II, arm);
        case BoundFamily::TCHETGEN_NDE: return Estimand::nde_tchetgen(arm);
    }
    throw UnsupportedEstimand("unknown family");
}

/// The family that bounds `e` (randomization-only for SDE/SIE, Frechet otherwise).
inline BoundFamily default_family(const Estimand& e) {
    const bool one = e.setting == Setting::I;
    switch (e.kind) {
        case EstimandKind::SDE: return one ? BoundFamily::SJOLANDER_SDE : BoundFamily::GABRIEL_SDE;
        case EstimandKind::SIE: return one ? BoundFamily::SJOLANDER_SIE : BoundFamily::GABRIEL_SIE;
        case EstimandKind::NDE_FRECHET:
            return one ? BoundFamily::RR_FRECHET_NDE : BoundFamily::FRECHET_NDE000;
        case EstimandKind::NDE_TCHETGEN: return BoundFamily::TCHETGEN_NDE;
        default: throw UnsupportedEstimand(label(e) + " has no closed-form bound family");
    }
}

/// Arm of the estimand bounded by family f (for Tchetgen, the mediator arm a*).
inline int family_arm(BoundFamily f, const Estimand& e) {
    return f == BoundFamily::TCHETGEN_NDE ? e.mediator_arm : e.arm;
}

inline Provenance family_provenance(BoundFamily f, int arm) {
    switch (f) {
        case BoundFamily::RR_FRECHET_NDE:
        case BoundFamily::FRECHET_NDE000:
        case BoundFamily::TCHETGEN_NDE:
            return arm == 0 ? Provenance::PaperForm : Provenance::ArmSymmetry;
        default: return Provenance::PaperForm;
    }
}

/// Evaluates family f at `arm` on a setting-matching distribution.
template <class T, Setting S>
Interval<T> closed_form_bounds(BoundFamily f, const ObservedDist<T, S>& d, int arm,
                               UndefinedPolicy policy = UndefinedPolicy::Throw) {
    if (setting_of(f) != S)
        throw DimensionMismatch(to_string(f) + " needs a setting " + to_string(setting_of(f)) +
                                " distribution");
    if constexpr (S == Setting::I) {
        switch (f) {
            case BoundFamily::SJOLANDER_SDE: return sde1_bounds(d, arm);
            case BoundFamily::SJOLANDER_SIE: return sie1_bounds(d, arm);
            default: return rr_frechet_nde1(d, arm, policy);
        }
    } else {
        switch (f) {
            case BoundFamily::GABRIEL_SDE: return gabriel_sde2_bounds(d, arm);
            case BoundFamily::GABRIEL_SIE: return gabriel_sie2_bounds(d, arm);
            case BoundFamily::FRECHET_NDE000: return frechet_nde000(d, arm, policy);
            default: return tchetgen_nde2(d, 1 - arm, arm, policy);
        }
    }
}

}  // namespace medbounds
