#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>

#include "medbounds/errors.hpp"
#include "medbounds/rational.hpp"

namespace medbounds {

/// I: A -> M -> Y with M-Y confounding. II: adds a treatment-affected L confounding M and Y.
enum class Setting : int { I = 1, II = 2 };

inline std::string to_string(Setting s) { return s == Setting::I ? "1" : "2"; }

inline Setting parse_setting(int s) {
    if (s == 1) return Setting::I;
    if (s == 2) return Setting::II;
    throw std::invalid_argument("setting must be 1 or 2");
}

inline int check_arm(int arm) {
    if (arm != 0 && arm != 1) throw std::invalid_argument("arm must be 0 or 1");
    return arm;
}

enum class EstimandKind {
    SDE,
    SIE,
    TE,
    NDE_FRECHET,
    NDE_TCHETGEN,
    MEDIATION_POINT_NDE,
    MEDIATION_POINT_NIE,
};

/// A target effect. `arm` is the a in SDE(a), SIE(a), NDE(a). For NDE_TCHETGEN,
/// `mediator_arm` is the arm a* whose mediator law enters the cross-world term and `arm`
/// is the opposite arm feeding the outcome terms; the effect reported is NDE(a*).
struct Estimand {
    EstimandKind kind = EstimandKind::SDE;
    int arm = 0;
    Setting setting = Setting::I;
    int mediator_arm = -1;

    static Estimand sde(Setting s, int arm) { return {EstimandKind::SDE, check_arm(arm), s}; }
    static Estimand sie(Setting s, int arm) { return {EstimandKind::SIE, check_arm(arm), s}; }
    static Estimand te(Setting s) { return {EstimandKind::TE, 0, s}; }
    static Estimand nde_frechet(Setting s, int arm) {
        return {EstimandKind::NDE_FRECHET, check_arm(arm), s};
    }
    static Estimand nde_tchetgen(int outcome_arm, int mediator_arm) {
        if (check_arm(outcome_arm) == check_arm(mediator_arm))
            throw std::invalid_argument("outcome arm and mediator arm must differ");
        return {EstimandKind::NDE_TCHETGEN, outcome_arm, Setting::II, mediator_arm};
    }
    static Estimand nde_tchetgen(int mediator_arm) {
        return nde_tchetgen(1 - check_arm(mediator_arm), mediator_arm);
    }
    static Estimand point_nde(Setting s, int arm) {
        return {EstimandKind::MEDIATION_POINT_NDE, check_arm(arm), s};
    }
    static Estimand point_nie(Setting s, int arm) {
        return {EstimandKind::MEDIATION_POINT_NIE, check_arm(arm), s};
    }

    bool randomization_only() const {
        return kind == EstimandKind::SDE || kind == EstimandKind::SIE || kind == EstimandKind::TE;
    }

    friend bool operator==(const Estimand&, const Estimand&) = default;
};

/// Human-readable label: SDE(1), NDE(0,0,0), ...
inline std::string label(const Estimand& e) {
    const std::string a = std::to_string(e.arm);
    switch (e.kind) {
        case EstimandKind::SDE: return "SDE(" + a + ")";
        case EstimandKind::SIE: return "SIE(" + a + ")";
        case EstimandKind::TE: return "TE";
        case EstimandKind::NDE_FRECHET:
        case EstimandKind::MEDIATION_POINT_NDE:
            return e.setting == Setting::I ? "NDE(" + a + ")" : "NDE(" + a + "," + a + "," + a + ")";
        case EstimandKind::MEDIATION_POINT_NIE:
            return e.setting == Setting::I ? "NIE(" + a + ")" : "NIE(" + a + "," + a + "," + a + ")";
        case EstimandKind::NDE_TCHETGEN:
            return "NDE(" + std::to_string(e.mediator_arm) + ")";
    }
    return "?";
}

/// Closed-form bound families.
enum class BoundFamily {
    SJOLANDER_SDE,
    SJOLANDER_SIE,
    RR_FRECHET_NDE,
    GABRIEL_SDE,
    GABRIEL_SIE,
    FRECHET_NDE000,
    TCHETGEN_NDE,
};

inline Setting setting_of(BoundFamily f) {
    switch (f) {
        case BoundFamily::SJOLANDER_SDE:
        case BoundFamily::SJOLANDER_SIE:
        case BoundFamily::RR_FRECHET_NDE: return Setting::I;
        default: return Setting::II;
    }
}

inline std::string to_string(BoundFamily f) {
    switch (f) {
        case BoundFamily::SJOLANDER_SDE: return "SJOLANDER_SDE";
        case BoundFamily::SJOLANDER_SIE: return "SJOLANDER_SIE";
        case BoundFamily::RR_FRECHET_NDE: return "RR_FRECHET_NDE";
        case BoundFamily::GABRIEL_SDE: return "GABRIEL_SDE";
        case BoundFamily::GABRIEL_SIE: return "GABRIEL_SIE";
        case BoundFamily::FRECHET_NDE000: return "FRECHET_NDE000";
        case BoundFamily::TCHETGEN_NDE: return "TCHETGEN_NDE";
    }
    return "?";
}

inline BoundFamily parse_family(const std::string& s) {
    for (auto f : {BoundFamily::SJOLANDER_SDE, BoundFamily::SJOLANDER_SIE,
                   BoundFamily::RR_FRECHET_NDE, BoundFamily::GABRIEL_SDE, BoundFamily::GABRIEL_SIE,
                   BoundFamily::FRECHET_NDE000, BoundFamily::TCHETGEN_NDE})
        if (to_string(f) == s) return f;
    throw std::invalid_argument("unknown bound family: " + s);
}

/// Closed interval [lower, upper] for a partially identified quantity.
template <class T>
struct Interval {
    T lower{};
    T upper{};

    T width() const { return T(upper - lower); }

    bool contains(const T& x, const T& tol = tolerance<T>()) const {
        return lower <= x + tol && x <= upper + tol;
    }
    bool contains(const Interval& other, const T& tol = tolerance<T>()) const {
        return lower <= other.lower + tol && other.upper <= upper + tol;
    }
    bool valid(const T& tol = tolerance<T>()) const { return lower <= upper + tol; }

    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lower == b.lower && a.upper == b.upper;
    }
};

template <class To, class From>
Interval<To> interval_cast(const Interval<From>& i) {
    return {scalar_cast<To>(i.lower), scalar_cast<To>(i.upper)};
}

/// [max(lowers), min(uppers)]; throws EmptyIntersection when the result is empty beyond 1e-12.
template <class T>
Interval<T> intersect(const Interval<T>& a, const Interval<T>& b) {
    Interval<T> out{a.lower < b.lower ? b.lower : a.lower, a.upper < b.upper ? a.upper : b.upper};
    const T slack = is_exact_v<T> ? T(0) : T(1e-12);
    if (out.upper + slack < out.lower)
        throw EmptyIntersection("intervals do not overlap: incompatible assumptions or data error");
    return out;
}

// Interval arithmetic, used to propagate undefined conditionals as [0, 1].
template <class T>
Interval<T> operator+(const Interval<T>& a, const Interval<T>& b) {
    return {T(a.lower + b.lower), T(a.upper + b.upper)};
}
template <class T>
Interval<T> operator-(const Interval<T>& a, const Interval<T>& b) {
    return {T(a.lower - b.upper), T(a.upper - b.lower)};
}
template <class T>
Interval<T> operator*(const Interval<T>& a, const Interval<T>& b) {
    T p[4] = {T(a.lower * b.lower), T(a.lower * b.upper), T(a.upper * b.lower),
              T(a.upper * b.upper)};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

}  // namespace medbounds
