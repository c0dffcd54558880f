#pragma once

// Canonical response-function catalog. A combo is one deterministic function per variable;
// a probability vector over combos is a structural model with arbitrary confounding.
//
// Bit layout of the component functions:
//   setting I:  M-type bit a,            Y-type bit (a*2 + m)
//   setting II: L-type bit a, M-type bit (a*2 + l), Y-type bit ((a*2 + l)*2 + m)
// Combo index: setting I fM*16 + fY; setting II (fL*16 + fM)*256 + fY.

#include <cstdint>
#include <string>

#include "medbounds/errors.hpp"
#include "medbounds/observed.hpp"
#include "medbounds/types.hpp"

namespace medbounds {

struct Combo {
    int fl = 0;
    int fm = 0;
    int fy = 0;
};

/// Treatment components set by a split intervention. `al` is ignored in setting I.
struct Intervention {
    int ay = 0;
    int am = 0;
    int al = 0;
};

/// Which treatment component drives L in setting II.
enum class LDriver {
    Mediator,  ///< L follows A^M
    Outcome,   ///< L follows A^Y
};

template <Setting S>
struct ResponseTypes {
    static constexpr int num_l_types = S == Setting::I ? 1 : 4;
    static constexpr int num_m_types = S == Setting::I ? 4 : 16;
    static constexpr int num_y_types = S == Setting::I ? 16 : 256;
    static constexpr int num_combos = num_l_types * num_m_types * num_y_types;

    static constexpr Combo decode(int idx) {
        Combo c;
        c.fy = idx % num_y_types;
        idx /= num_y_types;
        c.fm = idx % num_m_types;
        c.fl = idx / num_m_types;
        return c;
    }

    static constexpr int encode(const Combo& c) {
        return (c.fl * num_m_types + c.fm) * num_y_types + c.fy;
    }

    static constexpr int bit(int f, int i) { return (f >> i) & 1; }

    static constexpr int l_of(const Combo& c, int a) {
        if constexpr (S == Setting::I) {
            return 0;
        } else {
            return bit(c.fl, a);
        }
    }
    static constexpr int m_of(const Combo& c, int a, int l) {
        if constexpr (S == Setting::I) {
            return bit(c.fm, a);
        } else {
            return bit(c.fm, a * 2 + l);
        }
    }
    static constexpr int y_of(const Combo& c, int a, int l, int m) {
        if constexpr (S == Setting::I) {
            return bit(c.fy, a * 2 + m);
        } else {
            return bit(c.fy, (a * 2 + l) * 2 + m);
        }
    }

    /// Nested counterfactual Y(a_y, L(a_l1), M(a_m, L(a_l2))).
    static constexpr int nested(const Combo& c, int a_y, int a_l1, int a_m, int a_l2) {
        const int l1 = l_of(c, a_l1);
        const int l2 = l_of(c, a_l2);
        const int m = m_of(c, a_m, l2);
        return y_of(c, a_y, l1, m);
    }

    /// Y under the split intervention; L is set by its own component `al`.
    static constexpr int outcome(const Combo& c, const Intervention& iv) {
        return nested(c, iv.ay, iv.al, iv.am, iv.al);
    }

    /// Observed cell (flat index) this combo produces in arm a.
    static constexpr int observed_cell(const Combo& c, int a) {
        const int l = l_of(c, a);
        const int m = m_of(c, a, l);
        const int y = y_of(c, a, l, m);
        if constexpr (S == Setting::I) {
            return cell_index(y, m, a);
        } else {
            return cell_index(y, m, l, a);
        }
    }
    static constexpr int observed_cell(int idx, int a) { return observed_cell(decode(idx), a); }
};

/// The two interventions whose outcome contrast defines a randomization-only estimand.
struct Contrast {
    Intervention first;
    Intervention second;
};

inline Contrast contrast_of(const Estimand& e, LDriver driver = LDriver::Mediator) {
    auto iv = [&](int ay, int am) {
        return Intervention{ay, am, driver == LDriver::Mediator ? am : ay};
    };
    switch (e.kind) {
        case EstimandKind::SDE: return {iv(1, e.arm), iv(0, e.arm)};
        case EstimandKind::SIE: return {iv(e.arm, 1), iv(e.arm, 0)};
        case EstimandKind::TE: return {iv(1, 1), iv(0, 0)};
        default:
            throw UnsupportedEstimand(label(e) +
                                      " is not a randomization-only estimand; use coupling_bounds");
    }
}

/// Objective entry c[combo] in {-1, 0, 1}.
template <Setting S>
int contrast_value(int combo, const Contrast& k) {
    const Combo c = ResponseTypes<S>::decode(combo);
    return ResponseTypes<S>::outcome(c, k.first) - ResponseTypes<S>::outcome(c, k.second);
}

}  // namespace medbounds
