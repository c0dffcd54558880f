#pragma once

// Reference term lists for the randomization-only bounds, transcribed term by term from
// their typeset form (including its misprints) so derived bounds can be audited against
// them. closed_bounds.hpp holds the corrected forms used for evaluation.

#include <string_view>
#include <vector>

#include "medbounds/linear_expr.hpp"
#include "medbounds/types.hpp"

namespace medbounds {

struct ReferenceTerms {
    Estimand estimand;
    std::vector<std::string_view> lower;
    std::vector<std::string_view> upper;
};

/// The eight reference displays: setting I then II, each SDE(1), SDE(0), SIE(1), SIE(0).
inline const std::vector<ReferenceTerms>& reference_term_lists() {
    using S = Setting;
    static const std::vector<ReferenceTerms> lists = {
        {Estimand::sde(S::I, 1),
         {"-2*p00_1 + p01_0 - p01_1 - p10_1", "-1 + p00_0 - p01_1 + p10_1", "-p00_1 - p01_1"},
         {"p00_0 + p01_0 - p01_1 + p10_0 + p10_1", "1 - p00_1 - p01_1",
          "2 - 2*p00_1 - p01_1 - p10_0 - p10_1"}},
        {Estimand::sde(S::I, 0),
         {"-p00_1 + p01_0 - p01_1 - p10_0 - p10_1", "-2 + 2*p00_0 + p01_0 + p10_0 + p10_1",
          "-1 + p00_0 - p01_0"},
         {"2*p00_0 + p01_0 - p01_1 + p10_0", "p00_0 - p01_0", "1 - p00_1 + p01_0 - p10_0"}},
        {Estimand::sie(S::I, 1),
         {"-p00_1 - p01_1", "-p00_0 - p00_1 - p10_0", "-1 + p00_0 - p01_1 + p10_0"},
         {"2 - p00_0 - p00_1 - p01_1 - p10_0 - p10_1", "1 - p00_1 - p01_1",
          "p00_0 + p10_0 + p10_1"}},
        {Estimand::sie(S::I, 0),
         {"-p00_1 - p10_0 - p10_1", "-2 + 2*p00_0 + p00_1 + p01_0 + p10_0 + p10_1",
          "-1 + p00_0 + p01_0"},
         {"1 - p00_1 + p01_0 - p10_1", "p00_0 + p01_0", "p00_0 + p00_1 + p10_1"}},

        {Estimand::sde(S::II, 1),
         {"-2*p000_1 - 2*p010_1 - p100_1 - p110_1 - 2*p001_1 + p011_0 - p011_1 - p101_1",
          "-1 - p000_1 - p010_1 + p001_0 - p011_1 + p101_1",
          "-1 - p000_1 + p010_0 + p110_1 - p001_1 - p011_1",
          "-1 + p000_0 - p010_1 + p100_1 - p001_1 - p011_1",
          "-p000_1 - p010_1 - p001_1 - p011_1"},
         {"2 - p000_1 - 2*p010_1 - p110_0 - p110_1 - p001_1 - p011_1",
          "2 - p000_1 - p010_1 - 2*p001_1 - p011_1 - p101_0 - p101_1",
          "p000_0 + p010_0 + p100_0 + p100_1 + p110_0 + p110_1 + p001_0 + p011_0 - p011_1 + "
          "p101_0 + p101_1",
          "1 - p000_1 - p010_1 - p001_1 - p011_1",
          "2 - 2*p000_1 - p010_1 - p100_0 - p100_1 - p001_1 - p011_1"}},
        {Estimand::sde(S::II, 0),
         {"-p000_1 - p010_1 - p100_0 - p100_1 - p110_0 - p110_1 - p001_1 + p011_0 - p011_1 - "
          "p101_0 - p101_1",
          "-2 + p000_0 + p010_0 + 2*p001_0 + p011_0 + p101_0 + p101_1",
          "-2 + p000_0 + 2*p010_0 + p110_0 + p110_1 + p001_0 + p011_0",
          // typeset as "2_{010}": a missing symbol letter, read as 2*p010_0
          "-2 + 2*p000_0 + 2*p010_0 + p100_0 + p100_1 + p001_0 + p011_0",
          "-1 + p000_0 + 2*p010_0 + p001_0 + p011_0"},
         {"1 + p000_0 - p010_1 - p110_0 - p001_0 + p011_0",
          "1 + p000_0 + p010_0 - p001_1 - p011_0 - p101_0",
          "2*p000_0 + 2*p010_0 + p100_0 + p110_0 + 2*p001_0 + p011_0 - p011_1 + p101_0",
          "p000_0 + p010_0 + p001_0 + p011_0",
          "1 - p000_1 + p010_0 - p100_0 + p001_0 + p011_0"}},
        {Estimand::sie(S::II, 1),
         {"-p000_1 - p001_1 - p010_1 - p011_1",
          "-p000_0 - p000_1 - p001_0 - p001_1 - p010_0 - p010_1 - p100_0 - p101_0 - p110_0",
          "-1 - p000_1 - p001_1 + p010_0 - p011_1 + p110_0",
          "-1 - p000_1 + p001_0 - p010_1 - p011_1 + p101_0",
          "-1 + p000_0 - p001_1 - p010_1 - p011_1 + p100_0"},
         {"2 - p000_0 - p000_1 - p001_1 - p010_1 - p011_1 - p100_0 - p100_1",
          "1 - p000_1 - p001_1 - p010_1 - p011_1",
          "2 - p000_1 - p001_0 - p001_1 - p010_1 - p011_1 - p101_0 - p101_1",
          "2 - p000_1 - p001_1 - p010_0 - p010_1 - p011_1 - p110_0 - p110_1",
          "p000_0 + p001_0 + p010_0 + p100_0 + p100_1 + p101_0 + p101_1 + p110_0 + p110_1"}},
        {Estimand::sie(S::II, 0),
         {"-p000_1 - p001_1 - p010_1 - p100_0 - p100_1 - p101_0 - p101_1 - p110_0 - p110_1",
          "-2 + p000_0 + p001_0 + p010_0 + p010_1 + p011_0 + p110_0 + p110_1",
          "-2 + p000_0 + p001_0 + p001_1 + p010_0 + p011_0 + p101_0 + p101_1",
          "-2 + p000_0 + p000_1 + p001_0 + p010_0 + p011_0 + p100_0 + p100_1",
          "-1 + p000_0 + p001_0 + p010_0 + p011_0"},
         {"1 - p000_1 + p001_0 + p010_0 + p011_0 - p100_1",
          "p000_0 + p001_0 + p010_0 + p011_0",
          "1 + p000_0 - p001_1 + p010_0 + p011_0 - p101_1",
          "1 + p000_0 + p001_0 - p010_1 + p011_0 - p110_1",
          "p000_0 + p000_1 + p001_0 + p001_1 + p010_0 + p010_1 + p100_1 + p101_1 + p110_1"}},
    };
    return lists;
}

template <Setting S>
BoundExpr<S> reference_bound_expr(const ReferenceTerms& r) {
    BoundExpr<S> b;
    b.estimand = label(r.estimand);
    for (auto t : r.lower) b.lower.push_back(parse_linear_expr<S>(t));
    for (auto t : r.upper) b.upper.push_back(parse_linear_expr<S>(t));
    return b;
}

}  // namespace medbounds
