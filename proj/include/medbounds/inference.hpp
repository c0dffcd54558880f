#pragma once

// Percentile bootstrap for bound endpoints, resampling within each treatment arm.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "medbounds/closed_bounds.hpp"
#include "medbounds/errors.hpp"
#include "medbounds/observed.hpp"
#include "medbounds/rational.hpp"
#include "medbounds/rng.hpp"
#include "medbounds/types.hpp"

namespace medbounds {

inline constexpr std::size_t kDefaultReplicates = 2000;
inline constexpr double kDefaultAlpha = 0.05;
inline constexpr std::size_t kMinReplicates = 100;

struct CiReport {
    Setting setting = Setting::I;
    Estimand estimand;
    BoundFamily family = BoundFamily::SJOLANDER_SDE;
    int arm = 0;
    Interval<double> point;
    Interval<double> lower_ci;  // percentile interval for the lower endpoint
    Interval<double> upper_ci;
    std::size_t replicates = 0;
    std::size_t used = 0;
    std::size_t undefined = 0;  // replicates with an undefined conditional
    double alpha = kDefaultAlpha;
    std::uint64_t seed = 0;

    /// The point endpoint falls outside its own percentile interval (possible, not an error).
    bool point_outside() const {
        return !lower_ci.contains(point.lower) || !upper_ci.contains(point.upper);
    }
};

/// Type-7 sample quantile of sorted values.
inline double quantile_sorted(const std::vector<double>& v, double p) {
    if (v.empty()) return std::nan("");
    const double h = (static_cast<double>(v.size()) - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

namespace detail {

/// One stratified resample: n(arm) draws with replacement from each arm's empirical law.
inline CountTable resample(const CountTable& t, Rng& rng) {
    CountTable out;
    out.setting = t.setting;
    const int cells = t.num_cells();
    for (int a = 0; a < 2; ++a) {
        std::vector<std::uint64_t> cum;
        std::vector<int> idx;
        std::uint64_t run = 0;
        for (int i = a; i < cells; i += 2) {
            if (t.counts[i] == 0) continue;
            run += t.counts[i];
            cum.push_back(run);
            idx.push_back(i);
        }
        for (std::uint64_t k = 0; k < run; ++k) {
            const std::uint64_t u = rng.below(run);
            const auto j = std::upper_bound(cum.begin(), cum.end(), u) - cum.begin();
            ++out.counts[idx[j]];
        }
    }
    return out;
}

inline Interval<Rational> table_bounds(const CountTable& t, BoundFamily f, int arm) {
    if (t.setting == Setting::I) return closed_form_bounds(f, dist_from_counts<Setting::I>(t), arm);
    return closed_form_bounds(f, dist_from_counts<Setting::II>(t), arm);
}

}  // namespace detail

/// Stratified percentile bootstrap of both endpoints of family f's interval for `e`.
inline CiReport bootstrap_ci(const CountTable& table, BoundFamily family, const Estimand& e,
                             std::size_t replicates = kDefaultReplicates,
                             double alpha = kDefaultAlpha, std::uint64_t seed = 0) {
    if (replicates < kMinReplicates)
        throw std::invalid_argument("bootstrap needs at least 100 replicates");
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (setting_of(family) != table.setting)
        throw DimensionMismatch(to_string(family) + " does not apply to this count table");
    table.validate();

    CiReport rep;
    rep.setting = table.setting;
    rep.estimand = e;
    rep.family = family;
    rep.arm = family_arm(family, e);
    rep.replicates = replicates;
    rep.alpha = alpha;
    rep.seed = seed;
    rep.point = interval_cast<double>(detail::table_bounds(table, family, rep.arm));

    Rng rng(seed);
    std::vector<double> lows, highs;
    lows.reserve(replicates);
    highs.reserve(replicates);
    for (std::size_t b = 0; b < replicates; ++b) {
        const CountTable t = detail::resample(table, rng);
        try {
            const auto iv = detail::table_bounds(t, family, rep.arm);
            lows.push_back(to_double(iv.lower));
            highs.push_back(to_double(iv.upper));
        } catch (const UndefinedConditional&) {
            ++rep.undefined;
        }
    }
    rep.used = lows.size();
    std::sort(lows.begin(), lows.end());
    std::sort(highs.begin(), highs.end());
    rep.lower_ci = {quantile_sorted(lows, alpha / 2), quantile_sorted(lows, 1 - alpha / 2)};
    rep.upper_ci = {quantile_sorted(highs, alpha / 2), quantile_sorted(highs, 1 - alpha / 2)};
    return rep;
}

inline nlohmann::ordered_json to_json(const CiReport& r) {
    auto num = [](double x) { return round_sig12(x); };
    nlohmann::ordered_json j;
    j["schema_version"] = "1";
    j["setting"] = r.setting == Setting::I ? 1 : 2;
    j["estimand"] = label(r.estimand);
    j["family"] = to_string(r.family);
    j["point"] = {{"lower", num(r.point.lower)}, {"upper", num(r.point.upper)}};
    j["ci"] = {{"lower", {num(r.lower_ci.lower), num(r.lower_ci.upper)}},
               {"upper", {num(r.upper_ci.lower), num(r.upper_ci.upper)}}};
    j["replicates"] = r.replicates;
    j["used"] = r.used;
    j["undefined"] = r.undefined;
    j["alpha"] = num(r.alpha);
    j["seed"] = r.seed;
    j["generator"] = Rng::kName;
    j["point_outside_ci"] = r.point_outside();
    return j;
}

}  // namespace medbounds
