#pragma once

// Monte Carlo suites: validity against sampled models, sharpness via LP witnesses,
// containment of the setting-I Frechet interval, closed-form / symbolic / LP agreement,
// the degenerate-L reduction and the Frechet-vs-Gabriel scatter experiment.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "medbounds/closed_bounds.hpp"
#include "medbounds/coupling.hpp"
#include "medbounds/observed.hpp"
#include "medbounds/polytope_lp.hpp"
#include "medbounds/rational.hpp"
#include "medbounds/rng.hpp"
#include "medbounds/scm.hpp"
#include "medbounds/types.hpp"

namespace medbounds {

inline constexpr double kValidityTol = 1e-9;
inline constexpr double kContainmentSlack = 1e-12;
inline constexpr int kCouplingsPerDist = 10;

struct ExperimentRecord {
    std::uint64_t seed = 0;
    std::string family;
    double lower = 0, upper = 0, truth = 0;
    bool contained = true;
};

struct Violation {
    std::uint64_t seed = 0;
    std::string check;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    Setting setting = Setting::I;
    std::string generator = Rng::kName;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::size_t checks = 0;
    std::size_t skipped = 0;
    std::vector<Violation> violations;
    std::vector<ExperimentRecord> records;

    bool ok() const { return violations.empty(); }

    void check(bool pass, std::uint64_t s, std::string what, std::string detail = {}) {
        ++checks;
        if (!pass) violations.push_back({s, std::move(what), std::move(detail)});
    }

    void merge(SuiteReport other) {
        checks += other.checks;
        skipped += other.skipped;
        for (auto& v : other.violations) violations.push_back(std::move(v));
        for (auto& r : other.records) records.push_back(std::move(r));
    }
};

inline void write_summary(std::ostream& out, const SuiteReport& r) {
    out << r.suite << " setting=" << to_string(r.setting) << " n=" << r.n
        << " generator=" << r.generator << " seed=" << r.seed << " checks=" << r.checks
        << " skipped=" << r.skipped << " violations=" << r.violations.size() << '\n';
    for (const auto& v : r.violations)
        out << "  violation seed=" << v.seed << ' ' << v.check
            << (v.detail.empty() ? "" : ": " + v.detail) << '\n';
}

inline void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& recs) {
    out << "seed,family,lower,upper,truth,contained\n";
    for (const auto& r : recs)
        out << r.seed << ',' << r.family << ',' << format_sig12(r.lower) << ','
            << format_sig12(r.upper) << ',' << format_sig12(r.truth) << ','
            << (r.contained ? 1 : 0) << '\n';
}

namespace detail {

template <class T>
std::string show(const Interval<T>& iv) {
    std::ostringstream os;
    os << '[' << format_sig12(to_double(iv.lower)) << ", " << format_sig12(to_double(iv.upper))
       << ']';
    return os.str();
}

inline bool within(const Interval<double>& iv, double x, double tol) {
    return x >= iv.lower - tol && x <= iv.upper + tol;
}

inline std::vector<Estimand> randomization_estimands(Setting s) {
    return {Estimand::sde(s, 0), Estimand::sde(s, 1), Estimand::sie(s, 0), Estimand::sie(s, 1)};
}

template <Setting S>
ObservedDist<Rational, S> random_dist(std::uint64_t seed) {
    if constexpr (S == Setting::I) {
        return random_dist1(seed);
    } else {
        return random_dist2(seed);
    }
}

template <Setting S>
const ConstraintSystem<S>& cached_system(const Estimand& e) {
    static std::map<std::pair<int, int>, ConstraintSystem<S>> cache;
    const auto key = std::make_pair(static_cast<int>(e.kind), e.arm);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_system<S>(e)).first;
    return it->second;
}

/// Frechet-type families evaluated on a distribution, with the estimand each one bounds.
template <Setting S>
std::vector<std::pair<BoundFamily, Estimand>> frechet_families() {
    if constexpr (S == Setting::I) {
        return {{BoundFamily::RR_FRECHET_NDE, Estimand::nde_frechet(S, 0)},
                {BoundFamily::RR_FRECHET_NDE, Estimand::nde_frechet(S, 1)}};
    } else {
        return {{BoundFamily::FRECHET_NDE000, Estimand::nde_frechet(S, 0)},
                {BoundFamily::FRECHET_NDE000, Estimand::nde_frechet(S, 1)},
                {BoundFamily::TCHETGEN_NDE, Estimand::nde_tchetgen(0)},
                {BoundFamily::TCHETGEN_NDE, Estimand::nde_tchetgen(1)}};
    }
}

template <Setting S>
SuiteReport validity_scms(std::size_t n, std::uint64_t seed) {
    SuiteReport rep;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t s = seed + i;
        const auto scm = sample_scm<S>(s);
        const auto d = observed_of(scm);
        for (const auto& e : randomization_estimands(S)) {
            const BoundFamily f = default_family(e);
            const auto iv = closed_form_bounds(f, d, e.arm);
            const double truth = true_effect(scm, e);
            const bool in = within(iv, truth, kValidityTol);
            rep.check(in, s, "confounded " + label(e),
                      "truth " + format_sig12(truth) + " outside " + show(iv));
            rep.records.push_back({s, to_string(f), iv.lower, iv.upper, truth, in});
        }
    }
    return rep;
}

template <Setting S>
SuiteReport validity_couplings(std::size_t n, std::uint64_t seed) {
    SuiteReport rep;
    std::optional<ObservedDist<Rational, S>> d;
    std::vector<std::pair<Interval<Rational>, Interval<Rational>>> cached;  // formula, coupling
    const auto families = frechet_families<S>();
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t s = seed + i;
        if (i % kCouplingsPerDist == 0) {
            d = random_dist<S>(seed + i / kCouplingsPerDist);
            cached.clear();
            try {
                for (const auto& [f, e] : families) {
                    auto formula = closed_form_bounds(f, *d, family_arm(f, e));
                    auto sharp = coupling_bounds(*d, e);
                    rep.check(sharp.lower >= formula.lower && sharp.upper <= formula.upper, s,
                              "coupling range inside " + to_string(f),
                              show(sharp) + " vs " + show(formula));
                    cached.emplace_back(formula, sharp);
                }
            } catch (const UndefinedConditional&) {
                cached.clear();
            }
        }
        if (cached.empty()) {
            ++rep.skipped;
            continue;
        }
        const auto scm = sample_coupling(*d, s);
        rep.check(observed_of(scm) == *d, s, "coupling reproduces the distribution");
        for (std::size_t k = 0; k < families.size(); ++k) {
            const auto& [f, e] = families[k];
            const Rational truth = true_effect(scm, e);
            const bool in = cached[k].first.contains(truth) && cached[k].second.contains(truth);
            rep.check(in, s, "coupling " + label(e) + " " + to_string(f),
                      "truth " + to_string(truth) + " outside " + show(cached[k].first));
            rep.records.push_back({s, to_string(f), to_double(cached[k].first.lower),
                                   to_double(cached[k].first.upper), to_double(truth), in});
        }
    }
    return rep;
}

template <Setting S>
SuiteReport sharpness(std::size_t n, std::uint64_t seed) {
    SuiteReport rep;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t s = seed + i;
        const auto d = random_dist<S>(s);
        for (const auto& e : randomization_estimands(S)) {
            const auto lp = numeric_bounds(cached_system<S>(e), d);
            const auto closed = closed_form_bounds(default_family(e), d, e.arm);
            rep.check(lp.interval == closed, s, "LP equals closed form " + label(e),
                      show(lp.interval) + " vs " + show(closed));
            for (const auto* w : {&lp.lower_witness, &lp.upper_witness}) {
                const Rational& target = w == &lp.lower_witness ? closed.lower : closed.upper;
                rep.check(observed_of(*w) == d, s, "witness reproduces the distribution " + label(e));
                const Rational attained = true_effect(*w, e);
                rep.check(attained == target, s, "witness attains endpoint " + label(e),
                          to_string(attained) + " vs " + to_string(target));
            }
        }
    }
    return rep;
}

}  // namespace detail

/// True SDE/SIE of confounded models inside the randomization-only intervals, and true
/// NDE of random marginal-matching couplings inside the Frechet/Tchetgen intervals.
inline SuiteReport validity_suite(Setting setting, std::size_t n, std::uint64_t seed) {
    SuiteReport rep;
    if (setting == Setting::I) {
        rep = detail::validity_scms<Setting::I>(n, seed);
        rep.merge(detail::validity_couplings<Setting::I>(n, seed));
    } else {
        rep = detail::validity_scms<Setting::II>(n, seed);
        rep.merge(detail::validity_couplings<Setting::II>(n, seed));
    }
    rep.suite = "validity";
    rep.setting = setting;
    rep.seed = seed;
    rep.n = n;
    return rep;
}

/// LP witnesses at both endpoints reproduce the data and attain the closed-form endpoint.
inline SuiteReport sharpness_suite(Setting setting, std::size_t n, std::uint64_t seed) {
    SuiteReport rep = setting == Setting::I ? detail::sharpness<Setting::I>(n, seed)
                                            : detail::sharpness<Setting::II>(n, seed);
    rep.suite = "sharpness";
    rep.setting = setting;
    rep.seed = seed;
    rep.n = n;
    return rep;
}

/// Setting I: Sjolander SDE(a) contains R&R NDE(a) for both arms, with slack 1e-12.
/// Setting II: the sharp coupling range lies inside each Frechet-type formula.
inline SuiteReport containment_suite(Setting setting, std::size_t n, std::uint64_t seed) {
    SuiteReport rep;
    if (setting == Setting::I) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t s = seed + i;
            const auto d = random_dist1(s);
            for (int a = 0; a < 2; ++a) {
                const auto sj = sde1_bounds(d, a);
                const auto rr = rr_frechet_nde1(d, a);
                const double lo_slack = to_double(Rational(rr.lower - sj.lower));
                const double hi_slack = to_double(Rational(sj.upper - rr.upper));
                rep.check(lo_slack >= -kContainmentSlack && hi_slack >= -kContainmentSlack, s,
                          "SJOLANDER_SDE contains RR_FRECHET_NDE arm " + std::to_string(a),
                          detail::show(sj) + " vs " + detail::show(rr));
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t s = seed + i;
            const auto d = random_dist2(s);
            try {
                for (const auto& [f, e] : detail::frechet_families<Setting::II>()) {
                    const auto formula = closed_form_bounds(f, d, family_arm(f, e));
                    const auto sharp = coupling_bounds(d, e);
                    rep.check(sharp.lower >= formula.lower && sharp.upper <= formula.upper, s,
                              "coupling range inside " + to_string(f) + " " + label(e),
                              detail::show(sharp) + " vs " + detail::show(formula));
                }
            } catch (const UndefinedConditional&) {
                ++rep.skipped;
            }
        }
    }
    rep.suite = "containment";
    rep.setting = setting;
    rep.seed = seed;
    rep.n = n;
    return rep;
}

/// Closed form, symbolic expression and numeric LP agree exactly on random distributions.
template <Setting S>
SuiteReport equivalence_suite(std::size_t n, std::uint64_t seed) {
    SuiteReport rep;
    std::vector<std::pair<Estimand, BoundExpr<S>>> derived;
    for (const auto& e : detail::randomization_estimands(S))
        derived.emplace_back(e, symbolic_bounds(detail::cached_system<S>(e)));
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t s = seed + i;
        const auto d = detail::random_dist<S>(s);
        for (const auto& [e, expr] : derived) {
            const auto closed = closed_form_bounds(default_family(e), d, e.arm);
            const auto symbolic = expr.evaluate(d);
            const auto lp = numeric_bounds(detail::cached_system<S>(e), d).interval;
            rep.check(closed == symbolic && symbolic == lp, s, "closed = symbolic = LP " + label(e),
                      detail::show(closed) + " / " + detail::show(symbolic) + " / " +
                          detail::show(lp));
        }
    }
    rep.suite = "equivalence";
    rep.setting = S;
    rep.seed = seed;
    rep.n = n;
    return rep;
}

/// With L degenerate, setting-II bounds coincide with setting-I bounds on the L-marginal.
inline SuiteReport reduction_suite(std::size_t n, std::uint64_t seed, double tol = 1e-12) {
    SuiteReport rep;
    auto close = [tol](const Interval<Rational>& x, const Interval<Rational>& y) {
        return std::abs(to_double(Rational(x.lower - y.lower))) <= tol &&
               std::abs(to_double(Rational(x.upper - y.upper))) <= tol;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t s = seed + i;
        const auto d2 = random_dist2(s, true);
        const auto d1 = marginalize_L(d2);
        for (int a = 0; a < 2; ++a) {
            const auto g = gabriel_sde2_bounds(d2, a), sj = sde1_bounds(d1, a);
            rep.check(close(g, sj), s, "GABRIEL_SDE = SJOLANDER_SDE arm " + std::to_string(a),
                      detail::show(g) + " vs " + detail::show(sj));
            const auto gi = gabriel_sie2_bounds(d2, a), si = sie1_bounds(d1, a);
            rep.check(close(gi, si), s, "GABRIEL_SIE = SJOLANDER_SIE arm " + std::to_string(a),
                      detail::show(gi) + " vs " + detail::show(si));
            const auto t = tchetgen_nde2(d2, 1 - a, a);
            const auto rr = rr_frechet_nde1(d1, a);
            rep.check(close(t, rr), s, "TCHETGEN_NDE = RR_FRECHET_NDE arm " + std::to_string(a),
                      detail::show(t) + " vs " + detail::show(rr));
        }
    }
    rep.suite = "reduction";
    rep.setting = Setting::II;
    rep.seed = seed;
    rep.n = n;
    return rep;
}

// ---------------------------------------------------------------------------
// Frechet vs Gabriel scatter

struct ScatterRecord {
    std::uint64_t seed = 0;
    Interval<Rational> frechet, gabriel;
    Rational truth;
};

struct ScatterResult {
    std::uint64_t seed = 0;
    std::vector<ScatterRecord> records;
    std::size_t skipped = 0;
    // orderings of the Frechet endpoint relative to the Gabriel one
    std::size_t lower_below = 0, lower_above = 0, lower_tied = 0;
    std::size_t upper_below = 0, upper_above = 0, upper_tied = 0;
    std::size_t empty_intersections = 0, truth_outside = 0;

    bool both_orderings() const {
        return lower_below > 0 && lower_above > 0 && upper_below > 0 && upper_above > 0;
    }
};

/// frechet_nde000 and gabriel_sde2_bounds(., 0) on random setting-II distributions, with the
/// NDE(0,0,0) of the independent-bit model generating each distribution.
inline ScatterResult scatter_experiment(std::size_t n, std::uint64_t seed) {
    ScatterResult res;
    res.seed = seed;
    const Estimand nde = Estimand::nde_frechet(Setting::II, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t s = seed + i;
        const auto d = random_dist2(s);
        ScatterRecord r;
        r.seed = s;
        try {
            r.frechet = frechet_nde000(d, 0);
        } catch (const UndefinedConditional&) {
            ++res.skipped;
            continue;
        }
        r.gabriel = gabriel_sde2_bounds(d, 0);
        r.truth = product_law_effect(d, nde);
        auto tally = [](const Rational& f, const Rational& g, std::size_t& below,
                        std::size_t& above, std::size_t& tied) {
            if (f < g) ++below;
            else if (f > g) ++above;
            else ++tied;
        };
        tally(r.frechet.lower, r.gabriel.lower, res.lower_below, res.lower_above, res.lower_tied);
        tally(r.frechet.upper, r.gabriel.upper, res.upper_below, res.upper_above, res.upper_tied);
        const Rational lo = std::max(r.frechet.lower, r.gabriel.lower);
        const Rational hi = std::min(r.frechet.upper, r.gabriel.upper);
        if (lo > hi) ++res.empty_intersections;
        if (r.truth < lo || r.truth > hi) ++res.truth_outside;
        res.records.push_back(std::move(r));
    }
    return res;
}

inline void write_scatter_csv(std::ostream& out, const ScatterResult& res) {
    out << "seed,frechet_lo,frechet_hi,gabriel_lo,gabriel_hi\n";
    for (const auto& r : res.records)
        out << r.seed << ',' << format_sig12(to_double(r.frechet.lower)) << ','
            << format_sig12(to_double(r.frechet.upper)) << ','
            << format_sig12(to_double(r.gabriel.lower)) << ','
            << format_sig12(to_double(r.gabriel.upper)) << '\n';
}

inline void write_scatter_summary(std::ostream& out, const ScatterResult& res) {
    out << "scatter n=" << res.records.size() << " generator=" << Rng::kName
        << " seed=" << res.seed << " skipped=" << res.skipped << '\n'
        << "lower endpoints: frechet<gabriel " << res.lower_below << ", frechet>gabriel "
        << res.lower_above << ", tied " << res.lower_tied << '\n'
        << "upper endpoints: frechet<gabriel " << res.upper_below << ", frechet>gabriel "
        << res.upper_above << ", tied " << res.upper_tied << '\n'
        << "empty intersections " << res.empty_intersections << ", truth outside intersection "
        << res.truth_outside << '\n';
}

}  // namespace medbounds
