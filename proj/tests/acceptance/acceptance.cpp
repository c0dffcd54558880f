// Acceptance gate: one PASS/FAIL/SKIP line per criterion, followed by indented details.
// `acceptance` runs all ten; `acceptance --only N` runs criterion N. Exit status is 1 when
// any criterion that ran failed, and 77 when the one criterion requested was skipped.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "medbounds/medbounds.hpp"

using namespace medbounds;

namespace {

// Pinned tolerances and sizes.
constexpr double kSymbolicSecondsI = 10.0;
constexpr double kSymbolicSecondsII = 600.0;
constexpr std::size_t kEquivalenceN = 1000;
constexpr double kEquivalenceSeconds = 300.0;
constexpr std::size_t kContainmentN = 100000;
constexpr double kContainmentSeconds = 120.0;
constexpr std::size_t kScatterN = 1000;
constexpr std::uint64_t kScatterSeed = 1;
constexpr std::size_t kScatterReplicates = 20;
constexpr double kScatterSeconds = 120.0;
constexpr std::size_t kValidityN = 10000;
constexpr double kValiditySeconds = 600.0;
constexpr std::size_t kSharpnessNI = 1000;
constexpr std::size_t kSharpnessNII = 100;
constexpr double kSharpnessSeconds = 600.0;
constexpr std::size_t kReductionN = 1000;
constexpr double kReductionTol = 1e-12;
constexpr double kPeanutTol = 0.001;
constexpr std::size_t kBootstrapB = 2000;
constexpr std::uint64_t kSeed = 20240601;
constexpr int kSkipExit = 77;
constexpr std::uint64_t kWitnessSearchSeeds = 20000;

enum class Status { Pass, Fail, Skip };

struct Outcome {
    Status status = Status::Pass;
    std::string summary;
    std::vector<std::string> details;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double x) { return format_sig12(x); }

std::string secs(double s) {
    std::ostringstream os;
    os.precision(3);
    os << std::fixed << s << "s";
    return os.str();
}

template <class T>
std::string show(const Interval<T>& iv) {
    return "[" + fmt(to_double(iv.lower)) + ", " + fmt(to_double(iv.upper)) + "]";
}

void add_suite_details(Outcome& o, const SuiteReport& r, std::size_t max_violations = 5) {
    std::ostringstream os;
    write_summary(os, r);
    std::istringstream is(os.str());
    std::string line;
    std::size_t shown = 0;
    while (std::getline(is, line)) {
        if (line.rfind("  violation", 0) == 0 && ++shown > max_violations) continue;
        o.details.push_back("  " + line);
    }
}

// ---------------------------------------------------------------------------
// 1, 2: symbolic re-derivation against the transcribed displays

template <Setting S>
ObservedDist<Rational, S> random_dist_of(std::uint64_t seed) {
    if constexpr (S == Setting::I) {
        return random_dist1(seed);
    } else {
        return random_dist2(seed);
    }
}

/// Distribution on which the printed side differs from the derived one, with the LP witness
/// showing which value the printed side wrongly excludes or fails to reach.
template <Setting S>
void report_side(Outcome& o, const ConstraintSystem<S>& sys, const BoundExpr<S>& printed,
                 const BoundExpr<S>& derived, bool lower) {
    for (std::uint64_t seed = 1; seed <= kWitnessSearchSeeds; ++seed) {
        const auto d = random_dist_of<S>(seed);
        const auto p = printed.evaluate(d), q = derived.evaluate(d);
        const Rational pv = lower ? p.lower : p.upper, qv = lower ? q.lower : q.upper;
        if (pv == qv) continue;
        const auto lp = numeric_bounds(sys, d);
        const auto& w = lower ? lp.lower_witness : lp.upper_witness;
        const Rational lv = lower ? lp.interval.lower : lp.interval.upper;
        const bool witness_ok = observed_of(w) == d && true_effect(w, sys.estimand) == lv;
        std::string side = lower ? "lower" : "upper";
        o.details.push_back("    " + side + " differs on random_dist seed " + std::to_string(seed) +
                            ": printed " + fmt(to_double(pv)) + ", derived " +
                            fmt(to_double(qv)) + ", LP " + fmt(to_double(lv)));
        const bool excludes = lower ? pv > lv : pv < lv;
        o.details.push_back(
            "    " +
            std::string(excludes ? "printed " + side + " excludes the value attained by the "
                                 : "printed " + side + " is not attained; LP endpoint attained by ") +
            "witness model (" + std::to_string(w.atoms.size()) + " atoms, reproduces data and "
            "attains LP endpoint: " + (witness_ok ? "verified" : "NOT verified") + ")");
        return;
    }
    o.details.push_back("    no distinguishing distribution among " +
                        std::to_string(kWitnessSearchSeeds) + " seeds");
}

template <Setting S>
std::string term_list(const std::vector<LinearExpr<S>>& terms) {
    std::string s;
    for (const auto& t : terms) s += (s.empty() ? "" : " ; ") + to_text(t);
    return s;
}

template <Setting S>
std::vector<LinearExpr<S>> minus(const std::vector<LinearExpr<S>>& a,
                                 const std::vector<LinearExpr<S>>& b) {
    std::vector<LinearExpr<S>> out;
    for (const auto& t : a)
        if (std::find(b.begin(), b.end(), t) == b.end()) out.push_back(t);
    return out;
}

template <Setting S>
Outcome symbolic_criterion(double max_seconds) {
    Outcome o;
    std::size_t matched = 0, total = 0;
    bool fast = true;
    std::vector<std::string> mismatched;
    for (const auto& r : reference_term_lists()) {
        if (r.estimand.setting != S) continue;
        ++total;
        Stopwatch sw;
        const auto sys = build_system<S>(r.estimand);
        auto derived = symbolic_bounds(sys);
        const double t = sw.seconds();
        fast = fast && t < max_seconds;
        auto printed = reference_bound_expr<S>(r);
        derived.normalize();
        printed.normalize();
        const bool same = derived.same_terms(printed);
        matched += same;
        const std::string name = label(r.estimand);
        o.details.push_back("  " + name + ": derived " + std::to_string(derived.lower.size()) + "+" +
                            std::to_string(derived.upper.size()) + " terms, printed " +
                            std::to_string(printed.lower.size()) + "+" +
                            std::to_string(printed.upper.size()) + ", " +
                            (same ? "match" : "MISMATCH") + ", " + secs(t));
        if (same) continue;
        mismatched.push_back(name);
        for (bool lower : {true, false}) {
            const auto& dv = lower ? derived.lower : derived.upper;
            const auto& pv = lower ? printed.lower : printed.upper;
            const auto only_p = minus(pv, dv), only_d = minus(dv, pv);
            if (only_p.empty() && only_d.empty()) continue;
            o.details.push_back(std::string("    ") + (lower ? "lower" : "upper") +
                                " printed-only: " + term_list(only_p));
            o.details.push_back(std::string("    ") + (lower ? "lower" : "upper") +
                                " derived-only: " + term_list(only_d));
            report_side(o, sys, printed, derived, lower);
        }
    }
    o.status = matched == total && fast ? Status::Pass : Status::Fail;
    o.summary = std::to_string(matched) + "/" + std::to_string(total) +
                " displays reproduced exactly" + (fast ? "" : ", runtime limit exceeded");
    if (!mismatched.empty()) {
        std::string m;
        for (const auto& s : mismatched) m += (m.empty() ? "" : ", ") + s;
        o.summary += "; differing: " + m;
    }
    return o;
}

// ---------------------------------------------------------------------------

Outcome c1() { return symbolic_criterion<Setting::I>(kSymbolicSecondsI); }
Outcome c2() { return symbolic_criterion<Setting::II>(kSymbolicSecondsII); }

Outcome c3() {
    Outcome o;
    Stopwatch sw;
    const auto r1 = equivalence_suite<Setting::I>(kEquivalenceN, kSeed);
    const auto r2 = equivalence_suite<Setting::II>(kEquivalenceN, kSeed);
    const double t = sw.seconds();
    add_suite_details(o, r1);
    add_suite_details(o, r2);
    const bool ok = r1.ok() && r2.ok() && t < kEquivalenceSeconds;
    o.status = ok ? Status::Pass : Status::Fail;
    o.summary = "closed = symbolic = LP on " + std::to_string(kEquivalenceN) +
                " distributions per setting, " +
                std::to_string(r1.violations.size() + r2.violations.size()) + " mismatches, " +
                secs(t);
    return o;
}

Outcome c4() {
    Outcome o;
    Stopwatch sw;
    const auto r = containment_suite(Setting::I, kContainmentN, kSeed);
    const double t = sw.seconds();
    add_suite_details(o, r);
    o.status = r.ok() && t < kContainmentSeconds ? Status::Pass : Status::Fail;
    o.summary = "SJOLANDER_SDE contains RR_FRECHET_NDE on " + std::to_string(kContainmentN) +
                " distributions, " + std::to_string(r.violations.size()) + " violations, " +
                secs(t);
    return o;
}

Outcome c5() {
    Outcome o;
    Stopwatch sw;
    const auto r = scatter_experiment(kScatterN, kScatterSeed);
    const double t = sw.seconds();
    std::ostringstream os;
    write_scatter_summary(os, r);
    std::istringstream is(os.str());
    for (std::string line; std::getline(is, line);) o.details.push_back("  " + line);
    // the Frechet lower endpoint falls below Gabriel's in well under 1% of draws, so report
    // how often independent experiments of the same size show both orderings
    std::size_t both = 0;
    for (std::size_t k = 1; k <= kScatterReplicates; ++k)
        both += scatter_experiment(kScatterN, kScatterSeed + k * kScatterN).both_orderings();
    o.details.push_back("  independent replicate experiments showing both orderings: " +
                        std::to_string(both) + "/" + std::to_string(kScatterReplicates));
    const bool ok = r.both_orderings() && r.empty_intersections == 0 && r.truth_outside == 0 &&
                    r.records.size() + r.skipped == kScatterN && t < kScatterSeconds;
    o.status = ok ? Status::Pass : Status::Fail;
    o.summary = "both endpoint orderings " + std::string(r.both_orderings() ? "occur" : "MISSING") +
                ", " + std::to_string(r.empty_intersections) + " empty intersections, " +
                std::to_string(r.truth_outside) + " truths outside, " + secs(t);
    return o;
}

Outcome c6() {
    Outcome o;
    Stopwatch sw;
    const auto r1 = validity_suite(Setting::I, kValidityN, kSeed);
    const auto r2 = validity_suite(Setting::II, kValidityN, kSeed);
    const double t = sw.seconds();
    add_suite_details(o, r1);
    add_suite_details(o, r2);
    const bool ok = r1.ok() && r2.ok() && r1.skipped == 0 && r2.skipped == 0 &&
                    t < kValiditySeconds;
    o.status = ok ? Status::Pass : Status::Fail;
    o.summary = std::to_string(kValidityN) + " confounded models and " +
                std::to_string(kValidityN) + " couplings per setting, " +
                std::to_string(r1.violations.size() + r2.violations.size()) + " violations, " +
                secs(t);
    return o;
}

Outcome c7() {
    Outcome o;
    Stopwatch sw;
    const auto r1 = sharpness_suite(Setting::I, kSharpnessNI, kSeed);
    const auto r2 = sharpness_suite(Setting::II, kSharpnessNII, kSeed);
    const double t = sw.seconds();
    add_suite_details(o, r1);
    add_suite_details(o, r2);
    o.status = r1.ok() && r2.ok() && t < kSharpnessSeconds ? Status::Pass : Status::Fail;
    o.summary = "LP witnesses attain every endpoint exactly on " + std::to_string(kSharpnessNI) +
                " + " + std::to_string(kSharpnessNII) + " distributions, " +
                std::to_string(r1.violations.size() + r2.violations.size()) + " failures, " +
                secs(t);
    return o;
}

Outcome c8() {
    Outcome o;
    const auto r = reduction_suite(kReductionN, kSeed, kReductionTol);
    add_suite_details(o, r);
    o.status = r.ok() ? Status::Pass : Status::Fail;
    o.summary = "degenerate-L reduction on " + std::to_string(kReductionN) + " distributions, " +
                std::to_string(r.violations.size()) + " mismatches beyond 1e-12";
    return o;
}

Outcome c9() {
    Outcome o;
    const char* dir = std::getenv("MEDBOUNDS_PEANUT_DIR");
    if (dir == nullptr) {
        o.status = Status::Skip;
        o.summary = "trial data not present (set MEDBOUNDS_PEANUT_DIR to a directory holding "
                    "setting1.csv and setting2.csv)";
        return o;
    }
    const std::filesystem::path base(dir);
    struct Check {
        std::string what;
        double got, want;
    };
    std::vector<Check> checks;
    try {
        const auto d1 = dist_from_counts<Setting::I>(read_counts_csv((base / "setting1.csv").string(), Setting::I));
        const auto d2 =
            dist_from_counts<Setting::II>(read_counts_csv((base / "setting2.csv").string(), Setting::II));
        const auto sde1 = sde1_bounds(d1, 0);
        const auto rr = rr_frechet_nde1(d1, 0);
        const auto sde2 = gabriel_sde2_bounds(d2, 0);
        const auto fr = frechet_nde000(d2, 0);
        checks = {
            {"setting 1 point NDE(0)",
             to_double(mediation_point_estimate(d1, Estimand::point_nde(Setting::I, 0))), 0.0660},
            {"setting 2 point NDE(0,0,0)",
             to_double(mediation_point_estimate(d2, Estimand::point_nde(Setting::II, 0))), 0.0447},
            {"SJOLANDER_SDE(0) lower", to_double(sde1.lower), -0.322},
            {"SJOLANDER_SDE(0) upper", to_double(sde1.upper), 0.413},
            {"RR_FRECHET_NDE(0) lower", to_double(rr.lower), -0.0151},
            {"RR_FRECHET_NDE(0) upper", to_double(rr.upper), 0.256},
            {"GABRIEL_SDE(0) lower", to_double(sde2.lower), -0.051},
            {"GABRIEL_SDE(0) upper", to_double(sde2.upper), 0.949},
            {"FRECHET_NDE000(0) lower", to_double(fr.lower), 0.0},
            {"FRECHET_NDE000(0) upper", to_double(fr.upper), 0.277},
        };
    } catch (const std::exception& e) {
        o.status = Status::Fail;
        o.summary = std::string("could not evaluate trial data: ") + e.what();
        return o;
    }
    std::size_t ok = 0;
    for (const auto& c : checks) {
        const bool pass = std::abs(c.got - c.want) <= kPeanutTol;
        ok += pass;
        o.details.push_back("  " + c.what + " = " + fmt(c.got) + " (reference " + fmt(c.want) + ") " +
                            (pass ? "ok" : "OFF"));
    }
    o.status = ok == checks.size() ? Status::Pass : Status::Fail;
    o.summary = std::to_string(ok) + "/" + std::to_string(checks.size()) +
                " trial values within 0.001";
    return o;
}

Outcome c10() {
    Outcome o;
    const std::string fixtures = MEDBOUNDS_FIXTURES;
    const auto table = read_counts_csv(fixtures + "/setting1_d0_n100.csv", Setting::I);
    const Estimand e = Estimand::sde(Setting::I, 1);
    const std::string a =
        to_json(bootstrap_ci(table, BoundFamily::SJOLANDER_SDE, e, kBootstrapB, 0.05, kSeed)).dump(2);
    const std::string b =
        to_json(bootstrap_ci(table, BoundFamily::SJOLANDER_SDE, e, kBootstrapB, 0.05, kSeed)).dump(2);
    const bool identical = a == b;

    const auto degenerate = read_counts_csv(fixtures + "/setting1_degenerate.csv", Setting::I);
    const auto r = bootstrap_ci(degenerate, BoundFamily::SJOLANDER_SDE, e, kBootstrapB, 0.05, kSeed);
    const bool zero_width = r.lower_ci.lower == r.lower_ci.upper &&
                            r.upper_ci.lower == r.upper_ci.upper &&
                            r.lower_ci.lower == r.point.lower && r.upper_ci.lower == r.point.upper;
    o.details.push_back("  repeated report identical: " + std::string(identical ? "yes" : "no") +
                        " (" + std::to_string(a.size()) + " bytes)");
    o.details.push_back("  degenerate table: point " + show(r.point) + ", lower CI " +
                        show(r.lower_ci) + ", upper CI " + show(r.upper_ci));
    o.status = identical && zero_width ? Status::Pass : Status::Fail;
    o.summary = "B=2000 report byte-identical across runs: " +
                std::string(identical ? "yes" : "no") +
                "; degenerate table gives zero-width CIs: " + (zero_width ? "yes" : "no");
    return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
    static const std::vector<std::pair<std::string, std::function<Outcome()>>> list = {
        {"symbolic re-derivation, setting I", c1},
        {"symbolic re-derivation, setting II", c2},
        {"triple equivalence", c3},
        {"containment", c4},
        {"Frechet vs Gabriel scatter", c5},
        {"validity Monte Carlo", c6},
        {"sharpness", c7},
        {"degenerate-L reduction", c8},
        {"trial data example", c9},
        {"bootstrap determinism", c10},
    };
    return list;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: acceptance [--only N]\n";
            return 2;
        }
    }
    bool failed = false, ran = false;
    const auto& list = criteria();
    for (std::size_t k = 0; k < list.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (only != 0 && only != id) continue;
        Outcome o;
        try {
            o = list[k].second();
        } catch (const std::exception& e) {
            o.status = Status::Fail;
            o.summary = std::string("exception: ") + e.what();
        }
        const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
        std::cout << "[" << tag << "] C" << id << " " << list[k].first << ": " << o.summary << '\n';
        for (const auto& d : o.details) std::cout << d << '\n';
        std::cout.flush();
        failed = failed || o.status == Status::Fail;
        ran = ran || o.status != Status::Skip;
    }
    if (failed) return 1;
    // a lone skipped criterion is reported to ctest as skipped
    return only != 0 && !ran ? kSkipExit : 0;
}
