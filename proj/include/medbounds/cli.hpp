#pragma once

// Command-line front end. run_cli is the whole program; tools/medbounds.cpp only forwards
// argv and the standard streams.
//
// Exit codes: 0 success, 1 usage or data error, 2 validation violations, 3 budget exhausted.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "medbounds/closed_bounds.hpp"
#include "medbounds/errors.hpp"
#include "medbounds/experiments.hpp"
#include "medbounds/inference.hpp"
#include "medbounds/linear_expr.hpp"
#include "medbounds/observed.hpp"
#include "medbounds/polytope_lp.hpp"
#include "medbounds/types.hpp"

namespace medbounds {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolations = 2;
inline constexpr int kExitBudget = 3;

struct BoundsReport {
    Setting setting = Setting::I;
    Estimand estimand;
    BoundFamily family = BoundFamily::SJOLANDER_SDE;
    Interval<double> bounds;
    std::optional<double> point;
    Provenance provenance = Provenance::PaperForm;

    std::string assumptions() const {
        return estimand.randomization_only() ? "randomization" : "randomization+swi";
    }
};

inline nlohmann::ordered_json to_json(const BoundsReport& r) {
    nlohmann::ordered_json j;
    j["schema_version"] = "1";
    j["setting"] = r.setting == Setting::I ? 1 : 2;
    j["estimand"] = label(r.estimand);
    j["family"] = to_string(r.family);
    j["assumptions"] = r.assumptions();
    j["point"] = r.point ? nlohmann::ordered_json(round_sig12(*r.point)) : nlohmann::ordered_json();
    j["lower"] = round_sig12(r.bounds.lower);
    j["upper"] = round_sig12(r.bounds.upper);
    j["provenance"] = to_string(r.provenance);
    return j;
}

inline void write_text(std::ostream& out, const BoundsReport& r) {
    out << "setting: " << to_string(r.setting) << '\n'
        << "estimand: " << label(r.estimand) << '\n'
        << "family: " << to_string(r.family) << '\n'
        << "assumptions: " << r.assumptions() << '\n'
        << "lower: " << format_sig12(r.bounds.lower) << '\n'
        << "upper: " << format_sig12(r.bounds.upper) << '\n'
        << "point: " << (r.point ? format_sig12(*r.point) : "none") << '\n'
        << "provenance: " << to_string(r.provenance) << '\n';
}

namespace detail {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// --estimand/--arm/--mediator-arm to an Estimand. For nde-tchetgen, --arm alone names the
/// effect arm a*; with --mediator-arm, --arm is the outcome arm and --mediator-arm is a*.
inline Estimand parse_estimand(const std::string& name, Setting s, int arm,
                               std::optional<int> mediator_arm) {
    if (name == "sde") return Estimand::sde(s, arm);
    if (name == "sie") return Estimand::sie(s, arm);
    if (name == "te") return Estimand::te(s);
    if (name == "nde-frechet") return Estimand::nde_frechet(s, arm);
    if (name == "nde-tchetgen") {
        if (s != Setting::II) throw UsageError("nde-tchetgen needs --setting 2");
        if (mediator_arm) {
            if (*mediator_arm == arm)
                throw UsageError("--mediator-arm must differ from the outcome arm --arm");
            return Estimand::nde_tchetgen(arm, *mediator_arm);
        }
        return Estimand::nde_tchetgen(arm);
    }
    throw UsageError("unknown estimand: " + name);
}

inline BoundFamily pick_family(const std::string& name, const Estimand& e) {
    if (name == "auto") return default_family(e);
    const BoundFamily f = parse_family(name);
    if (setting_of(f) != e.setting || family_estimand(f, family_arm(f, e)).kind != e.kind)
        throw UsageError(name + " does not bound " + label(e) + " in setting " +
                         to_string(e.setting));
    return f;
}

/// Mediation-formula value of the effect the family bounds, if its conditionals exist.
template <Setting S>
std::optional<double> point_estimate(const ObservedDist<Rational, S>& d, const Estimand& e) {
    std::optional<Estimand> p;
    switch (e.kind) {
        case EstimandKind::SDE:
        case EstimandKind::NDE_FRECHET: p = Estimand::point_nde(S, e.arm); break;
        case EstimandKind::SIE: p = Estimand::point_nie(S, e.arm); break;
        default: break;
    }
    if (!p) return std::nullopt;
    try {
        return to_double(mediation_point_estimate(d, *p));
    } catch (const UndefinedConditional&) {
        return std::nullopt;
    }
}

template <Setting S>
BoundsReport compute_bounds(const CountTable& t, const Estimand& e, BoundFamily f,
                            UndefinedPolicy policy) {
    const auto d = dist_from_counts<S>(t);
    const int arm = family_arm(f, e);
    BoundsReport r;
    r.setting = S;
    r.estimand = e;
    r.family = f;
    r.bounds = interval_cast<double>(closed_form_bounds(f, d, arm, policy));
    r.point = point_estimate(d, e);
    r.provenance = family_provenance(f, arm);
    return r;
}

template <Setting S>
int derive(const Estimand& e, const std::string& format, std::uint64_t budget, std::ostream& out) {
    DdOptions opt;
    opt.node_budget = budget;
    SymbolicStats stats;
    try {
        const auto expr = symbolic_bounds(build_system<S>(e), opt, &stats);
        out << (format == "latex" ? to_latex(expr) : to_text(expr)) << '\n';
    } catch (const ResourceExhausted& ex) {
        out << "incomplete: " << ex.what() << '\n'
            << "rows processed " << ex.rows_done() << " of " << ex.rows_total() << ", nodes "
            << ex.nodes() << ", live rays " << ex.live_rays() << '\n';
        return kExitBudget;
    }
    return kExitOk;
}

}  // namespace detail

/// Runs one command line. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bounds on mediation effects from randomized-trial count data", "medbounds"};
    app.require_subcommand(1);

    int setting = 1, arm = 0;
    std::optional<int> mediator_arm;
    std::string counts, estimand = "sde", family = "auto";
    bool json = false, text = false, widen = false;

    auto* bounds = app.add_subcommand("bounds", "Evaluate a bound family on count data");
    bounds->add_option("--setting", setting)->required()->check(CLI::IsMember({1, 2}));
    bounds->add_option("--counts", counts, "CSV with header a,m,y,n or a,l,m,y,n")->required();
    bounds->add_option("--estimand", estimand)
        ->required()
        ->check(CLI::IsMember({"sde", "sie", "nde-frechet", "nde-tchetgen"}));
    bounds->add_option("--arm", arm)->required()->check(CLI::IsMember({0, 1}));
    bounds->add_option("--mediator-arm", mediator_arm)->check(CLI::IsMember({0, 1}));
    bounds->add_option("--family", family, "auto or a family name")->default_val("auto");
    auto* json_flag = bounds->add_flag("--json", json);
    bounds->add_flag("--text", text)->excludes(json_flag);
    bounds->add_flag("--widen-undefined", widen,
                     "Treat undefined conditionals as ranging over [0, 1]");

    std::string format = "text";
    std::uint64_t budget = DdOptions{}.node_budget;
    auto* derive = app.add_subcommand("derive", "Derive symbolic sharp bounds");
    derive->add_option("--setting", setting)->required()->check(CLI::IsMember({1, 2}));
    derive->add_option("--estimand", estimand)
        ->required()
        ->check(CLI::IsMember({"sde", "sie", "te"}));
    derive->add_option("--arm", arm)->check(CLI::IsMember({0, 1}));
    derive->add_option("--format", format)->check(CLI::IsMember({"text", "latex"}));
    derive->add_option("--budget", budget, "Double-description node budget");

    std::size_t n = 1000;
    std::uint64_t seed = 0;
    std::string out_path;
    auto* simulate = app.add_subcommand("simulate", "Frechet vs Gabriel scatter data");
    simulate->add_option("--setting", setting)->required()->check(CLI::IsMember({2}));
    simulate->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed)->required();
    simulate->add_option("--out", out_path)->required();

    std::string suite = "all", records_path;
    auto* validate = app.add_subcommand("validate", "Run the model-based test suites");
    validate->add_option("--setting", setting)->required()->check(CLI::IsMember({1, 2}));
    validate->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    validate->add_option("--seed", seed)->required();
    validate->add_option("--suite", suite)
        ->check(CLI::IsMember({"validity", "sharpness", "containment", "all"}));
    validate->add_option("--records", records_path, "Write validity records as CSV");

    std::size_t replicates = kDefaultReplicates;
    double alpha = kDefaultAlpha;
    auto* ci = app.add_subcommand("ci", "Bootstrap confidence intervals for bound endpoints");
    ci->add_option("--setting", setting)->required()->check(CLI::IsMember({1, 2}));
    ci->add_option("--counts", counts)->required();
    ci->add_option("--estimand", estimand)
        ->required()
        ->check(CLI::IsMember({"sde", "sie", "nde-frechet", "nde-tchetgen"}));
    ci->add_option("--arm", arm)->required()->check(CLI::IsMember({0, 1}));
    ci->add_option("--mediator-arm", mediator_arm)->check(CLI::IsMember({0, 1}));
    ci->add_option("--family", family)->default_val("auto");
    ci->add_option("--replicates", replicates)->default_val(kDefaultReplicates);
    ci->add_option("--alpha", alpha)->default_val(kDefaultAlpha);
    ci->add_option("--seed", seed)->default_val(0);

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const Setting s = parse_setting(setting);
        if (*bounds) {
            const Estimand e = detail::parse_estimand(estimand, s, arm, mediator_arm);
            const BoundFamily f = detail::pick_family(family, e);
            const CountTable t = read_counts_csv(counts, s);
            const auto policy = widen ? UndefinedPolicy::Widen : UndefinedPolicy::Throw;
            const BoundsReport r = s == Setting::I
                                       ? detail::compute_bounds<Setting::I>(t, e, f, policy)
                                       : detail::compute_bounds<Setting::II>(t, e, f, policy);
            if (json)
                out << to_json(r).dump(2) << '\n';
            else
                write_text(out, r);
            return kExitOk;
        }
        if (*derive) {
            const Estimand e = detail::parse_estimand(estimand, s, arm, std::nullopt);
            return s == Setting::I ? detail::derive<Setting::I>(e, format, budget, out)
                                   : detail::derive<Setting::II>(e, format, budget, out);
        }
        if (*simulate) {
            const ScatterResult res = scatter_experiment(n, seed);
            std::ofstream f(out_path);
            if (!f) throw detail::UsageError("cannot open " + out_path + " for writing");
            write_scatter_csv(f, res);
            f.close();
            if (!f) throw detail::UsageError("failed writing " + out_path);
            write_scatter_summary(out, res);
            return kExitOk;
        }
        if (*validate) {
            std::vector<SuiteReport> reports;
            if (suite == "validity" || suite == "all") reports.push_back(validity_suite(s, n, seed));
            if (suite == "sharpness" || suite == "all")
                reports.push_back(sharpness_suite(s, n, seed));
            if (suite == "containment" || suite == "all")
                reports.push_back(containment_suite(s, n, seed));
            bool ok = true;
            for (const auto& r : reports) {
                write_summary(out, r);
                ok = ok && r.ok();
            }
            if (!records_path.empty()) {
                std::ofstream f(records_path);
                if (!f) throw detail::UsageError("cannot open " + records_path + " for writing");
                std::vector<ExperimentRecord> all;
                for (const auto& r : reports) all.insert(all.end(), r.records.begin(), r.records.end());
                write_records_csv(f, all);
            }
            return ok ? kExitOk : kExitViolations;
        }
        if (*ci) {
            const Estimand e = detail::parse_estimand(estimand, s, arm, mediator_arm);
            const BoundFamily f = detail::pick_family(family, e);
            const CountTable t = read_counts_csv(counts, s);
            out << to_json(bootstrap_ci(t, f, e, replicates, alpha, seed)).dump(2) << '\n';
            return kExitOk;
        }
    } catch (const ResourceExhausted& e) {
        err << "error: " << e.what() << '\n';
        return kExitBudget;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

inline int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace medbounds
