#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "medbounds/cli.hpp"
#include "medbounds/medbounds.hpp"

using namespace medbounds;

namespace {

std::string fixture(const std::string& name) { return std::string(MEDBOUNDS_FIXTURES) + "/" + name; }

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string text_field(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
    return {};
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("medbounds_test_" + name);
}

}  // namespace

TEST(CliBounds, D0TextOutput) {
    const auto r = run({"bounds", "--setting", "1", "--counts", fixture("setting1_d0_n100.csv"),
                        "--estimand", "sde", "--arm", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(text_field(r.out, "lower"), "-0.5");
    EXPECT_EQ(text_field(r.out, "upper"), "0.5");
    EXPECT_EQ(text_field(r.out, "family"), "SJOLANDER_SDE");
    EXPECT_EQ(text_field(r.out, "estimand"), "SDE(1)");
    EXPECT_EQ(text_field(r.out, "assumptions"), "randomization");
}

TEST(CliBounds, JsonKeysAndValues) {
    const auto r = run({"bounds", "--setting", "1", "--counts", fixture("setting1_y_equals_a.csv"),
                        "--estimand", "sde", "--arm", "0", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::ordered_json::parse(r.out);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"schema_version", "setting", "estimand", "family",
                                              "assumptions", "point", "lower", "upper",
                                              "provenance"}));
    EXPECT_EQ(j["schema_version"], "1");
    EXPECT_EQ(j["setting"], 1);
    EXPECT_EQ(j["lower"], 1.0);
    EXPECT_EQ(j["upper"], 1.0);
    EXPECT_EQ(j["point"], 1.0);
}

TEST(CliBounds, TextAndJsonAgreeWithLibrary) {
    const std::vector<std::vector<std::string>> cases = {
        {"1", "setting1_synthetic.csv", "sie", "0"},
        {"1", "setting1_synthetic.csv", "nde-frechet", "1"},
        {"1", "setting1_proportions.csv", "sde", "1"},
        {"2", "setting2_synthetic.csv", "sde", "0"},
        {"2", "setting2_synthetic.csv", "nde-frechet", "0"},
        {"2", "setting2_synthetic.csv", "nde-tchetgen", "1"},
    };
    for (const auto& c : cases) {
        std::vector<std::string> args{"bounds", "--setting", c[0], "--counts", fixture(c[1]),
                                      "--estimand", c[2], "--arm", c[3]};
        const auto t = run(args);
        args.push_back("--json");
        const auto js = run(args);
        ASSERT_EQ(t.code, 0) << t.err;
        ASSERT_EQ(js.code, 0) << js.err;
        const auto j = nlohmann::json::parse(js.out);
        EXPECT_DOUBLE_EQ(std::stod(text_field(t.out, "lower")), j["lower"].get<double>());
        EXPECT_DOUBLE_EQ(std::stod(text_field(t.out, "upper")), j["upper"].get<double>());

        const Setting s = c[0] == "1" ? Setting::I : Setting::II;
        const auto table = read_counts_csv(fixture(c[1]), s);
        const Estimand e = detail::parse_estimand(c[2], s, std::stoi(c[3]), std::nullopt);
        const BoundFamily f = default_family(e);
        const auto iv = interval_cast<double>(
            s == Setting::I ? closed_form_bounds(f, dist_from_counts<Setting::I>(table), family_arm(f, e))
                            : closed_form_bounds(f, dist_from_counts<Setting::II>(table), family_arm(f, e)));
        EXPECT_NEAR(j["lower"].get<double>(), iv.lower, 1e-11) << c[2];
        EXPECT_NEAR(j["upper"].get<double>(), iv.upper, 1e-11) << c[2];
    }
}

TEST(CliBounds, TchetgenArmsAndPoint) {
    const auto r = run({"bounds", "--setting", "2", "--counts", fixture("setting2_synthetic.csv"),
                        "--estimand", "nde-tchetgen", "--arm", "1", "--mediator-arm", "0", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["point"].is_null());
    EXPECT_EQ(j["family"], "TCHETGEN_NDE");
    EXPECT_EQ(j["provenance"], "paper-form");
    EXPECT_EQ(j["assumptions"], "randomization+swi");
    const auto same = run({"bounds", "--setting", "2", "--counts", fixture("setting2_synthetic.csv"),
                           "--estimand", "nde-tchetgen", "--arm", "0", "--json"});
    EXPECT_EQ(same.out, r.out);
    const auto t = run({"bounds", "--setting", "2", "--counts", fixture("setting2_synthetic.csv"),
                        "--estimand", "nde-tchetgen", "--arm", "1"});
    EXPECT_EQ(text_field(t.out, "point"), "none");
    EXPECT_EQ(text_field(t.out, "provenance"), "arm-symmetry");
}

TEST(CliBounds, ExplicitFamily) {
    const auto ok = run({"bounds", "--setting", "2", "--counts", fixture("setting2_uniform.csv"),
                         "--estimand", "sde", "--arm", "1", "--family", "GABRIEL_SDE"});
    EXPECT_EQ(ok.code, 0) << ok.err;
    const auto bad = run({"bounds", "--setting", "2", "--counts", fixture("setting2_uniform.csv"),
                          "--estimand", "sde", "--arm", "1", "--family", "SJOLANDER_SDE"});
    EXPECT_EQ(bad.code, 1);
    EXPECT_FALSE(bad.err.empty());
}

TEST(CliBounds, UsageAndDataErrors) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"bounds", "--setting", "3", "--counts", fixture("setting1_d0_n100.csv"),
                   "--estimand", "sde", "--arm", "1"})
                  .code,
              1);
    EXPECT_EQ(run({"bounds", "--setting", "1", "--counts", "/nonexistent.csv", "--estimand", "sde",
                   "--arm", "1"})
                  .code,
              1);
    // a setting-1 file read as setting 2
    EXPECT_EQ(run({"bounds", "--setting", "2", "--counts", fixture("setting1_d0_n100.csv"),
                   "--estimand", "sde", "--arm", "1"})
                  .code,
              1);
    EXPECT_EQ(run({"bounds", "--setting", "1", "--counts", fixture("setting1_d0_n100.csv"),
                   "--estimand", "nde-tchetgen", "--arm", "1"})
                  .code,
              1);
    EXPECT_EQ(run({"bounds", "--setting", "1", "--counts", fixture("setting1_d0_n100.csv"),
                   "--estimand", "sde", "--arm", "1", "--json", "--text"})
                  .code,
              1);
}

TEST(CliBounds, UndefinedConditionalAndWiden) {
    // arm 1 never shows M = 1 while arm 0 does
    const auto path = temp_path("undefined.csv");
    {
        std::ofstream f(path);
        f << "a,m,y,n\n0,0,0,10\n0,1,1,10\n1,0,1,20\n";
    }
    const std::vector<std::string> base{"bounds", "--setting", "1", "--counts", path.string(),
                                        "--estimand", "nde-frechet", "--arm", "0"};
    EXPECT_EQ(run(base).code, 1);
    auto widened = base;
    widened.push_back("--widen-undefined");
    const auto r = run(widened);
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_LE(std::stod(text_field(r.out, "lower")), std::stod(text_field(r.out, "upper")));
    std::filesystem::remove(path);
}

TEST(CliBounds, Help) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("bounds"), std::string::npos);
}

TEST(CliDerive, SettingOneTextAndLatex) {
    const auto r = run({"derive", "--setting", "1", "--estimand", "sde", "--arm", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("p00_1"), std::string::npos);
    const auto l = run({"derive", "--setting", "1", "--estimand", "sie", "--arm", "0", "--format",
                        "latex"});
    ASSERT_EQ(l.code, 0) << l.err;
    EXPECT_NE(l.out.find("\\max"), std::string::npos);
    const auto te = run({"derive", "--setting", "1", "--estimand", "te"});
    EXPECT_EQ(te.code, 0);
}

TEST(CliDerive, BudgetExhausted) {
    const auto r = run({"derive", "--setting", "2", "--estimand", "sde", "--arm", "1", "--budget", "5"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.out.find("incomplete"), std::string::npos);
}

TEST(CliSimulate, WritesCsvDeterministically) {
    const auto a = temp_path("scatter_a.csv"), b = temp_path("scatter_b.csv");
    const auto ra = run({"simulate", "--setting", "2", "--n", "50", "--seed", "4", "--out", a.string()});
    const auto rb = run({"simulate", "--setting", "2", "--n", "50", "--seed", "4", "--out", b.string()});
    ASSERT_EQ(ra.code, 0) << ra.err;
    ASSERT_EQ(rb.code, 0);
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream f(p);
        return std::string(std::istreambuf_iterator<char>(f), {});
    };
    const std::string ca = slurp(a);
    EXPECT_EQ(ca, slurp(b));
    EXPECT_EQ(ca.rfind("seed,frechet_lo,frechet_hi,gabriel_lo,gabriel_hi\n", 0), 0u);
    EXPECT_EQ(std::count(ca.begin(), ca.end(), '\n'), 51);
    EXPECT_EQ(run({"simulate", "--setting", "1", "--n", "5", "--seed", "1", "--out", a.string()}).code, 1);
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}

TEST(CliValidate, SmallSuitesPass) {
    const auto recs = temp_path("records.csv");
    const auto r = run({"validate", "--setting", "1", "--n", "20", "--seed", "3", "--records",
                        recs.string()});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    std::ifstream f(recs);
    std::string header;
    std::getline(f, header);
    EXPECT_EQ(header, "seed,family,lower,upper,truth,contained");
    std::filesystem::remove(recs);
    EXPECT_EQ(run({"validate", "--setting", "2", "--n", "5", "--seed", "3", "--suite", "sharpness"}).code, 0);
}

TEST(CliCi, JsonReport) {
    const std::vector<std::string> args{"ci", "--setting", "1", "--counts",
                                        fixture("setting1_synthetic.csv"), "--estimand", "sde",
                                        "--arm", "1", "--replicates", "200", "--seed", "9"};
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto j = nlohmann::json::parse(a.out);
    EXPECT_EQ(j["replicates"], 200);
    EXPECT_EQ(j["seed"], 9);
    EXPECT_EQ(j["ci"]["lower"].size(), 2u);
    auto few = args;
    few[10] = "50";
    EXPECT_EQ(run(few).code, 1);
}

TEST(CliBinary, ForwardsExitCodes) {
    const std::string cli = MEDBOUNDS_CLI;
    const std::string ok = cli + " bounds --setting 1 --counts " + fixture("setting1_d0_n100.csv") +
                           " --estimand sde --arm 1 > /dev/null 2>&1";
    EXPECT_EQ(WEXITSTATUS(std::system(ok.c_str())), 0);
    const std::string bad = cli + " bounds --setting 1 --counts /nonexistent.csv --estimand sde --arm 1 > /dev/null 2>&1";
    EXPECT_EQ(WEXITSTATUS(std::system(bad.c_str())), 1);
    const std::string budget = cli + " derive --setting 2 --estimand sde --arm 0 --budget 5 > /dev/null 2>&1";
    EXPECT_EQ(WEXITSTATUS(std::system(budget.c_str())), 3);
}
