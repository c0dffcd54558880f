#include <gtest/gtest.h>

#include <string>

#include "medbounds/medbounds.hpp"

using namespace medbounds;

namespace {

CountTable fixture(const std::string& name, Setting s) {
    return read_counts_csv(std::string(MEDBOUNDS_FIXTURES) + "/" + name, s);
}

const Estimand kSde1 = Estimand::sde(Setting::I, 1);

}  // namespace

TEST(Quantile, TypeSeven) {
    const std::vector<double> v{1, 2, 3, 4};
    EXPECT_DOUBLE_EQ(quantile_sorted(v, 0), 1);
    EXPECT_DOUBLE_EQ(quantile_sorted(v, 1), 4);
    EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.25), 1.75);
    EXPECT_TRUE(std::isnan(quantile_sorted({}, 0.5)));
}

TEST(Resample, KeepsArmSizesAndSupport) {
    const auto t = fixture("setting1_synthetic.csv", Setting::I);
    Rng rng(3);
    for (int k = 0; k < 20; ++k) {
        const auto r = detail::resample(t, rng);
        for (int a = 0; a < 2; ++a) EXPECT_EQ(r.arm_total(a), t.arm_total(a));
        for (int i = 0; i < 8; ++i)
            if (t.counts[i] == 0) {
                EXPECT_EQ(r.counts[i], 0u);
            }
    }
}

TEST(Bootstrap, DegenerateTableHasZeroWidth) {
    const auto t = fixture("setting1_degenerate.csv", Setting::I);
    const auto r = bootstrap_ci(t, BoundFamily::SJOLANDER_SDE, kSde1, 200, 0.05, 1);
    EXPECT_EQ(r.point.lower, 0);
    EXPECT_EQ(r.point.upper, 0);
    EXPECT_EQ(r.lower_ci.width(), 0);
    EXPECT_EQ(r.upper_ci.width(), 0);
    EXPECT_EQ(r.used, 200u);
}

TEST(Bootstrap, DeterministicForSeed) {
    const auto t = fixture("setting1_d0_n100.csv", Setting::I);
    const auto a = bootstrap_ci(t, BoundFamily::SJOLANDER_SDE, kSde1, 300, 0.05, 42);
    const auto b = bootstrap_ci(t, BoundFamily::SJOLANDER_SDE, kSde1, 300, 0.05, 42);
    const auto c = bootstrap_ci(t, BoundFamily::SJOLANDER_SDE, kSde1, 300, 0.05, 43);
    EXPECT_EQ(a.lower_ci, b.lower_ci);
    EXPECT_EQ(a.upper_ci, b.upper_ci);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    EXPECT_FALSE(a.lower_ci == c.lower_ci && a.upper_ci == c.upper_ci);
}

TEST(Bootstrap, CoversAndShrinksWithSampleSize) {
    const auto small = bootstrap_ci(fixture("setting1_d0_n100.csv", Setting::I),
                                    BoundFamily::SJOLANDER_SDE, kSde1, 500, 0.05, 7);
    const auto large = bootstrap_ci(fixture("setting1_d0_n10000.csv", Setting::I),
                                    BoundFamily::SJOLANDER_SDE, kSde1, 500, 0.05, 7);
    EXPECT_DOUBLE_EQ(large.point.lower, -0.5);
    EXPECT_DOUBLE_EQ(large.point.upper, 0.5);
    EXPECT_TRUE(large.lower_ci.contains(-0.5));
    EXPECT_TRUE(large.upper_ci.contains(0.5));
    EXPECT_LT(large.lower_ci.width(), small.lower_ci.width());
    EXPECT_LT(large.upper_ci.width(), small.upper_ci.width());
}

TEST(Bootstrap, SmallerAlphaGivesWiderIntervals) {
    const auto t = fixture("setting1_synthetic.csv", Setting::I);
    const auto wide = bootstrap_ci(t, BoundFamily::SJOLANDER_SIE, Estimand::sie(Setting::I, 0), 400,
                                   0.01, 5);
    const auto narrow = bootstrap_ci(t, BoundFamily::SJOLANDER_SIE, Estimand::sie(Setting::I, 0),
                                     400, 0.2, 5);
    EXPECT_TRUE(wide.lower_ci.contains(narrow.lower_ci, 0.0));
    EXPECT_TRUE(wide.upper_ci.contains(narrow.upper_ci, 0.0));
}

TEST(Bootstrap, SettingTwoFamilies) {
    const auto t = fixture("setting2_synthetic.csv", Setting::II);
    const auto r = bootstrap_ci(t, BoundFamily::TCHETGEN_NDE, Estimand::nde_tchetgen(0), 150, 0.1, 2);
    EXPECT_EQ(r.arm, 0);
    EXPECT_EQ(r.used + r.undefined, 150u);
    EXPECT_LE(r.lower_ci.lower, r.lower_ci.upper);
    const auto j = to_json(r);
    EXPECT_EQ(j["family"], "TCHETGEN_NDE");
    EXPECT_EQ(j["replicates"], 150);
    EXPECT_TRUE(j.contains("point_outside_ci"));
}

TEST(Bootstrap, ArgumentErrors) {
    const auto t = fixture("setting1_synthetic.csv", Setting::I);
    EXPECT_THROW(bootstrap_ci(t, BoundFamily::SJOLANDER_SDE, kSde1, 99), std::invalid_argument);
    EXPECT_THROW(bootstrap_ci(t, BoundFamily::SJOLANDER_SDE, kSde1, 200, 0.0), std::invalid_argument);
    EXPECT_THROW(bootstrap_ci(t, BoundFamily::SJOLANDER_SDE, kSde1, 200, 1.0), std::invalid_argument);
    EXPECT_THROW(bootstrap_ci(t, BoundFamily::GABRIEL_SDE, Estimand::sde(Setting::II, 1), 200),
                 DimensionMismatch);
    CountTable empty;
    empty.counts[0] = 5;
    EXPECT_THROW(bootstrap_ci(empty, BoundFamily::SJOLANDER_SDE, kSde1, 200), EmptyArm);
}
