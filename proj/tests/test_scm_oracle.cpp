#include <gtest/gtest.h>

#include <sstream>

#include "medbounds/medbounds.hpp"

using namespace medbounds;

namespace {

Rational q(long n, long d = 1) {
    Rational r(n, d);
    r.canonicalize();
    return r;
}

// Y(a, m) = a, M(a) = 0
ScmI<Rational> y_equals_a_model() { return ScmI<Rational>::point_mass(Combo{0, 0, 0b1100}); }

// M(a) = a, Y(a, m) = m
ScmI<Rational> y_equals_m_model() { return ScmI<Rational>::point_mass(Combo{0, 0b10, 0b1010}); }

}  // namespace

TEST(SampleScm, OnSimplexAndDeterministic) {
    const auto a = sample_scm<Setting::I>(7);
    const auto b = sample_scm<Setting::I>(7);
    const auto c = sample_scm<Setting::I>(8);
    EXPECT_NO_THROW(a.validate());
    EXPECT_NEAR(a.total(), 1.0, 1e-12);
    ASSERT_EQ(a.atoms.size(), 64u);
    for (std::size_t i = 0; i < a.atoms.size(); ++i) {
        EXPECT_EQ(a.atoms[i].second, b.atoms[i].second);
        EXPECT_GT(a.atoms[i].second, 0.0);
    }
    EXPECT_NE(a.atoms[0].second, c.atoms[0].second);
}

TEST(SampleScm, DirichletMean) {
    const int n = 4000;
    std::vector<double> mean(64);
    for (int s = 0; s < n; ++s) {
        const auto scm = sample_scm<Setting::I>(1000 + s);
        for (const auto& [k, w] : scm.atoms) mean[k] += w / n;
    }
    // each weight is Beta(1, 63): mean 1/64, sd about 0.0155, so the mean has sd about 2.5e-4
    for (double m : mean) EXPECT_NEAR(m, 1.0 / 64, 1.5e-3);
}

TEST(ObservedOf, PointMasses) {
    const auto d = observed_of(y_equals_a_model());
    EXPECT_EQ(d.p(0, 0, 0), 1);
    EXPECT_EQ(d.p(1, 0, 1), 1);
    const auto e = observed_of(y_equals_m_model());
    EXPECT_EQ(e.p(0, 0, 0), 1);
    EXPECT_EQ(e.p(1, 1, 1), 1);
}

TEST(ObservedOf, SettingTwoCellsSumPerArm) {
    const auto scm = sample_scm<Setting::II>(3);
    const auto d = observed_of(scm);
    EXPECT_NEAR(d.arm_total(0), 1.0, 1e-12);
    EXPECT_NEAR(d.arm_total(1), 1.0, 1e-12);
}

TEST(TrueEffect, PointMassExamples) {
    const auto ya = y_equals_a_model();
    for (int a = 0; a < 2; ++a) {
        EXPECT_EQ(true_effect(ya, Estimand::sde(Setting::I, a)), 1);
        EXPECT_EQ(true_effect(ya, Estimand::sie(Setting::I, a)), 0);
        EXPECT_EQ(true_effect(ya, Estimand::nde_frechet(Setting::I, a)), 1);
    }
    const auto ym = y_equals_m_model();
    for (int a = 0; a < 2; ++a) {
        EXPECT_EQ(true_effect(ym, Estimand::sde(Setting::I, a)), 0);
        EXPECT_EQ(true_effect(ym, Estimand::sie(Setting::I, a)), 1);
        EXPECT_EQ(true_effect(ym, Estimand::point_nie(Setting::I, a)), 1);
    }
    EXPECT_EQ(true_effect(ym, Estimand::te(Setting::I)), 1);
    EXPECT_THROW(true_effect(ym, Estimand::sde(Setting::II, 0)), UnsupportedEstimand);
}

TEST(TrueEffect, TotalEffectDecomposes) {
    for (std::uint64_t s = 1; s < 20; ++s) {
        const auto scm = sample_scm<Setting::I>(s);
        const double te = true_effect(scm, Estimand::te(Setting::I));
        EXPECT_NEAR(te, total_effect(observed_of(scm)), 1e-12);
        for (int a = 0; a < 2; ++a) {
            const double sde = true_effect(scm, Estimand::sde(Setting::I, a));
            const double sie = true_effect(scm, Estimand::sie(Setting::I, 1 - a));
            EXPECT_NEAR(sde + sie, te, 1e-12);
        }
    }
}

TEST(ProductScm, ReproducesDataAndMediationFormula) {
    for (std::uint64_t s = 1; s < 10; ++s) {
        const auto d = random_dist1(s);
        const auto scm = product_scm(d);
        EXPECT_EQ(observed_of(scm), d);
        for (int a = 0; a < 2; ++a) {
            EXPECT_EQ(true_effect(scm, Estimand::nde_frechet(Setting::I, a)),
                      mediation_point_estimate(d, Estimand::point_nde(Setting::I, a)));
            EXPECT_EQ(true_effect(scm, Estimand::point_nie(Setting::I, a)),
                      mediation_point_estimate(d, Estimand::point_nie(Setting::I, a)));
        }
    }
}

TEST(ProductScm, SettingTwoMatchesGFormula) {
    for (std::uint64_t s = 1; s < 3; ++s) {
        const auto d = random_dist2(s);
        const auto scm = product_scm(d);
        EXPECT_EQ(observed_of(scm), d);
        for (const auto& e : {Estimand::nde_frechet(Setting::II, 0), Estimand::nde_tchetgen(0),
                              Estimand::nde_tchetgen(1), Estimand::sde(Setting::II, 1)})
            EXPECT_EQ(true_effect(scm, e), product_law_effect(d, e)) << label(e);
    }
}

TEST(SampleCoupling, ReproducesData) {
    for (std::uint64_t s = 1; s < 30; ++s) {
        const auto d1 = random_dist1(s);
        const auto c1 = sample_coupling(d1, s);
        EXPECT_NO_THROW(c1.validate());
        EXPECT_EQ(observed_of(c1), d1);
        const auto d2 = random_dist2(s);
        EXPECT_EQ(observed_of(sample_coupling(d2, s)), d2);
    }
}

TEST(SampleCoupling, OutcomeNeverOne) {
    ObservedDistI<Rational>::Cells c;
    c.fill(0);
    c[cell_index(0, 0, 0)] = q(1, 3);
    c[cell_index(0, 1, 0)] = q(2, 3);
    c[cell_index(0, 0, 1)] = q(1, 2);
    c[cell_index(0, 1, 1)] = q(1, 2);
    const auto d = ObservedDistI<Rational>::from_cells(c);
    for (std::uint64_t s = 0; s < 20; ++s)
        for (int a = 0; a < 2; ++a)
            EXPECT_EQ(true_effect(sample_coupling(d, s), Estimand::nde_frechet(Setting::I, a)), 0);
}

TEST(SampleCoupling, UndefinedConditionalThrows) {
    ObservedDistI<Rational>::Cells c;
    c.fill(0);
    c[cell_index(0, 0, 0)] = q(1, 2);
    c[cell_index(0, 1, 0)] = q(1, 2);
    c[cell_index(0, 1, 1)] = q(1);
    EXPECT_THROW(sample_coupling(ObservedDistI<Rational>::from_cells(c), 1), UndefinedConditional);
}

TEST(SampleCoupling, InsideFrechetBounds) {
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const auto d = random_dist1(s / 10 + 1);
        const auto scm = sample_coupling(d, s);
        for (int a = 0; a < 2; ++a)
            EXPECT_TRUE(rr_frechet_nde1(d, a).contains(
                true_effect(scm, Estimand::nde_frechet(Setting::I, a))));
    }
}

TEST(SampleCoupling, Deterministic) {
    const auto d = random_dist2(5);
    const auto a = sample_coupling(d, 11), b = sample_coupling(d, 11);
    EXPECT_EQ(a.atoms, b.atoms);
}

TEST(CouplingBounds, InsideClosedForms) {
    for (std::uint64_t s = 1; s < 10; ++s) {
        const auto d1 = random_dist1(s);
        for (int a = 0; a < 2; ++a)
            EXPECT_TRUE(rr_frechet_nde1(d1, a).contains(
                coupling_bounds(d1, Estimand::nde_frechet(Setting::I, a))));
        const auto d2 = random_dist2(s);
        EXPECT_TRUE(frechet_nde000(d2, 0).contains(
            coupling_bounds(d2, Estimand::nde_frechet(Setting::II, 0))));
        EXPECT_TRUE(tchetgen_nde2(d2, 1, 0).contains(coupling_bounds(d2, Estimand::nde_tchetgen(0))));
    }
    EXPECT_THROW(coupling_bounds(random_dist1(1), Estimand::sde(Setting::I, 0)),
                 UnsupportedEstimand);
}

TEST(Suites, SmallRunsHaveNoViolations) {
    for (auto s : {Setting::I, Setting::II}) {
        const auto v = validity_suite(s, 20, 9);
        EXPECT_TRUE(v.ok());
        EXPECT_GT(v.checks, 0u);
        EXPECT_TRUE(sharpness_suite(s, 5, 9).ok());
        EXPECT_TRUE(containment_suite(s, 20, 9).ok());
    }
    EXPECT_TRUE(equivalence_suite<Setting::I>(10, 9).ok());
    EXPECT_TRUE(reduction_suite(20, 9).ok());
}

TEST(Suites, CsvHeaders) {
    std::ostringstream recs, scatter;
    write_records_csv(recs, validity_suite(Setting::I, 2, 1).records);
    EXPECT_EQ(recs.str().substr(0, recs.str().find('\n')), "seed,family,lower,upper,truth,contained");
    write_scatter_csv(scatter, scatter_experiment(3, 1));
    EXPECT_EQ(scatter.str().substr(0, scatter.str().find('\n')),
              "seed,frechet_lo,frechet_hi,gabriel_lo,gabriel_hi");
}

TEST(Scatter, TruthInsideEveryIntersection) {
    const auto r = scatter_experiment(200, 1);
    EXPECT_EQ(r.records.size() + r.skipped, 200u);
    EXPECT_EQ(r.empty_intersections, 0u);
    EXPECT_EQ(r.truth_outside, 0u);
}
