#include "doctest.h"

#include <cmath>

#include "gibbslab/experiments.hpp"

using namespace gibbslab;

TEST_CASE("exponential law experiment structure") {
    const Model m = Model::iid(2, {0.5, 0.5});
    Pattern a(2, 1, 2);
    a.set(LatticeVector::of({0, 0}), 1);
    ExpLawParams p;
    p.n = 1;
    p.replicas = 800;
    p.t_max = 3.0;
    p.seed = 5;
    const auto r = exponential_law_experiment(m, a, p);

    CHECK(r.curve.t.front() == 0.0);
    CHECK(r.curve.survival.front() == 1.0);
    for (std::size_t i = 1; i < r.curve.survival.size(); ++i) {
        CHECK(r.curve.survival[i] <= r.curve.survival[i - 1] + 1e-12);
        CHECK(r.curve.t[i] > r.curve.t[i - 1]);
    }
    CHECK(r.lambda.lambda > 0.0);
    CHECK(r.curve.censor_fraction < 0.01);
    CHECK(r.records.size() == 800);
    for (const auto& rec : r.records) CHECK((rec.censored || rec.value >= 1));

    SUBCASE("lambda_one flag pins the rescaling") {
        ExpLawParams p1 = p;
        p1.lambda_one = true;
        const auto r1 = exponential_law_experiment(m, a, p1);
        CHECK(r1.lambda.lambda == 1.0);
        CHECK(r1.curve.lambda == 1.0);
    }

    SUBCASE("deterministic in the seed") {
        const auto r2 = exponential_law_experiment(m, a, p);
        CHECK(r2.sup_gap == r.sup_gap);
        CHECK(r2.lambda.lambda == r.lambda.lambda);
    }
}

TEST_CASE("repetition law experiment reports bad fractions against the exact mass") {
    const Model m = Model::iid(2, {0.5, 0.5});
    RepetitionLawParams p;
    p.n = 2;
    p.replicas = 1200;
    p.seed = 7;
    p.lambda_aux_replicas = 150;
    const auto r = repetition_law_experiment(m, p);
    CHECK(r.bad_mass_exact == doctest::Approx(14.0 / 512).epsilon(1e-12));
    const double se = std::sqrt(r.bad_mass_exact * (1 - r.bad_mass_exact) / 1200.0);
    CHECK(std::abs(r.bad_fraction - r.bad_mass_exact) < 4 * se);
    CHECK(r.curve.survival.front() == 1.0);
    for (std::size_t i = 1; i < r.curve.survival.size(); ++i)
        CHECK(r.curve.survival[i] <= r.curve.survival[i - 1] + 1e-12);
    CHECK(r.good_replicas > 1100);
}

TEST_CASE("entropy estimator handles the degenerate single-symbol alphabet") {
    const Model m = Model::iid(2, {1.0});
    EntropyViaRepetitionParams p;
    p.n_range = {1, 2};
    p.replicas = 10;
    const auto r = entropy_via_repetition(m, p);
    CHECK(r.target == 0.0);
    for (const auto& row : r.rows) {
        CHECK(row.estimate == 0.0);
        CHECK(row.estimate_raw == 0.0);
    }
}

TEST_CASE("waiting time of a model against itself targets its entropy") {
    const Model m = Model::iid(2, {0.5, 0.5});
    WaitingTimeParams p;
    p.n_range = {1, 2};
    p.replicas = 200;
    p.seed = 9;
    const auto r = waiting_time_experiment(m, m, p);
    CHECK(r.target == doctest::Approx(std::log(2.0)).epsilon(1e-10));  // s(Q|Q) = 0
    CHECK(r.rows.size() == 2);
    CHECK(r.rows.back().censor_fraction < 0.01);
}

TEST_CASE("clt experiment") {
    SUBCASE("uniform iid is degenerate") {
        const Model u = Model::iid(2, {0.5, 0.5});
        CltParams p;
        p.n = 6;
        p.replicas = 300;
        const auto r = clt_experiment(u, p);
        CHECK(r.theta2_target == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(r.sample_variance < 1e-12);
        CHECK(r.ks_pvalue == 1.0);
    }

    SUBCASE("bernoulli theta^2 equals the closed form via the pressure oracle") {
        const Model m = Model::iid(2, {0.3, 0.7});
        CltParams p;
        p.n = 8;
        p.replicas = 400;
        const auto r = clt_experiment(m, p);
        const double closed = 0.21 * std::pow(std::log(7.0 / 3.0), 2);
        CHECK(r.theta2_target == doctest::Approx(closed).epsilon(1e-4));
        CHECK(r.theta2_residual < 1e-4);
        CHECK(std::abs(r.sample_variance / r.theta2_target - 1.0) < 6.0 * std::sqrt(2.0 / 400));
    }
}

TEST_CASE("ldp cumulant structure") {
    const Model m = Model::iid(1, {0.4, 0.6});
    LdpParams p;
    p.q_grid = {-1.5, -1.0, -0.5, 0.0, 0.5, 1.0};
    p.n_range = {3, 4};
    p.replicas = 400;
    p.seed = 13;
    const auto r = ldp_cumulant(m, m, p);

    SUBCASE("W(0) vanishes exactly and the predicted curve is continuous at -1") {
        for (const auto& c : r.curves)
            for (const auto& pt : c.points)
                if (pt.q == 0.0) {
                    CHECK(pt.empirical == 0.0);
                    CHECK(pt.predicted == 0.0);
                }
        CHECK(r.continuity_gap_at_minus1 <= 1e-12);
    }

    SUBCASE("empirical cumulant is monotone in q at fixed n for q >= 0") {
        for (const auto& c : r.curves) {
            double prev = -1e9;
            for (const auto& pt : c.points) {
                if (pt.q < 0.0) continue;
                CHECK(pt.empirical >= prev - 1e-12);
                prev = pt.empirical;
            }
        }
    }

    SUBCASE("the pattern-sum identity holds exactly for iid") {
        for (const auto& c : r.curves)
            for (const auto& pt : c.points)
                if (pt.q >= -1.0) CHECK(pt.pattern_sum_check < 1e-9);
    }

    SUBCASE("prediction for q < -1 is the plateau") {
        const double plateau = r.pressure_2u - 2.0 * r.pressure_u;
        for (const auto& c : r.curves)
            for (const auto& pt : c.points)
                if (pt.q < -1.0) CHECK(pt.predicted == doctest::Approx(plateau).epsilon(1e-12));
    }
}

TEST_CASE("rate function variants") {
    const Model m = Model::iid(2, {0.4, 0.6});
    const double s = model_entropy(m);
    RateFunctionParams full;
    full.u_grid = {s - 0.1, s, s + 0.1};
    const auto rf = rate_function(m, full);

    RateFunctionParams restricted = full;
    restricted.restrict_above_minus1 = true;
    const auto rr = rate_function(m, restricted);

    REQUIRE(rf.points.size() == rr.points.size());
    for (std::size_t i = 0; i < rf.points.size(); ++i) {
        CHECK(rr.points[i].value <= rf.points[i].value + 1e-9);
        CHECK(rf.points[i].value >= -1e-12);
    }
    CHECK(rf.convex_on_grid);
}

TEST_CASE("strong approximation window fractions grow with n") {
    const Model m = Model::iid(2, {0.5, 0.5});
    const auto rows = strong_approximation_window(m, {2, 3}, 300, 4.0, 3, 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].fraction_inside > rows[0].fraction_inside);
    CHECK(rows[1].fraction_inside > 0.9);
}

TEST_CASE("survival curve csv format") {
    SurvivalCurve c;
    c.t = {0.0, 1.0};
    c.survival = {1.0, 0.4};
    c.ci = {0.0, 0.02};
    const std::string csv = survival_curve_csv(c);
    CHECK(csv.rfind("t,S,ci\n", 0) == 0);
    CHECK(csv.find("1,0.4") != std::string::npos);
}
