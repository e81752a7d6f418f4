#include "doctest.h"

#include <cmath>

#include "gibbslab/exact.hpp"
#include "gibbslab/rng.hpp"

using namespace gibbslab;

TEST_CASE("partition function closed forms") {
    SUBCASE("zero interaction on C_1 in d=2: log 16") {
        const Interaction u(2, 2, {});
        const double lz = log_partition_function(u, Box::cube(2, 1), BoundaryCondition::Free());
        CHECK(lz == doctest::Approx(std::log(16.0)).epsilon(1e-12));
    }

    SUBCASE("single site with a field: log(2 cosh(bh))") {
        const double beta = 0.8, h = 0.6;
        const Interaction u = make_ising_interaction(1, beta, 0.0, h);
        const double lz = log_partition_function(u, Box::cube(1, 0), BoundaryCondition::Free());
        CHECK(lz == doctest::Approx(std::log(2.0 * std::cosh(beta * h))).epsilon(1e-12));
    }

    SUBCASE("uniform energy shift moves log Z by -c * placements") {
        const Interaction u = make_ising_interaction(2, 0.3, 1.0, 0.0);
        const double c = 0.37;
        std::vector<InteractionTerm> shifted_terms = u.terms();
        for (auto& t : shifted_terms)
            for (auto& v : t.table) v += c;
        const Interaction shifted(2, 2, std::move(shifted_terms));
        const Box vol = Box::cube(2, 2);
        // 2 axes * 6 in-volume bonds each
        const double placements = 12.0;
        const double a = log_partition_function(u, vol, BoundaryCondition::Free());
        const double b = log_partition_function(shifted, vol, BoundaryCondition::Free());
        CHECK(b == doctest::Approx(a - c * placements).epsilon(1e-10));
    }

    SUBCASE("budget guard") {
        const Interaction u(2, 2, {});
        CHECK_THROWS_AS(log_partition_function(u, Box::cube(2, 5), BoundaryCondition::Free()), BudgetExceeded);
    }
}

TEST_CASE("pressure estimates") {
    SUBCASE("zero interaction: log |A| exactly at every size") {
        const Interaction u(2, 3, {});
        const auto est = pressure_enumeration(u, {1, 2});
        for (const auto& [n, v] : est.sequence) CHECK(v == doctest::Approx(std::log(3.0)).epsilon(1e-12));
        CHECK(est.value == doctest::Approx(std::log(3.0)).epsilon(1e-10));
    }

    SUBCASE("iid interaction has zero pressure") {
        const auto est = pressure_auto(make_iid_interaction(2, {0.3, 0.7}));
        CHECK(est.exact);
        CHECK(est.value == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("1d ising: log(2 cosh(bJ)) from the 2x2 transfer matrix") {
        const double bJ = 0.45;
        const auto est = pressure_transfer_matrix(make_ising_interaction(1, bJ, 1.0, 0.0), {1});
        CHECK(est.value == doctest::Approx(std::log(2.0 * std::cosh(bJ))).epsilon(1e-10));
    }

    SUBCASE("2d ising at bJ=0.2: enumeration and strips agree within 1e-3") {
        const Interaction u = make_ising_interaction(2, 0.2, 1.0, 0.0);
        const auto strips = pressure_transfer_matrix(u, {8, 9, 10});
        const auto boxes = pressure_enumeration(u, {2, 3});
        CHECK(std::abs(strips.value - boxes.value) < 1e-3);
        // Onsager's closed form, log 2 + (1/(8 pi^2)) Int Int log[cosh^2(2K)
        // - sinh(2K)(cos u + cos v)], evaluated by midpoint quadrature at
        // K = 0.2: 0.734530812276
        CHECK(strips.value == doctest::Approx(0.734530812276).epsilon(1e-8));
    }

    SUBCASE("markov product interaction has zero pressure via strips") {
        const auto est = pressure_auto(Model::markov_product({{0.9, 0.1}, {0.4, 0.6}}).interaction());
        CHECK(std::abs(est.value) < 1e-9);
    }
}

TEST_CASE("exact pattern probabilities") {
    SUBCASE("iid uniform binary 1-pattern: 1/16") {
        const Model m = Model::iid(2, {0.5, 0.5});
        const auto br = exact_pattern_probability(m, Pattern::constant(2, 1, 2, 1));
        CHECK(br.point == doctest::Approx(1.0 / 16).epsilon(1e-12));
        CHECK(br.lo == br.hi);
    }

    SUBCASE("iid bernoulli: p^k (1-p)^(m-k)") {
        const double p1 = 0.7;
        const Model m = Model::iid(2, {1 - p1, p1});
        Pattern a(2, 1, 2);
        a.set(LatticeVector::of({0, 1}), 1);
        a.set(LatticeVector::of({1, 0}), 1);
        const auto br = exact_pattern_probability(m, a);
        CHECK(br.point == doctest::Approx(p1 * p1 * (1 - p1) * (1 - p1)).epsilon(1e-12));
    }

    SUBCASE("2d ising all-plus 1-pattern on the 4x4 torus") {
        const Model m = Model::ising(2, 0.2, 1.0, 0.0);
        const auto br = exact_pattern_probability(m, Pattern::constant(2, 1, 2, 1), 4);
        // independent check: the marginal must sit inside the boundary
        // bracket and the bracket must be nontrivial
        CHECK(br.lo <= br.point + 1e-12);
        CHECK(br.point <= br.hi + 1e-12);
        CHECK(br.lo > 0.0);
        CHECK(br.hi < 1.0);
        // symmetry: all-plus and all-minus have equal probability at h=0
        const auto br0 = exact_pattern_probability(m, Pattern::constant(2, 1, 2, 0), 4);
        CHECK(br.point == doctest::Approx(br0.point).epsilon(1e-10));
        // and beats the iid value since bJ > 0 favours alignment
        CHECK(br.point > 1.0 / 16);
    }
}

TEST_CASE("mixing probe") {
    SUBCASE("iid models are exactly uncorrelated") {
        const Model m = Model::iid(2, {0.4, 0.6});
        const Box a1{LatticeVector::of({0, 0}), 1};
        const Box a2{LatticeVector::of({0, 4}), 1};
        CHECK(mixing_phi_probe(m, a1, a2) == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("markov product single-site probe decays like the second eigenvalue") {
        // two-state chain with eigenvalue lambda2 = 1 - a - b
        const double a = 0.2, b = 0.1;
        const Model m = Model::markov_product({{1 - a, a}, {b, 1 - b}});
        const double l2 = 1.0 - a - b;
        std::vector<double> probes;
        for (int gap : {2, 3, 4}) {
            const Box a1{LatticeVector::of({0, 0}), 0};
            const Box a2{LatticeVector::of({0, gap}), 0};
            probes.push_back(mixing_phi_probe(m, a1, a2));
        }
        CHECK(probes[1] / probes[0] == doctest::Approx(l2).epsilon(1e-6));
        CHECK(probes[2] / probes[1] == doctest::Approx(l2).epsilon(1e-6));
        for (double v : probes) CHECK(v <= 1.0);
    }

    SUBCASE("vertically separated boxes in a markov product are independent") {
        const Model m = Model::markov_product({{0.9, 0.1}, {0.4, 0.6}});
        const Box a1{LatticeVector::of({0, 0}), 0};
        const Box a2{LatticeVector::of({3, 0}), 0};
        CHECK(mixing_phi_probe(m, a1, a2) == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("gibbs probe is positive and below 1") {
        const Model m = Model::ising(2, 0.2, 1.0, 0.0);
        const Box a1{LatticeVector::of({0, 0}), 0};
        const Box a2{LatticeVector::of({0, 2}), 0};
        const double v = mixing_phi_probe(m, a1, a2, 4);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("entropy and relative entropy") {
    CHECK(model_entropy(Model::iid(2, {0.5, 0.5})) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(model_entropy(Model::iid(2, {0.3, 0.7})) == doctest::Approx(0.6108643).epsilon(1e-6));

    SUBCASE("markov product entropy rate") {
        const std::vector<std::vector<double>> t = {{0.9, 0.1}, {0.4, 0.6}};
        const auto pi = markov_stationary(t);
        double expect = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                expect -= pi[static_cast<std::size_t>(a)] * t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] *
                          std::log(t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
        CHECK(model_entropy(Model::markov_product(t)) == doctest::Approx(expect).epsilon(1e-9));
    }

    SUBCASE("relative entropy of a model to itself vanishes") {
        const Model m = Model::iid(2, {0.3, 0.7});
        CHECK(relative_entropy(m, m) == doctest::Approx(0.0).epsilon(1e-10));
    }

    SUBCASE("iid relative entropy equals the kl divergence") {
        const Model q = Model::iid(2, {0.5, 0.5});
        const Model p = Model::iid(2, {0.3, 0.7});
        const double kl = 0.5 * std::log(0.5 / 0.3) + 0.5 * std::log(0.5 / 0.7);
        CHECK(relative_entropy(q, p) == doctest::Approx(kl).epsilon(1e-10));
        CHECK(relative_entropy(q, p) >= 0.0);
    }

    SUBCASE("gibbs entropy via pressure identity stays near log 2 at high temperature") {
        const double s = model_entropy(Model::ising(2, 0.1, 1.0, 0.0));
        CHECK(s < std::log(2.0));
        CHECK(s > 0.9 * std::log(2.0));
    }
}

TEST_CASE("pattern-sum cumulant identity for iid") {
    const Model m = Model::iid(2, {0.4, 0.6});
    for (double q : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        const double lhs = log_sum_pattern_prob_power(m, 2, q) / 9.0;
        const double rhs = std::log(std::pow(0.4, 1 - q) + std::pow(0.6, 1 - q));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("brute force hitting law: iid uniform binary, n=1, K=2") {
    const Model m = Model::iid(2, {0.5, 0.5});
    Pattern a(2, 1, 2);
    a.set(LatticeVector::of({0, 0}), 1);  // single one in the corner

    const auto t = brute_force_hitting_law(m, a, 2);
    REQUIRE(t.prob.size() == 3);
    CHECK(t.states_enumerated == 65536);

    SUBCASE("structural facts") {
        CHECK(t.prob[0] == 0.0);  // no nonzero x fits in [0,0]^2
        CHECK(t.prob[1] <= t.prob[2]);
        CHECK(std::exp(t.log_prob_pattern) == doctest::Approx(1.0 / 16).epsilon(1e-12));
        // with the origin included the k=0 entry is the pattern probability
        CHECK(t.prob_with_origin[0] == doctest::Approx(1.0 / 16).epsilon(1e-12));
    }

    SUBCASE("moment identities from the same enumeration") {
        for (int k = 0; k <= 2; ++k) {
            const double placements = std::pow(k + 1.0, 2);
            CHECK(t.mean_count[static_cast<std::size_t>(k)] ==
                  doctest::Approx(placements / 16.0).epsilon(1e-10));
            // volume estimate with |V| = (k+n+1)^d
            const double vol = std::pow(k + 2.0, 2);
            CHECK(t.prob[static_cast<std::size_t>(k)] <= vol / 16.0 + 1e-12);
            // Cauchy-Schwarz second-moment bound on the origin-inclusive law
            if (t.second_moment[static_cast<std::size_t>(k)] > 0) {
                const double bound = t.mean_count[static_cast<std::size_t>(k)] *
                                     t.mean_count[static_cast<std::size_t>(k)] /
                                     t.second_moment[static_cast<std::size_t>(k)];
                CHECK(t.prob_with_origin[static_cast<std::size_t>(k)] >= bound - 1e-12);
            }
        }
    }

    SUBCASE("frozen values from this enumeration") {
        // k=1 cross-checked by hand inclusion-exclusion: three placements of
        // mass 1/16, one compatible pair of mass 2^-7
        CHECK(t.prob[1] == doctest::Approx(3.0 / 16 - 1.0 / 128).epsilon(1e-12));
        // k=2 frozen from the enumeration itself: 28048/65536
        CHECK(t.prob[2] == doctest::Approx(28048.0 / 65536).epsilon(1e-12));
    }

    SUBCASE("gibbs sandwich with conditional surprisal constants") {
        const auto [pmin, pmax] = conditional_probability_range(m.interaction());
        CHECK(pmin == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(pmax == doctest::Approx(0.5).epsilon(1e-12));
        const double c = -std::log(pmax), cp = -std::log(pmin);
        const double pr = std::exp(t.log_prob_pattern);
        CHECK(pr <= std::exp(-c * 4.0) + 1e-12);
        CHECK(pr >= std::exp(-cp * 4.0) - 1e-12);
    }
}

TEST_CASE("hitting law for a biased iid model keeps the invariants") {
    const Model m = Model::iid(2, {0.3, 0.7});
    Rng rng(2024, 0);
    for (int trial = 0; trial < 3; ++trial) {
        const Pattern a = Pattern::random(2, 1, 2, rng);
        const auto t = brute_force_hitting_law(m, a, 2);
        const double pr = std::exp(t.log_prob_pattern);
        for (int k = 0; k <= 2; ++k) {
            CHECK(t.mean_count[static_cast<std::size_t>(k)] ==
                  doctest::Approx(std::pow(k + 1.0, 2) * pr).epsilon(1e-9));
            if (k > 0) CHECK(t.prob[static_cast<std::size_t>(k)] >= t.prob[static_cast<std::size_t>(k - 1)] - 1e-15);
            CHECK(t.prob[static_cast<std::size_t>(k)] <= std::pow(k + 2.0, 2) * pr + 1e-12);
        }
    }
}

TEST_CASE("hitting law under a gibbs model via torus enumeration") {
    // n=0 single-site pattern keeps the torus budget small
    const Model m = Model::ising(2, 0.15, 1.0, 0.0);
    Pattern a(2, 0, 2);
    a.set(LatticeVector::of({0, 0}), 1);
    const auto t = brute_force_hitting_law(m, a, 1);
    CHECK(t.prob[0] == 0.0);
    CHECK(t.prob[1] > 0.0);
    CHECK(t.prob[1] <= 1.0);
    const double pr = std::exp(t.log_prob_pattern);
    CHECK(pr == doctest::Approx(0.5).epsilon(1e-9));  // spin symmetry at h=0
    CHECK(t.mean_count[1] == doctest::Approx(4.0 * pr).epsilon(1e-9));
}
