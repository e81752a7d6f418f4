#include "doctest.h"

#include "gibbslab/lattice.hpp"
#include "gibbslab/rng.hpp"

using namespace gibbslab;

TEST_CASE("lattice vector basics") {
    const auto x = LatticeVector::of({1, -2});
    CHECK(x.l1() == 3);
    CHECK(x.dim() == 2);
    const auto y = LatticeVector::of({2, 5});
    CHECK((x + y) == LatticeVector::of({3, 3}));
    CHECK((-x) == LatticeVector::of({-1, 2}));
    CHECK_THROWS_AS(x + LatticeVector::of({1}), ValidationError);
}

TEST_CASE("box conventions") {
    const Box c2 = Box::cube(2, 2);
    CHECK(c2.site_count() == 9);
    CHECK(Box::cube(3, 1).site_count() == 8);
    CHECK(c2.contains(LatticeVector::of({2, 0})));
    CHECK_FALSE(c2.contains(LatticeVector::of({3, 0})));
    CHECK(c2.contains(Box{LatticeVector::of({1, 1}), 1}));
    CHECK_FALSE(c2.contains(Box{LatticeVector::of({1, 1}), 2}));
}

TEST_CASE("translate identity and composition") {
    Rng rng(7, 0);
    Configuration sigma = Configuration::cube(2, 3, 2);
    for (auto& s : sigma.values()) s = static_cast<Symbol>(rng.next_below(2));

    const auto id = translate(sigma, LatticeVector::zero(2));
    CHECK(id.values() == sigma.values());
    CHECK(id.origin() == sigma.origin());

    const auto x = LatticeVector::of({1, 0});
    const auto y = LatticeVector::of({0, 2});
    const auto once = translate(translate(sigma, x), y);
    const auto direct = translate(sigma, x + y);
    CHECK(once.origin() == direct.origin());
    CHECK(once.values() == direct.values());

    // tau_x sigma(y) = sigma(x + y) pointwise
    SiteIterator it(2, 2);
    const auto shifted = translate(sigma, x);
    for (; !it.done(); it.advance()) {
        CHECK(shifted.at(shifted.origin() + *it) == sigma.at(shifted.origin() + *it + x));
    }
}

TEST_CASE("translate of the single-one window example") {
    // 3x3 binary config with one 1 at (0,0); after shifting by (1,0) the
    // [0,1]^2 window reads sigma on rows 1..2, so no 1 remains there
    Configuration sigma = Configuration::cube(2, 2, 2);
    sigma.set(LatticeVector::of({0, 0}), 1);
    const auto shifted = translate(sigma, LatticeVector::of({1, 0}));
    const auto window = restrict_to(shifted, Box::cube(2, 1));
    for (Symbol s : window.values()) CHECK(s == 0);
}

TEST_CASE("restrict basics") {
    Configuration sigma = Configuration::cube(2, 5, 3);
    std::fill(sigma.values().begin(), sigma.values().end(), static_cast<Symbol>(2));
    const auto full = restrict_to(sigma, Box::cube(2, 5));
    CHECK(full.values() == sigma.values());

    const auto single = restrict_to(sigma, Box{LatticeVector::of({3, 4}), 0});
    CHECK(single.site_count() == 1);
    CHECK(single.at(LatticeVector::of({3, 4})) == 2);

    const auto pat = restrict_pattern(sigma, 2);
    CHECK(pat.side() == 2);
    for (Symbol s : pat.values()) CHECK(s == 2);

    CHECK_THROWS_AS(restrict_to(sigma, Box{LatticeVector::of({4, 4}), 3}), ValidationError);
}

TEST_CASE("restrict-translate consistency on random 4x4 fields") {
    Rng rng(1234, 0);
    for (int trial = 0; trial < 50; ++trial) {
        Configuration sigma = Configuration::cube(2, 3, 2);
        for (auto& s : sigma.values()) s = static_cast<Symbol>(rng.next_below(2));
        const int n = 1;
        const int max_shift = 2;  // keep C_n inside the shifted domain
        const auto x = LatticeVector::of({static_cast<int>(rng.next_below(max_shift + 1)),
                                          static_cast<int>(rng.next_below(max_shift + 1))});
        const auto pat = restrict_pattern(translate(sigma, x), n);
        SiteIterator it(2, n);
        for (; !it.done(); it.advance()) {
            CHECK(pat.at(*it) == sigma.at(x + *it));
        }
    }
}

TEST_CASE("pattern_present examples") {
    // constant pattern in a constant field
    Configuration sigma = Configuration::cube(2, 4, 2);
    std::fill(sigma.values().begin(), sigma.values().end(), static_cast<Symbol>(1));
    const Pattern ones = Pattern::constant(2, 1, 2, 1);
    CHECK(pattern_present(ones, sigma, Box::cube(2, 4)));
    // region smaller than any placement
    CHECK_FALSE(pattern_present(ones, sigma, Box::cube(2, 0)));

    // fixed 2x2 pattern in a listed 3x3 configuration: check the 4 placements
    Configuration listed = Configuration::cube(2, 2, 2);
    const int vals[3][3] = {{1, 0, 1}, {0, 1, 0}, {1, 0, 1}};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) listed.set(LatticeVector::of({r, c}), static_cast<Symbol>(vals[r][c]));
    Pattern a(2, 1, 2);
    a.set(LatticeVector::of({0, 0}), 1);
    a.set(LatticeVector::of({0, 1}), 0);
    a.set(LatticeVector::of({1, 0}), 0);
    a.set(LatticeVector::of({1, 1}), 1);
    // placements: (0,0) matches, (0,1) no, (1,0) no, (1,1) matches
    CHECK(pattern_matches_at(a, listed, LatticeVector::of({0, 0})));
    CHECK_FALSE(pattern_matches_at(a, listed, LatticeVector::of({0, 1})));
    CHECK(pattern_matches_at(a, listed, LatticeVector::of({1, 1})));
    CHECK(pattern_present(a, listed, Box::cube(2, 2)));

    Pattern absent(2, 1, 2);
    absent.set(LatticeVector::of({0, 0}), 1);
    absent.set(LatticeVector::of({0, 1}), 1);
    absent.set(LatticeVector::of({1, 0}), 1);
    absent.set(LatticeVector::of({1, 1}), 1);
    CHECK_FALSE(pattern_present(absent, listed, Box::cube(2, 2)));
}

TEST_CASE("pattern_present monotone in the region and translation covariant") {
    Rng rng(99, 3);
    for (int trial = 0; trial < 40; ++trial) {
        Configuration sigma = Configuration::cube(2, 5, 2);
        for (auto& s : sigma.values()) s = static_cast<Symbol>(rng.next_below(2));
        const Pattern a = Pattern::random(2, 1, 2, rng);
        const Box small{LatticeVector::of({1, 1}), 2};
        const Box big{LatticeVector::of({0, 0}), 5};
        if (pattern_present(a, sigma, small)) CHECK(pattern_present(a, sigma, big));

        // covariance: searching the shifted field over the shifted region
        const auto x = LatticeVector::of({1, 1});
        const auto shifted = translate(sigma, x);
        const Box shifted_region{small.origin - x, small.side};
        CHECK(pattern_present(a, sigma, small) == pattern_present(a, shifted, shifted_region));
    }
}

TEST_CASE("torus wrap behaviour") {
    Configuration t = Configuration::torus(2, 3, 2);
    t.set(LatticeVector::of({2, 2}), 1);
    CHECK(t.at(LatticeVector::of({-1, -1})) == 1);
    CHECK(t.at(LatticeVector::of({5, 5})) == 1);

    Pattern corner(2, 1, 2);
    corner.set(LatticeVector::of({0, 0}), 1);
    // without wrap a placement at (2,2) does not fit; with wrap it matches
    CHECK_FALSE(pattern_matches_at(corner, t, LatticeVector::of({2, 2}), false));
    CHECK(pattern_matches_at(corner, t, LatticeVector::of({2, 2}), true));
}

TEST_CASE("pattern serialization round trips") {
    Rng rng(5, 1);
    const Pattern p = Pattern::random(2, 2, 3, rng);
    CHECK(Pattern::from_text(p.to_text()) == p);
    CHECK(Pattern::from_json_string(p.to_json_string()) == p);

    const std::string header_only = "2 1 2\n";
    CHECK_THROWS_AS(Pattern::from_text(header_only), ValidationError);
    CHECK_THROWS_AS(Pattern::from_text("2 1 2\n0 1 0 1 1\n"), ValidationError);
    CHECK_THROWS_AS(Pattern::from_text("2 1 2\n0 1 0 7\n"), ValidationError);
}

TEST_CASE("configuration json round trips for boxes and tori") {
    Rng rng(8, 4);
    Configuration box = Configuration::box(2, LatticeVector::of({-1, 2}), 3, 3);
    for (auto& s : box.values()) s = static_cast<Symbol>(rng.next_below(3));
    const Configuration box2 = Configuration::from_json_string(box.to_json_string());
    CHECK(box2.values() == box.values());
    CHECK(box2.origin() == box.origin());
    CHECK_FALSE(box2.is_torus());

    Configuration t = Configuration::torus(2, 4, 2);
    for (auto& s : t.values()) s = static_cast<Symbol>(rng.next_below(2));
    const Configuration t2 = Configuration::from_json_string(t.to_json_string());
    CHECK(t2.values() == t.values());
    CHECK(t2.is_torus());
    CHECK(t2.content_hash() == t.content_hash());
}

TEST_CASE("pattern hash is stable and content sensitive") {
    Pattern a(2, 1, 2), b(2, 1, 2);
    CHECK(a.hash() == b.hash());
    b.set(LatticeVector::of({0, 0}), 1);
    CHECK(a.hash() != b.hash());
}
