#include "doctest.h"

#include "oscbound/cz.hpp"
#include "oscbound/error.hpp"
#include "oscbound/oscillation.hpp"

#include <cmath>
#include <random>

using namespace oscbound;

namespace {

GridFunction random_nonneg(std::mt19937_64& rng, std::vector<std::size_t> ext) {
    std::size_t cells = 1;
    for (auto e : ext) cells *= e;
    std::vector<double> v(cells);
    std::lognormal_distribution<double> logn(0.0, 1.2);
    for (auto& x : v) x = (rng() % 3 == 0) ? 0.0 : logn(rng);
    return GridFunction(std::move(ext), 1.0 / static_cast<double>(ext[0]), std::move(v));
}

}  // namespace

TEST_SUITE("cz") {
    TEST_CASE("level from t") {
        CHECK(level_from_t(GridFunction::constant({4, 4}, 0.25, 3.0), 0.3) == doctest::Approx(3.0));
        GridFunction g({4}, 0.25, {1, 3, 0, 1});
        CHECK(level_from_t(g, 0.5) == doctest::Approx(2.0));
        CHECK(level_from_t(g, 1.0) == doctest::Approx(1.25));
        CHECK_THROWS_AS(level_from_t(g, 0.0), Error);
        CHECK_THROWS_AS(level_from_t(g, 1.5), Error);
        CHECK_THROWS_AS(level_from_t(GridFunction({2}, 0.5, {1, -1}), 0.5), Error);
    }

    TEST_CASE("dyadic examples") {
        CHECK(dyadic_cz(GridFunction::constant({8}, 0.125, 0.0), 1.0).pairs.empty());
        GridFunction g({4}, 0.25, {4, 0, 0, 0});
        const auto d = dyadic_cz(g, 2.0);
        REQUIRE(d.pairs.size() == 1);
        CHECK(d.pairs[0].selected.lo[0] == 0.0);
        CHECK(d.pairs[0].selected.hi[0] == 1.0);
        CHECK(d.pairs[0].parent.hi[0] == 2.0);
        const auto v = validate_cz(g, d);
        CHECK(v.ok);
        CHECK(v.measured_c == 2.0);
        CHECK_THROWS_AS(dyadic_cz(g, 0.5), Error);
    }

    TEST_CASE("bisection examples") {
        GridFunction g({4}, 0.25, {4, 0, 0, 0});
        const auto d = bisection_cz_level(g, 2.0);
        REQUIRE(d.pairs.size() == 1);
        CHECK(d.pairs[0].selected.lo[0] == 0.0);
        CHECK(d.pairs[0].selected.hi[0] == 2.0);
        CHECK(d.pairs[0].parent.hi[0] == 4.0);
        CHECK(validate_cz(g, d).ok);
        // Any t in (1/4, 1/2] gives level 2 with this base.
        const auto same = bisection_cz(g, 0.5, BaseTiling::Coarsest);
        CHECK(same.gamma == doctest::Approx(2.0));
        CHECK(same.pairs.size() == 1);

        const auto flat = GridFunction::constant({4, 4}, 0.25, 1.0);
        CHECK(bisection_cz_level(flat, 2.0).pairs.empty());
        CHECK_THROWS_AS(bisection_cz(g, 2.0), Error);
    }

    TEST_CASE("rising sun examples") {
        const auto a = rising_sun_1d(GridFunction({4}, 0.25, {2, 0, 2, 0}), 1.0);
        REQUIRE(a.pairs.size() == 1);
        CHECK(a.pairs[0].selected.lo[0] == 0.0);
        CHECK(a.pairs[0].selected.hi[0] == doctest::Approx(4.0));
        CHECK(a.c_star == 1.0);

        GridFunction b({3}, 1.0 / 3, {3, 0, 0});
        const auto rb = rising_sun_1d(b, 1.5);
        REQUIRE(rb.pairs.size() == 1);
        CHECK(rb.pairs[0].selected.hi[0] == doctest::Approx(2.0));
        CHECK(validate_cz(b, rb).ok);

        CHECK(rising_sun_1d(GridFunction({4}, 0.25, {1, 0.5, 0.2, 0}), 1.0).pairs.empty());
        CHECK_THROWS_AS(rising_sun_1d(GridFunction({2}, 0.5, {3, 3}), 1.0), Error);
        CHECK_THROWS_AS(rising_sun_1d(GridFunction::constant({2, 2}, 0.5, 0.0), 1.0), Error);

        const auto right = rising_sun_1d(GridFunction({3}, 1.0 / 3, {0, 0, 2}), 1.0);
        REQUIRE(right.pairs.size() == 1);
        CHECK(right.pairs[0].selected.lo[0] == doctest::Approx(1.0));
        CHECK(right.pairs[0].selected.hi[0] == doctest::Approx(3.0));
    }

    TEST_CASE("validator catches tampering") {
        GridFunction g({4}, 0.25, {4, 0, 0, 0});
        auto d = bisection_cz_level(g, 2.0);
        d.pairs[0].selected.lo[0] = 2.0;
        d.pairs[0].selected.hi[0] = 4.0;
        const auto v = validate_cz(g, d);
        CHECK_FALSE(v.ok);
        CHECK(v.clause == "ii");

        GridFunction h({8}, 0.125, {4, 4, 4, 4, 0, 0, 0, 0});
        auto two = bisection_cz_level(h, 2.0);
        REQUIRE(two.pairs.size() == 1);
        two.pairs.push_back(two.pairs[0]);
        const auto w = validate_cz(h, two);
        CHECK_FALSE(w.ok);
        CHECK(w.clause == "disjoint");

        auto uncovered = bisection_cz_level(h, 2.0);
        uncovered.pairs.clear();
        CHECK(validate_cz(h, uncovered).clause == "iii");
    }

    TEST_CASE("random decompositions validate") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            const auto g = random_nonneg(rng, {16, 16});
            const double t = 1.0 / 256 + u(rng) * 0.5;
            const auto b = bisection_cz(g, t);
            const auto vb = validate_cz(g, b);
            CHECK(vb.ok);
            CHECK(vb.measured_c <= 2.0);
            const double gamma = level_from_t(g, std::max(t, 0.25));
            const auto d = dyadic_cz(g, std::max(gamma, box_mean(g, Box::from_cells(g.domain()))));
            CHECK(validate_cz(g, d).ok);
            // Any cube of measure >= t has mean at most the level.
            CHECK(box_mean(g, Box::from_cells(IndexBox{2, {0, 0}, {16, 16}})) <= b.gamma + 1e-12);

            const auto line = random_nonneg(rng, {64});
            const double mean = box_mean(line, Box::from_cells(line.domain()));
            const auto rs = rising_sun_1d(line, mean + u(rng) * 2.0);
            const auto vr = validate_cz(line, rs);
            CHECK(vr.ok);
            CHECK(vr.equal_mean_error <= 1e-12);
        }
    }

    TEST_CASE("json output") {
        GridFunction g({4}, 0.25, {4, 0, 0, 0});
        const auto j = bisection_cz_level(g, 2.0).to_json(g);
        CHECK(j["c_star"] == 2.0);
        CHECK(j["pairs"].size() == 1);
    }
}
