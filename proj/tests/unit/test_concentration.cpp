#include "doctest.h"

#include "oscbound/concentration.hpp"
#include "oscbound/error.hpp"
#include "oscbound/oscillation.hpp"

#include <bit>
#include <cmath>
#include <random>

using namespace oscbound;

TEST_SUITE("concentration") {
    TEST_CASE("bounded differences") {
        std::vector<double> parity(16), first(16), sum(16);
        for (std::size_t x = 0; x < 16; ++x) {
            parity[x] = 2.5 * static_cast<double>(std::popcount(x) % 2);
            first[x] = static_cast<double>(x & 1);
            sum[x] = static_cast<double>(std::popcount(x));
        }
        CHECK(bounded_differences({4, parity}) == std::vector<double>(4, 2.5));
        CHECK(bounded_differences({4, first}) == std::vector<double>{1, 0, 0, 0});
        CHECK(bounded_differences({4, sum}) == std::vector<double>(4, 1.0));
    }

    TEST_CASE("check examples") {
        const auto c = check_concentration({2, {0, 1, 1, 2}});
        CHECK(c.mean == doctest::Approx(1.0));
        CHECK(c.lhs == doctest::Approx(0.5));
        CHECK(c.rhs == doctest::Approx(std::sqrt(2.0) / 2));
        const auto k = check_concentration({3, std::vector<double>(8, 7.0)});
        CHECK(k.lhs == 0.0);
        CHECK(k.rhs == 0.0);
        const auto biased = check_concentration({1, {0, 1}, 0.25});
        CHECK(biased.mean == doctest::Approx(0.25));
        CHECK(biased.lhs == doctest::Approx(0.375));
    }

    TEST_CASE("invalid instances") {
        CHECK_THROWS_AS(ConcentrationInstance(2, {0, 1, 2}), Error);
        CHECK_THROWS_AS(ConcentrationInstance(1, {0, 1}, 1.5), Error);
        CHECK_THROWS_AS(ConcentrationInstance(1, {0, NAN}), Error);
        CHECK_THROWS_AS(ConcentrationInstance(21, {}), Error);
    }

    TEST_CASE("random instances") {
        std::mt19937_64 rng(10);
        std::normal_distribution<double> gauss;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> t(1024);
            for (auto& x : t) x = gauss(rng);
            const ConcentrationInstance inst(10, t, trial % 2 ? 0.5 : u(rng));
            const auto c = check_concentration(inst);
            CHECK(c.lhs <= c.rhs + 1e-12);
            const auto back = ConcentrationInstance::from_json(inst.to_json());
            CHECK(back.table == inst.table);
            CHECK(back.p == inst.p);
        }
    }

    TEST_CASE("subcube gadget") {
        const auto k = subcube_gadget(GridFunction::constant({4, 8}, 0.125, 2.0), IndexBox{2, {0, 0}, {4, 8}});
        for (double v : k.table) CHECK(v == 2.0);
        GridFunction f({2}, 0.5, {1, 0});
        const auto g = subcube_gadget(f, f.domain());
        CHECK(g.m == 1);
        CHECK(g.table == std::vector<double>{1, 0});
        CHECK(check_concentration(g).mean == doctest::Approx(0.5));
        CHECK_THROWS_AS(subcube_gadget(GridFunction::constant({4, 4}, 0.25, 1.0), IndexBox{2, {0, 0}, {1, 3}}), Error);

        std::mt19937_64 rng(3);
        std::normal_distribution<double> gauss;
        BasisDescriptor w;
        w.family = BasisFamily::FalseCubes;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> v(8 * 8 * 4);
            for (auto& x : v) x = gauss(rng);
            GridFunction h({8, 8, 4}, 0.125, v);
            const IndexBox r{3, {0, 0, 0}, {8, 8, 4}};
            const auto inst = subcube_gadget(h, r);
            CHECK(inst.m == 2);
            CHECK(check_concentration(inst).mean == doctest::Approx(box_mean(h, Box::from_cells(r))));
            const double bmo = bmo_seminorm(h, w).value;
            for (double a : bounded_differences(inst)) CHECK(a <= 4.0 * bmo + 1e-12);
        }
    }
}
