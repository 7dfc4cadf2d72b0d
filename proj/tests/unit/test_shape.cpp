#include "doctest.h"

#include "oscbound/basis.hpp"
#include "oscbound/equivalence.hpp"
#include "oscbound/error.hpp"
#include "oscbound/shape.hpp"
#include "oscbound/sphere.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace oscbound;
using std::numbers::pi;

TEST_SUITE("shape") {
    TEST_CASE("unit ball volumes") {
        CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
        CHECK(unit_ball_volume(2) == doctest::Approx(pi));
        CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * pi / 3.0));
        CHECK(unit_ball_volume(4) == doctest::Approx(pi * pi / 2.0));
    }

    TEST_CASE("cap fractions") {
        CHECK(cap_fraction(2, pi / 6) == doctest::Approx(1.0 / 6.0));
        CHECK(cap_fraction(3, pi / 3) == doctest::Approx(0.25));
        for (std::size_t n = 1; n <= 7; ++n) {
            CHECK(cap_fraction(n, pi / 2) == doctest::Approx(0.5).epsilon(1e-9));
        }
        // n = 4: (alpha - sin(alpha) cos(alpha)) / pi.
        const double a = 0.7;
        CHECK(cap_fraction(4, a) == doctest::Approx((a - std::sin(a) * std::cos(a)) / pi).epsilon(1e-9));
    }

    TEST_CASE("sector measure") {
        const auto a = make_sector({1.0, 0.0}, 0.5, pi / 6);
        CHECK(sector_measure(a) == doctest::Approx(pi / 3));
        // Half-space cone with rho = |x| = r is half a ball of radius 2r.
        for (std::size_t n = 1; n <= 4; ++n) {
            std::vector<double> x(n, 0.0);
            x[0] = 0.75;
            const auto s = make_sector(x, 0.75, pi / 2);
            CHECK(sector_measure(s) ==
                  doctest::Approx(0.5 * unit_ball_volume(n) * std::pow(1.5, n)).epsilon(1e-9));
        }
        CHECK(sector_measure(make_ball({0.0, 0.0, 0.0}, 2.0)) == doctest::Approx(32.0 * pi / 3));
        CHECK_THROWS_AS(sector_measure(make_cube(std::vector<double>{0.0, 0.0}, 1.0)), Error);
    }

    TEST_CASE("sector membership") {
        const auto a = make_sector({1.0, 0.0}, 0.5, pi / 6);
        CHECK(contains(a, std::vector<double>{1.0, 0.0}));
        CHECK(contains(a, std::vector<double>{1.2, 0.3}));
        CHECK_FALSE(contains(a, std::vector<double>{1.0, 0.7}));
        CHECK_FALSE(contains(a, std::vector<double>{0.4, 0.0}));
        CHECK(in_basis_a(a));
        CHECK_FALSE(in_basis_a(make_sector({1.0, 0.0}, 0.4, pi / 6)));
    }

    TEST_CASE("invalid shapes") {
        CHECK_THROWS_AS(make_ball({0.0}, 0.0), Error);
        CHECK_THROWS_AS(make_sector({0.0, 0.0}, 0.1, 0.5), Error);
        CHECK_THROWS_AS(make_sector({1.0, 0.0}, 1.5, 0.5), Error);
        CHECK_THROWS_AS(make_sector({1.0, 0.0}, 0.5, 2.0), Error);
    }

    TEST_CASE("JSON round trip") {
        const std::vector<Shape> shapes{make_box(std::vector<double>{0, 1}, std::vector<double>{2, 3}),
                                        make_ball({0.5, 0.5}, 0.25),
                                        make_sector({1.0, 1.0}, 0.5, 0.3)};
        for (const auto& s : shapes) {
            const auto back = shape_from_json(shape_to_json(s));
            CHECK(back.index() == s.index());
            CHECK(measure(back) == doctest::Approx(measure(s)));
        }
    }
}

TEST_SUITE("basis") {
    TEST_CASE("interval count on four cells") {
        BasisDescriptor q;
        const std::vector<std::size_t> ext{4};
        CHECK(count_shapes(q, ext) == 10);
    }

    TEST_CASE("false cubes on a 2x2 grid") {
        BasisDescriptor w;
        w.family = BasisFamily::FalseCubes;
        const std::vector<std::size_t> ext{2, 2};
        CHECK(count_shapes(w, ext) == 7);
        BasisDescriptor r;
        r.family = BasisFamily::Rectangles;
        CHECK(count_shapes(r, ext) == 9);
    }

    TEST_CASE("balls and sectors are not cell-enumerable") {
        BasisDescriptor b;
        b.family = BasisFamily::Sectors;
        GridFunction f({2, 2}, 1.0, {0, 0, 0, 0});
        try {
            enumerate_basis(b, f);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NotCellEnumerable);
        }
    }

    TEST_CASE("false-cube family contains cubes and is closed under bisection") {
        for (const auto& ext : {std::vector<std::size_t>{8, 6}, std::vector<std::size_t>{4, 4, 4}}) {
            BasisDescriptor q;
            BasisDescriptor w;
            w.family = BasisFamily::FalseCubes;
            std::set<std::vector<std::size_t>> all;
            auto key = [](const IndexBox& b) {
                std::vector<std::size_t> k;
                for (std::size_t a = 0; a < b.dim; ++a) {
                    k.push_back(b.lo[a]);
                    k.push_back(b.hi[a]);
                }
                return k;
            };
            std::size_t count = 0;
            for_each_shape(w, ext, [&](const IndexBox& b, std::size_t) {
                ++count;
                all.insert(key(b));
                // Long sides sit on leading coordinates.
                const auto info = classify_false_cube(b);
                REQUIRE(info.has_value());
                for (std::size_t i = 0; i < info->long_axes.size(); ++i) CHECK(info->long_axes[i] == i);
            });
            CHECK(all.size() == count);
            for_each_shape(q, ext, [&](const IndexBox& b, std::size_t) { CHECK(all.count(key(b)) == 1); });
            for_each_shape(w, ext, [&](const IndexBox& b, std::size_t) {
                const auto info = classify_false_cube(b);
                if (info->long_axes.empty()) return;
                const auto [l, r] = bisect_false_cube(b);
                CHECK(all.count(key(l)) == 1);
                CHECK(all.count(key(r)) == 1);
            });
        }
    }
}

TEST_SUITE("equivalence") {
    TEST_CASE("cube and ball circumscription") {
        const auto w = circumscribe_cube_ball(make_cube(std::vector<double>{0.0, 0.0}, 1.0));
        CHECK(std::get<Ball>(w.outer).radius == doctest::Approx(std::sqrt(2.0) / 2));
        CHECK(w.outer_ratio == doctest::Approx(pi / 2));
        CHECK(measure(w.outer) / measure(w.inner) == doctest::Approx(w.outer_ratio));

        const auto w1 = circumscribe_cube_ball(make_cube(std::vector<double>{0.0}, 0.3));
        CHECK(std::get<Ball>(w1.outer).radius == doctest::Approx(0.15));
        CHECK(w1.outer_ratio == doctest::Approx(1.0));

        const auto w3 = circumscribe_cube_ball(make_ball({0.0, 0.0, 0.0}, 1.0));
        CHECK(std::get<Box>(w3.outer).side(0) == doctest::Approx(2.0));
        CHECK(w3.outer_ratio == doctest::Approx(6.0 / pi));

        try {
            circumscribe_cube_ball(make_box(std::vector<double>{0, 0}, std::vector<double>{1, 2}));
            FAIL("expected not a cube");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NotACube);
        }
    }

    TEST_CASE("sector containing a ball") {
        const auto w = sector_for_ball(make_ball({1.0, 0.0}, 0.5));
        const auto& s = std::get<Sector>(w.middle);
        CHECK(s.alpha == doctest::Approx(pi / 6));
        const auto& o = std::get<Ball>(w.outer);
        CHECK(o.center[0] == doctest::Approx(std::sqrt(3.0) / 2));
        CHECK(o.radius == doctest::Approx(1.0));
        CHECK(measure(w.outer) == doctest::Approx(pi));
        CHECK(w.outer_ratio == doctest::Approx(4.0));

        const auto inside = sector_for_ball(make_ball({0.3, 0.0}, 0.5));
        CHECK(std::get<Ball>(inside.middle).radius == doctest::Approx(0.8));
        CHECK(std::get<Ball>(inside.outer).radius == doctest::Approx(1.0));

        const auto w3 = sector_for_ball(make_ball({2.0, 0.0, 0.0}, 1.0));
        CHECK(std::get<Sector>(w3.middle).alpha == doctest::Approx(pi / 6));
        CHECK(std::get<Ball>(w3.outer).center[0] == doctest::Approx(std::sqrt(3.0)));
        CHECK(std::get<Ball>(w3.outer).radius == doctest::Approx(2.0));
        const auto report = check_containment(w3, 100000, 11);
        CHECK(report.violations == 0);
        CHECK(report.in_inner > 0);
    }

    TEST_CASE("balls around a sector") {
        const auto w = ball_for_sector(make_ball({0.0, 0.0}, 1.0));
        CHECK(std::get<Ball>(w.outer).radius == doctest::Approx(2.0));
        CHECK(w.outer_ratio == doctest::Approx(4.0));

        const auto ws = ball_for_sector(make_sector({1.0, 0.0}, 0.5, pi / 6));
        CHECK(std::get<Ball>(ws.inner).radius == doctest::Approx(0.5));
        CHECK(std::get<Ball>(ws.outer).center[0] == doctest::Approx(std::sqrt(3.0) / 2));

        const auto w3 = ball_for_sector(make_sector({2.0, 0.0, 0.0}, 1.0, pi / 6));
        CHECK(measure(w3.inner) == doctest::Approx(4.0 * pi / 3));
        CHECK(measure(w3.outer) == doctest::Approx(8.0 * 4.0 * pi / 3));
        CHECK(check_containment(w3, 100000, 5).violations == 0);

        try {
            ball_for_sector(make_sector({1.0, 0.0}, 0.3, pi / 6));
            FAIL("expected not in basis A");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NotInBasisA);
        }
    }

    TEST_CASE("random witnesses nest") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (std::size_t n = 1; n <= 3; ++n) {
            for (int k = 0; k < 10; ++k) {
                std::vector<double> x(n);
                for (auto& c : x) c = u(rng);
                const auto w = sector_for_ball(make_ball(x, 0.1 + std::fabs(u(rng))));
                CHECK(check_containment(w, 20000, rng()).violations == 0);
                CHECK(measure(w.middle) < measure(w.outer));
                CHECK(measure(w.outer) == doctest::Approx(std::pow(2.0, n) * measure(w.inner)));
            }
        }
    }
}
