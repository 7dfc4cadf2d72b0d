#include "doctest.h"

#include "oscbound/error.hpp"
#include "oscbound/oscillation.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace oscbound;

namespace {

BasisDescriptor basis(BasisFamily family) {
    BasisDescriptor b;
    b.family = family;
    return b;
}

// Brute force over every enumerated shape, no pruning.
double brute_force(const GridFunction& f, const BasisDescriptor& b) {
    double best = 0.0;
    for_each_shape(b, f.extents(), [&](const IndexBox& box, std::size_t) {
        best = std::max(best, mean_oscillation(f, box));
    });
    return best;
}

GridFunction random_grid(std::mt19937_64& rng, std::vector<std::size_t> ext) {
    std::size_t cells = 1;
    for (auto e : ext) cells *= e;
    std::vector<double> v(cells);
    std::lognormal_distribution<double> logn(0.0, 1.0);
    for (auto& x : v) x = (rng() % 4 == 0) ? 0.0 : logn(rng);
    return GridFunction(std::move(ext), 0.1, std::move(v));
}

}  // namespace

TEST_SUITE("oscillation") {
    TEST_CASE("mean oscillation examples") {
        GridFunction f({2}, 0.5, {1, 0});
        CHECK(mean_oscillation(f, f.domain()) == doctest::Approx(0.5));
        CHECK(mean_oscillation(GridFunction::constant({3, 3}, 1.0, 4.0), IndexBox{2, {0, 0}, {3, 3}}) == 0.0);
        GridFunction g({4}, 0.25, {0, 1, 2, 3});
        CHECK(mean_oscillation(g, g.domain()) == doctest::Approx(1.0));
        CHECK_THROWS_AS(mean_oscillation(g, IndexBox{1, {2}, {2}}), Error);
    }

    TEST_CASE("positive-part identity and shift invariance") {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            const auto f = random_grid(rng, {7, 5});
            Box b;
            b.dim = 2;
            for (std::size_t a = 0; a < 2; ++a) {
                const double e = static_cast<double>(f.extent(a));
                double x = u(rng) * e;
                double y = u(rng) * e;
                if (x > y) std::swap(x, y);
                b.lo[a] = x;
                b.hi[a] = std::max(y, x + 1e-3);
                b.hi[a] = std::min(b.hi[a], e);
                if (!(b.hi[a] > b.lo[a])) b.lo[a] = b.hi[a] - 1e-3;
            }
            const double o = mean_oscillation(f, b);
            CHECK(std::fabs(o - oscillation_positive_part(f, b)) <= 1e-12 * std::max(1.0, o));
            const auto shifted = f.map([](double v) { return v + 123.0; });
            CHECK(mean_oscillation(shifted, b) == doctest::Approx(o).epsilon(1e-9));
        }
    }

    TEST_CASE("volume-ratio inequality on nested boxes") {
        std::mt19937_64 rng(8);
        for (int trial = 0; trial < 300; ++trial) {
            const auto f = random_grid(rng, {9, 9});
            IndexBox outer{2, {rng() % 4, rng() % 4}, {0, 0}};
            outer.hi[0] = outer.lo[0] + 1 + rng() % (9 - outer.lo[0]);
            outer.hi[1] = outer.lo[1] + 1 + rng() % (9 - outer.lo[1]);
            IndexBox inner = outer;
            for (std::size_t a = 0; a < 2; ++a) {
                inner.lo[a] = outer.lo[a] + rng() % outer.side(a);
                inner.hi[a] = inner.lo[a] + 1 + rng() % (outer.hi[a] - inner.lo[a]);
            }
            const double ratio = static_cast<double>(outer.cell_count()) / static_cast<double>(inner.cell_count());
            CHECK(mean_oscillation(f, inner) <= ratio * mean_oscillation(f, outer) + 1e-12);
        }
    }

    TEST_CASE("seminorm examples") {
        CHECK(bmo_seminorm(GridFunction::constant({5, 5}, 0.2, 3.0), basis(BasisFamily::Rectangles)).value == 0.0);
        GridFunction f({8}, 0.125, {1, 1, 1, 1, 0, 0, 0, 0});
        const auto r = bmo_seminorm(f, basis(BasisFamily::Cubes));
        CHECK(r.value == doctest::Approx(0.5));
        CHECK(mean_oscillation(f, r.argmax) == doctest::Approx(0.5));
        const auto refined = bmo_seminorm(f, basis(BasisFamily::Cubes), {.refine = true});
        CHECK(refined.value == doctest::Approx(0.5));
    }

    TEST_CASE("branch and bound matches brute force") {
        std::mt19937_64 rng(21);
        for (int trial = 0; trial < 30; ++trial) {
            const auto f = random_grid(rng, trial % 3 == 0 ? std::vector<std::size_t>{40}
                                            : trial % 3 == 1 ? std::vector<std::size_t>{9, 7}
                                                             : std::vector<std::size_t>{5, 4, 6});
            for (auto fam : {BasisFamily::Cubes, BasisFamily::FalseCubes, BasisFamily::Rectangles}) {
                const auto b = basis(fam);
                const auto r = bmo_seminorm(f, b);
                CHECK(r.value == doctest::Approx(brute_force(f, b)).epsilon(1e-12));
                CHECK(r.scanned == count_shapes(b, f.extents()));
                ScanOptions two;
                two.threads = 2;
                CHECK(bmo_seminorm(f, b, two).value == doctest::Approx(r.value).epsilon(1e-12));
                ScanOptions refine;
                refine.refine = true;
                CHECK(bmo_seminorm(f, b, refine).value >= r.value);
            }
            if (f.dim() >= 2) {
                CHECK(bmo_seminorm(f, basis(BasisFamily::FalseCubes)).value >=
                      bmo_seminorm(f, basis(BasisFamily::Cubes)).value);
            }
        }
    }

    TEST_CASE("per-scale maxima") {
        std::mt19937_64 rng(3);
        const auto f = random_grid(rng, {12, 12});
        ScanOptions opt;
        opt.per_scale = true;
        const auto r = bmo_seminorm(f, basis(BasisFamily::Cubes), opt);
        for (std::size_t k = 1; k <= 12; ++k) {
            double best = 0.0;
            BasisDescriptor b;
            for_each_shape(b, f.extents(), [&](const IndexBox& box, std::size_t s) {
                if (s == k) best = std::max(best, mean_oscillation(f, box));
            });
            CHECK(r.per_scale[k] == doctest::Approx(best).epsilon(1e-12));
        }
    }

    TEST_CASE("refinement finds half-shifted cubes") {
        std::vector<double> v(27, 0.0);
        v[13] = 1.0;
        GridFunction f({3, 3, 3}, 1.0, v);
        const auto plain = bmo_seminorm(f, basis(BasisFamily::Cubes));
        ScanOptions opt;
        opt.refine = true;
        const auto refined = bmo_seminorm(f, basis(BasisFamily::Cubes), opt);
        CHECK(refined.value >= 0.5 - 1e-12);
        CHECK(refined.value >= plain.value);
    }

    TEST_CASE("BLO functional") {
        CHECK(blo_functional(GridFunction::constant({4}, 1.0, 2.0), basis(BasisFamily::Cubes)) == 0.0);
        GridFunction f({2}, 0.5, {1, 0});
        CHECK(blo_functional(f, basis(BasisFamily::Cubes)) == doctest::Approx(0.5));
        std::mt19937_64 rng(6);
        const auto g = random_grid(rng, {6, 6});
        const PrefixSumTable t(g);
        for_each_shape(basis(BasisFamily::Rectangles), g.extents(), [&](const IndexBox& b, std::size_t) {
            double lowest = 1e300;
            for_each_row(g, b, [&](std::size_t base, std::size_t len) {
                for (std::size_t i = base; i < base + len; ++i) lowest = std::min(lowest, g[i]);
            });
            CHECK(mean_oscillation(g, b) <= 2.0 * (box_mean(t, b) - lowest) + 1e-12);
        });
    }

    TEST_CASE("partition sandwich") {
        const auto c = GridFunction::constant({4, 4}, 1.0, 1.0);
        const auto pc = partition_bounds(c, PrefixSumTable(c), c.domain(), 0.0);
        CHECK(pc.lower == 0.0);
        CHECK(pc.osc == 0.0);
        GridFunction f({2}, 0.5, {1, 0});
        const auto p = partition_bounds(f, PrefixSumTable(f), f.domain(), 0.5);
        CHECK(p.lower == doctest::Approx(0.5));
        CHECK(p.osc == doctest::Approx(0.5));
        CHECK(p.m == 1);
        std::mt19937_64 rng(12);
        const auto g = random_grid(rng, {8, 8});
        const double bmo = bmo_seminorm(g, basis(BasisFamily::Cubes)).value;
        const PrefixSumTable t(g);
        for_each_shape(basis(BasisFamily::FalseCubes), g.extents(), [&](const IndexBox& b, std::size_t) {
            const auto pb = partition_bounds(g, t, b, bmo);
            CHECK(pb.lower <= pb.osc + 1e-12);
            CHECK(pb.osc <= pb.upper + 1e-12);
        });
        CHECK_THROWS_AS(partition_bounds(g, t, IndexBox{2, {0, 0}, {1, 3}}, bmo), Error);
    }

    TEST_CASE("interval partition scan matches partition_bounds") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 4; ++trial) {
            auto g = random_grid(rng, {37});
            if (trial == 3) g = GridFunction({6}, 1.0, {2, 2, 2, 5, 5, 2});
            const double bmo = bmo_seminorm(g, basis(BasisFamily::Cubes)).value;
            const PrefixSumTable t(g);
            std::size_t visited = 0;
            for_each_interval_partition(g, bmo, [&](const IndexBox& b, const PartitionBounds& p) {
                ++visited;
                const auto ref = partition_bounds(g, t, b, bmo);
                CHECK(p.m == ref.m);
                CHECK(p.lower == doctest::Approx(ref.lower).epsilon(1e-12));
                CHECK(p.osc == doctest::Approx(ref.osc).epsilon(1e-12));
                CHECK(p.upper == doctest::Approx(ref.upper).epsilon(1e-12));
            });
            CHECK(visited == g.size() * (g.size() + 1) / 2);
        }
        CHECK_THROWS_AS(for_each_interval_partition(GridFunction::constant({2, 2}, 1.0, 0.0), 0.0,
                                                    [](const IndexBox&, const PartitionBounds&) {}),
                        Error);
    }

    TEST_CASE("neighbour gaps") {
        CHECK(neighbor_mean_gap(GridFunction::constant({4, 4}, 1.0, 3.0)).gap == 0.0);
        GridFunction f({4}, 0.5, {0, 0, 1, 1});
        CHECK(neighbor_mean_gap(f).gap == doctest::Approx(1.0));
        CHECK(bmo_seminorm(f, basis(BasisFamily::Cubes)).value == doctest::Approx(0.5));
        std::vector<double> board(16);
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) board[i * 4 + j] = static_cast<double>((i + j) % 2);
        }
        CHECK(neighbor_mean_gap(GridFunction({4, 4}, 1.0, board)).gap == 1.0);
    }

    TEST_CASE("step function oscillation") {
        StepFunction1D g({0, 0.5, 1.0}, {1, 0});
        CHECK(mean_oscillation(g, {0.0, 1.0}) == doctest::Approx(0.5));
        // Past the end the function is zero.
        CHECK(mean_oscillation(StepFunction1D({0, 1}, {1}), {0.0, 2.0}) == doctest::Approx(0.5));
        const auto r = step_bmo(g);
        CHECK(r.value == doctest::Approx(0.5));

        std::mt19937_64 rng(14);
        std::normal_distribution<double> gauss;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> b{0.0};
            std::vector<double> v;
            for (int k = 0; k < 30; ++k) {
                b.push_back(b.back() + 0.1 + std::fabs(gauss(rng)));
                v.push_back(gauss(rng));
            }
            StepFunction1D s(b, v);
            double best = 0.0;
            for (std::size_t p = 0; p < 30; ++p) {
                for (std::size_t q = p + 1; q <= 30; ++q) best = std::max(best, mean_oscillation(s, {b[p], b[q]}));
            }
            CHECK(step_bmo(s).value == doctest::Approx(best).epsilon(1e-12));
            std::sort(v.begin(), v.end(), std::greater<>());
            StepFunction1D mono(b, v);
            double mbest = 0.0;
            for (std::size_t p = 0; p < 30; ++p) {
                for (std::size_t q = p + 1; q <= 30; ++q) mbest = std::max(mbest, mean_oscillation(mono, {b[p], b[q]}));
            }
            CHECK(step_bmo(mono).value == doctest::Approx(mbest).epsilon(1e-12));
            CHECK(step_bmo(mono, true).value >= step_bmo(mono).value);
        }
    }

    TEST_CASE("radial oscillation equals profile oscillation") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t n = 1; n <= 4; ++n) {
            std::vector<double> b{0.0};
            std::vector<double> v;
            for (int k = 0; k < 12; ++k) {
                b.push_back(b.back() + 0.05 + u(rng));
                v.push_back(u(rng) * 3);
            }
            RadialFunction f{StepFunction1D(b, v), n};
            for (int k = 0; k < 50; ++k) {
                double lo = u(rng) * b.back();
                double hi = u(rng) * b.back() * 1.2;
                if (lo > hi) std::swap(lo, hi);
                if (k % 5 == 0) lo = 0.0;
                const Shape a = shape_for_interval({lo, hi}, n);
                const double reduced = mean_oscillation(f, a);
                const double geometric = radial_oscillation_geometric(f, a);
                CHECK(std::fabs(reduced - geometric) <= 1e-12 * std::max(1.0, reduced));
                CHECK(reduced == doctest::Approx(mean_oscillation(f.profile, {lo, hi})));
            }
            const auto ra = radial_bmo_a(f);
            const auto rs = step_bmo(f.profile);
            CHECK(std::fabs(ra.value - rs.value) <= 1e-12 * std::max(1.0, rs.value));
        }
    }
}
