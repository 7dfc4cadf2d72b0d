#include "doctest.h"

#include "oscbound/error.hpp"
#include "oscbound/grid.hpp"
#include "oscbound/grid_io.hpp"

#include <cmath>
#include <filesystem>
#include <random>

using namespace oscbound;

namespace {

IndexBox box1(std::size_t lo, std::size_t hi) {
    IndexBox b;
    b.dim = 1;
    b.lo[0] = lo;
    b.hi[0] = hi;
    return b;
}

IndexBox box2(std::size_t x0, std::size_t x1, std::size_t y0, std::size_t y1) {
    IndexBox b;
    b.dim = 2;
    b.lo = {x0, y0};
    b.hi = {x1, y1};
    return b;
}

long double naive_sum(const GridFunction& f, const IndexBox& b) {
    long double s = 0.0L;
    for_each_row(f, b, [&](std::size_t base, std::size_t len) {
        for (std::size_t i = base; i < base + len; ++i) s += f[i];
    });
    return s;
}

}  // namespace

TEST_SUITE("grid") {
    TEST_CASE("whole-grid sum of a 2x2 grid") {
        GridFunction f({2, 2}, 1.0, {1, 2, 3, 4});
        PrefixSumTable t(f);
        CHECK(t.box_sum(f.domain()) == doctest::Approx(10.0));
        CHECK(t.table_size() == 9);
    }

    TEST_CASE("empty box sums to zero") {
        GridFunction f({3}, 1.0, {1, 2, 3});
        PrefixSumTable t(f);
        CHECK(t.box_sum(box1(1, 1)) == 0.0);
    }

    TEST_CASE("1-D sum scales by the cell measure") {
        GridFunction f({3}, 0.5, {5, -1, 2});
        PrefixSumTable t(f);
        CHECK(t.box_sum(box1(1, 3)) == doctest::Approx(0.5));
    }

    TEST_CASE("box means") {
        CHECK(box_mean(PrefixSumTable(GridFunction::constant({4, 3}, 0.1, 2.5)), box2(1, 3, 0, 2)) ==
              doctest::Approx(2.5));
        GridFunction f({4}, 0.25, {0, 1, 0, 1});
        CHECK(box_mean(PrefixSumTable(f), f.domain()) == doctest::Approx(0.5));
        GridFunction g({2, 2}, 1.0, {1, 2, 3, 4});
        // Left column: cells (0,0) and (1,0).
        CHECK(box_mean(PrefixSumTable(g), box2(0, 2, 0, 1)) == doctest::Approx(2.0));
        CHECK_THROWS_AS(box_mean(PrefixSumTable(g), box2(0, 0, 0, 1)), Error);
    }

    TEST_CASE("prefix means match naive means on random boxes") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 1000; ++trial) {
            const std::size_t n = 1 + rng() % 3;
            std::vector<std::size_t> ext(n);
            std::size_t cells = 1;
            for (auto& e : ext) {
                e = 1 + rng() % (n == 1 ? 40 : n == 2 ? 12 : 6);
                cells *= e;
            }
            std::normal_distribution<double> gauss(3.0, 10.0);
            std::vector<double> v(cells);
            for (auto& x : v) x = gauss(rng);
            GridFunction f(ext, 0.1, v);
            PrefixSumTable t(f);
            IndexBox b;
            b.dim = n;
            for (std::size_t a = 0; a < n; ++a) {
                std::size_t x = rng() % ext[a];
                std::size_t y = rng() % ext[a];
                if (x > y) std::swap(x, y);
                b.lo[a] = x;
                b.hi[a] = y + 1;
            }
            const double naive = static_cast<double>(naive_sum(f, b) / b.cell_count());
            const double fast = box_mean(t, b);
            CHECK(std::fabs(fast - naive) <= 1e-12 * std::max(1.0, std::fabs(naive)));
            // Additivity under a split along a random axis.
            const std::size_t axis = rng() % n;
            if (b.side(axis) > 1) {
                IndexBox l = b;
                IndexBox r = b;
                l.hi[axis] = b.lo[axis] + 1 + rng() % (b.side(axis) - 1);
                r.lo[axis] = l.hi[axis];
                CHECK(t.box_sum(b) == doctest::Approx(t.box_sum(l) + t.box_sum(r)).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("fractional boxes use exact overlap weights") {
        GridFunction f({4}, 0.25, {4, 0, 0, 0});
        Box b;
        b.dim = 1;
        b.lo[0] = 0.5;
        b.hi[0] = 1.5;
        CHECK(box_mean(f, b) == doctest::Approx(2.0));
        CHECK(box_integral(f, b) == doctest::Approx(2.0 * 0.25));
    }

    TEST_CASE("invalid grids are rejected") {
        CHECK_THROWS_AS(GridFunction({2, 2}, 1.0, {1, 2, 3}), Error);
        CHECK_THROWS_AS(GridFunction({2}, 0.0, {1, 2}), Error);
        CHECK_THROWS_AS(GridFunction({2}, 1.0, {1, NAN}), Error);
    }
}

TEST_SUITE("io") {
    TEST_CASE("round trip is bit-exact") {
        std::mt19937_64 rng(3);
        std::vector<double> v(5 * 3 * 2);
        for (auto& x : v) x = std::ldexp(static_cast<double>(rng() >> 11), -40) - 17.0;
        GridFunction f({5, 3, 2}, 0.125, {-1.0, 0.5, 2.0}, v);
        const auto path = std::filesystem::temp_directory_path() / "oscbound_roundtrip.oscg";
        save_grid(f, path);
        const auto g = load_grid(path);
        CHECK(g.dim() == 3);
        CHECK(g.cell_size() == f.cell_size());
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(g[i] == f[i]);
        for (std::size_t a = 0; a < 3; ++a) CHECK(g.origin()[a] == f.origin()[a]);
        std::filesystem::remove(path);
    }

    TEST_CASE("distinct errors for malformed files") {
        GridFunction f({4}, 1.0, {1, 2, 3, 4});
        auto bytes = encode_grid(f);

        auto bad = bytes;
        bad[0] = 'X';
        try {
            decode_grid(bad);
            FAIL("expected bad magic");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::BadMagic);
        }

        auto shortened = bytes;
        shortened.resize(bytes.size() - 8);
        try {
            decode_grid(shortened);
            FAIL("expected truncated payload");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::TruncatedPayload);
        }

        try {
            decode_grid(bytes, 2);
            FAIL("expected dimension mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DimensionMismatch);
        }
    }
}
