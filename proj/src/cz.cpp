#include "oscbound/cz.hpp"

#include "oscbound/basis.hpp"
#include "oscbound/error.hpp"
#include "oscbound/rearrangement.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

namespace oscbound {

namespace {

void require_nonnegative(const GridFunction& g) {
    if (g.min_value() < 0.0) {
        throw Error(ErrorCode::NegativeValues, "negative values: decomposition needs g >= 0");
    }
}

double tolerance(double gamma) { return 1e-12 * std::max(1.0, std::fabs(gamma)); }

bool divides_all(const GridFunction& g, std::size_t side) {
    for (auto d : g.extents()) {
        if (d % side != 0) return false;
    }
    return true;
}

std::size_t coarsest_side(const GridFunction& g) {
    std::size_t top = g.extent(0);
    for (auto d : g.extents()) top = std::min(top, d);
    std::size_t side = 1;
    while (2 * side <= top && divides_all(g, 2 * side)) side *= 2;
    return side;
}

std::size_t finest_side(const GridFunction& g, double t) {
    std::size_t top = g.extent(0);
    for (auto d : g.extents()) top = std::min(top, d);
    for (std::size_t side = 1; side <= top; side *= 2) {
        if (!divides_all(g, side)) break;
        const double measure =
            std::pow(static_cast<double>(side), static_cast<double>(g.dim())) * g.cell_measure();
        if (measure >= t * (1.0 - 1e-12)) return side;
    }
    throw Error(ErrorCode::NoAdmissibleTiling,
                "no admissible tiling: no power-of-two cube of measure >= t divides the grid");
}

std::vector<IndexBox> tiles(const GridFunction& g, std::size_t side) {
    std::vector<IndexBox> out;
    IndexBox q;
    q.dim = g.dim();
    for (std::size_t a = 0; a < q.dim; ++a) {
        q.lo[a] = 0;
        q.hi[a] = side;
    }
    while (true) {
        out.push_back(q);
        std::size_t a = q.dim;
        while (true) {
            if (a == 0) return out;
            --a;
            q.lo[a] += side;
            q.hi[a] += side;
            if (q.hi[a] <= g.extent(a)) break;
            q.lo[a] = 0;
            q.hi[a] = side;
        }
    }
}

void check_base(const PrefixSumTable& table, const std::vector<IndexBox>& base, double gamma) {
    for (const auto& q : base) {
        if (box_mean(table, q) > gamma + tolerance(gamma)) {
            throw Error(ErrorCode::LevelBelowBaseMean,
                        "level below base mean: a base tile has mean above the level");
        }
    }
}

CZDecomposition run_dyadic(const GridFunction& g, double gamma, std::size_t side) {
    require_nonnegative(g);
    const PrefixSumTable table(g);
    auto stack = tiles(g, side);
    check_base(table, stack, gamma);
    CZDecomposition d;
    d.gamma = gamma;
    d.c_star = std::pow(2.0, static_cast<double>(g.dim()));
    d.method = "dyadic";
    d.basis = "cubes";
    std::reverse(stack.begin(), stack.end());
    const std::size_t n = g.dim();
    while (!stack.empty()) {
        const IndexBox q = stack.back();
        stack.pop_back();
        const std::size_t half = q.side(0) / 2;
        if (half == 0) continue;
        std::vector<IndexBox> keep;
        for (std::size_t nu = 0; nu < (std::size_t{1} << n); ++nu) {
            IndexBox c = q;
            for (std::size_t a = 0; a < n; ++a) {
                if (nu & (std::size_t{1} << a)) {
                    c.lo[a] += half;
                } else {
                    c.hi[a] = c.lo[a] + half;
                }
            }
            if (box_mean(table, c) > gamma) {
                d.pairs.push_back({Box::from_cells(c), Box::from_cells(q)});
            } else {
                keep.push_back(c);
            }
        }
        stack.insert(stack.end(), keep.rbegin(), keep.rend());
    }
    return d;
}

CZDecomposition run_bisection(const GridFunction& g, double gamma, std::size_t side) {
    require_nonnegative(g);
    const PrefixSumTable table(g);
    auto stack = tiles(g, side);
    check_base(table, stack, gamma);
    CZDecomposition d;
    d.gamma = gamma;
    d.c_star = 2.0;
    d.method = "bisection";
    d.basis = "falsecubes";
    std::reverse(stack.begin(), stack.end());
    while (!stack.empty()) {
        const IndexBox r = stack.back();
        stack.pop_back();
        if (r.cell_count() == 1) continue;
        const auto [left, right] = bisect_false_cube(r);
        std::vector<IndexBox> keep;
        for (const auto& c : {left, right}) {
            if (box_mean(table, c) >= gamma) {
                d.pairs.push_back({Box::from_cells(c), Box::from_cells(r)});
            } else {
                keep.push_back(c);
            }
        }
        stack.insert(stack.end(), keep.rbegin(), keep.rend());
    }
    return d;
}

Box interval_box(double lo, double hi) {
    Box b;
    b.dim = 1;
    b.lo[0] = lo;
    b.hi[0] = hi;
    return b;
}

}  // namespace

double level_from_t(const GridFunction& g, double t) {
    require_nonnegative(g);
    const double total = g.domain_measure();
    if (!(t > 0.0) || t > total * (1.0 + 1e-12)) {
        throw Error(ErrorCode::OutOfRange, "t must lie in (0, |Omega|]");
    }
    t = std::min(t, total);
    return decreasing_rearrangement(g).integral(0.0, t) / t;
}

CZDecomposition dyadic_cz(const GridFunction& g, double gamma) {
    return run_dyadic(g, gamma, coarsest_side(g));
}

CZDecomposition dyadic_cz_from_t(const GridFunction& g, double t) {
    const double gamma = level_from_t(g, t);
    auto d = run_dyadic(g, gamma, finest_side(g, t));
    d.t = t;
    return d;
}

CZDecomposition bisection_cz(const GridFunction& g, double t, BaseTiling tiling) {
    const double gamma = level_from_t(g, t);
    const std::size_t fine = finest_side(g, t);
    auto d = run_bisection(g, gamma, tiling == BaseTiling::Finest ? fine : coarsest_side(g));
    d.t = t;
    return d;
}

CZDecomposition bisection_cz_level(const GridFunction& g, double gamma) {
    return run_bisection(g, gamma, coarsest_side(g));
}

CZDecomposition rising_sun_1d(const GridFunction& g, double gamma) {
    if (g.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "rising sun needs a 1-D grid");
    require_nonnegative(g);
    const std::size_t n = g.size();
    // G at cell boundaries, in cell units of length.
    std::vector<long double> G(n + 1, 0.0L);
    long double scale = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        G[i + 1] = G[i] + (static_cast<long double>(g[i]) - gamma);
        scale += std::fabs(static_cast<long double>(g[i]) - gamma);
    }
    const long double eps = 64.0L * LDBL_EPSILON * std::max(scale, 1.0L);
    if (G[n] > eps + 1e-12L * static_cast<long double>(n) * std::max(1.0, std::fabs(gamma))) {
        throw Error(ErrorCode::SunBelowHorizon,
                    "sun below horizon: level is below the mean over the interval");
    }

    struct Piece {
        double lo, hi;
    };
    std::vector<Piece> pieces;
    bool unbalanced = false;
    std::size_t i = 0;
    while (i < n) {
        if (!(g[i] > gamma)) {
            ++i;
            continue;
        }
        const long double level = G[i];
        std::size_t j = i;
        while (j < n && G[j + 1] > level + eps) ++j;
        double hi = 0.0;
        if (j == n) {
            hi = static_cast<double>(n);
            unbalanced = true;
        } else if (std::fabs(G[j + 1] - level) <= eps) {
            hi = static_cast<double>(j + 1);
        } else {
            const long double dx = (G[j] - level) / (G[j] - G[j + 1]);
            hi = static_cast<double>(static_cast<long double>(j) + std::clamp(dx, 0.0L, 1.0L));
        }
        const double lo = static_cast<double>(i);
        i = j + 1;
        if (!(hi > lo)) continue;
        if (!pieces.empty() && pieces.back().hi == lo) {
            pieces.back().hi = hi;
        } else {
            pieces.push_back({lo, hi});
        }
    }

    if (unbalanced) {
        // Close the last piece at the first point where G falls to G(L).
        const long double target = G[n];
        double x0 = 0.0;
        if (G[0] > target + eps) {
            std::size_t k = 0;
            while (k < n && G[k + 1] > target + eps) ++k;
            if (std::fabs(G[k + 1] - target) <= eps) {
                x0 = static_cast<double>(k + 1);
            } else {
                const long double dx = (G[k] - target) / (G[k] - G[k + 1]);
                x0 = static_cast<double>(static_cast<long double>(k) + std::clamp(dx, 0.0L, 1.0L));
            }
        }
        while (!pieces.empty() && pieces.back().hi > x0) {
            x0 = std::min(x0, pieces.back().lo);
            pieces.pop_back();
        }
        if (!pieces.empty() && pieces.back().hi == x0) {
            x0 = pieces.back().lo;
            pieces.pop_back();
        }
        pieces.push_back({x0, static_cast<double>(n)});
    }

    CZDecomposition d;
    d.gamma = gamma;
    d.c_star = 1.0;
    d.method = "risingsun";
    d.basis = "intervals";
    for (const auto& p : pieces) d.pairs.push_back({interval_box(p.lo, p.hi), interval_box(p.lo, p.hi)});
    return d;
}

nlohmann::json CZDecomposition::to_json(const GridFunction& g) const {
    nlohmann::json pairs_json = nlohmann::json::array();
    for (const auto& p : pairs) {
        pairs_json.push_back({{"S", shape_to_json(p.selected)},
                              {"S_tilde", shape_to_json(p.parent)},
                              {"mean_S", box_mean(g, p.selected)},
                              {"mean_S_tilde", box_mean(g, p.parent)}});
    }
    nlohmann::json j{{"gamma", gamma}, {"c_star", c_star}, {"method", method},
                     {"basis", basis}, {"units", "cells"}, {"pairs", pairs_json}};
    j["t"] = t ? nlohmann::json(*t) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json CZValidation::to_json() const {
    return {{"ok", ok},
            {"clause", clause},
            {"message", message},
            {"measured_c", measured_c},
            {"equal_mean_error", equal_mean_error}};
}

CZValidation validate_cz(const GridFunction& g, const CZDecomposition& d, double slack) {
    CZValidation v;
    const double tol = slack * std::max(1.0, std::fabs(d.gamma));
    auto fail = [&](const char* clause, std::string message) {
        if (v.ok) {
            v.ok = false;
            v.clause = clause;
            v.message = std::move(message);
        }
    };
    const std::size_t n = g.dim();

    for (std::size_t k = 0; k < d.pairs.size(); ++k) {
        const auto& [s, p] = d.pairs[k];
        if (s.dim != n || p.dim != n) {
            fail("i", "pair " + std::to_string(k) + " has the wrong dimension");
            continue;
        }
        const double ratio = p.volume() / s.volume();
        v.measured_c = std::max(v.measured_c, ratio);
        if (!p.contains(s, 1e-9) || ratio > d.c_star * (1.0 + slack)) {
            fail("i", "pair " + std::to_string(k) + " violates containment or the measure ratio");
        }
        const double ms = box_mean(g, s);
        const double mp = box_mean(g, p);
        if (mp > d.gamma + tol || ms < d.gamma - tol) {
            fail("ii", "pair " + std::to_string(k) + " violates the mean sandwich");
        }
        if (s.lo == p.lo && s.hi == p.hi) {
            v.equal_mean_error =
                std::max(v.equal_mean_error, std::fabs(ms - d.gamma) / std::max(1.0, std::fabs(d.gamma)));
        }
    }

    // (iii): cells not covered by the parents stay at or below the level.
    std::vector<double> covered(g.size(), 0.0);
    if (n == 1) {
        std::vector<std::pair<double, double>> spans;
        for (const auto& pr : d.pairs) spans.emplace_back(pr.parent.lo[0], pr.parent.hi[0]);
        std::sort(spans.begin(), spans.end());
        std::vector<std::pair<double, double>> merged;
        for (const auto& s : spans) {
            if (!merged.empty() && s.first <= merged.back().second) {
                merged.back().second = std::max(merged.back().second, s.second);
            } else {
                merged.push_back(s);
            }
        }
        for (const auto& [lo, hi] : merged) {
            const auto first = static_cast<std::size_t>(std::max(0.0, std::floor(lo)));
            for (std::size_t c = first; c < g.size() && static_cast<double>(c) < hi; ++c) {
                const double a = std::max(lo, static_cast<double>(c));
                const double b = std::min(hi, static_cast<double>(c + 1));
                if (b > a) covered[c] += b - a;
            }
        }
    } else {
        for (const auto& pr : d.pairs) {
            for_each_weighted_cell(g, pr.parent, [&](std::size_t c, double w) {
                if (w >= 1.0 - 1e-12) covered[c] = 1.0;
            });
        }
    }
    for (std::size_t c = 0; c < g.size(); ++c) {
        if (covered[c] < 1.0 - 1e-9 && g[c] > d.gamma + tol) {
            fail("iii", "cell " + std::to_string(c) + " exceeds the level outside the parents");
            break;
        }
    }

    // Disjointness of the selected shapes.
    bool aligned = true;
    for (const auto& pr : d.pairs) aligned = aligned && pr.selected.is_cell_aligned();
    if (aligned && n > 1) {
        std::vector<unsigned char> mark(g.size(), 0);
        for (const auto& pr : d.pairs) {
            bool clash = false;
            for_each_row(g, pr.selected.cells(), [&](std::size_t base, std::size_t len) {
                for (std::size_t i = base; i < base + len; ++i) {
                    clash = clash || mark[i];
                    mark[i] = 1;
                }
            });
            if (clash) {
                fail("disjoint", "selected shapes overlap");
                break;
            }
        }
    } else if (n == 1) {
        std::vector<std::pair<double, double>> spans;
        for (const auto& pr : d.pairs) spans.emplace_back(pr.selected.lo[0], pr.selected.hi[0]);
        std::sort(spans.begin(), spans.end());
        for (std::size_t k = 1; k < spans.size(); ++k) {
            if (spans[k].first < spans[k - 1].second - 1e-12) {
                fail("disjoint", "selected shapes overlap");
                break;
            }
        }
    } else {
        for (std::size_t a = 0; a < d.pairs.size() && v.ok; ++a) {
            for (std::size_t b = a + 1; b < d.pairs.size(); ++b) {
                if (d.pairs[a].selected.overlap(d.pairs[b].selected) > 1e-12) {
                    fail("disjoint", "selected shapes overlap");
                    break;
                }
            }
        }
    }
    return v;
}

}  // namespace oscbound
