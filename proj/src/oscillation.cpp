#include "oscbound/oscillation.hpp"

#include "oscbound/error.hpp"
#include "oscbound/sphere.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <queue>
#include <thread>

namespace oscbound {

double mean_oscillation(const GridFunction& f, const PrefixSumTable& table, const IndexBox& box) {
    if (box.empty()) throw Error(ErrorCode::EmptyShape, "empty shape");
    const auto count = static_cast<long double>(box.cell_count());
    const auto m = static_cast<double>(table.value_sum(box) / count);
    const auto values = f.values();
    double acc = 0.0;
    for_each_row(f, box, [&](std::size_t base, std::size_t len) {
        double row = 0.0;
        for (std::size_t i = base; i < base + len; ++i) row += std::fabs(values[i] - m);
        acc += row;
    });
    return acc / static_cast<double>(count);
}

double mean_oscillation(const GridFunction& f, const IndexBox& box) {
    if (box.empty()) throw Error(ErrorCode::EmptyShape, "empty shape");
    for (std::size_t a = 0; a < f.dim(); ++a) {
        if (box.hi[a] > f.extent(a)) throw Error(ErrorCode::OutOfRange, "box leaves the grid");
    }
    const auto values = f.values();
    long double sum = 0.0L;
    for_each_row(f, box, [&](std::size_t base, std::size_t len) {
        for (std::size_t i = base; i < base + len; ++i) sum += values[i];
    });
    const auto count = static_cast<long double>(box.cell_count());
    const long double m = sum / count;
    long double acc = 0.0L;
    for_each_row(f, box, [&](std::size_t base, std::size_t len) {
        for (std::size_t i = base; i < base + len; ++i) acc += std::fabs(values[i] - m);
    });
    return static_cast<double>(acc / count);
}

namespace {

void check_fractional(const GridFunction& f, const Box& box) {
    if (box.dim != f.dim()) throw Error(ErrorCode::DimensionMismatch, "box and grid differ in dimension");
    for (std::size_t a = 0; a < box.dim; ++a) {
        if (!(box.hi[a] > box.lo[a])) throw Error(ErrorCode::EmptyShape, "empty shape");
        if (box.lo[a] < 0.0 || box.hi[a] > static_cast<double>(f.extent(a))) {
            throw Error(ErrorCode::OutOfRange, "box leaves the grid");
        }
    }
}

struct WeightedMean {
    long double mean;
    long double weight;
};

WeightedMean weighted_mean(const GridFunction& f, const Box& box) {
    long double sum = 0.0L;
    long double weight = 0.0L;
    for_each_weighted_cell(f, box, [&](std::size_t i, double w) {
        sum += static_cast<long double>(w) * f[i];
        weight += w;
    });
    if (!(weight > 0.0L)) throw Error(ErrorCode::EmptyShape, "empty shape");
    return {sum / weight, weight};
}

}  // namespace

double mean_oscillation(const GridFunction& f, const Box& box) {
    check_fractional(f, box);
    const auto [m, weight] = weighted_mean(f, box);
    long double acc = 0.0L;
    for_each_weighted_cell(f, box, [&](std::size_t i, double w) {
        acc += static_cast<long double>(w) * std::fabs(f[i] - m);
    });
    return static_cast<double>(acc / weight);
}

double oscillation_positive_part(const GridFunction& f, const Box& box) {
    check_fractional(f, box);
    const auto [m, weight] = weighted_mean(f, box);
    long double acc = 0.0L;
    for_each_weighted_cell(f, box, [&](std::size_t i, double w) {
        const long double d = f[i] - m;
        if (d > 0.0L) acc += static_cast<long double>(w) * d;
    });
    return static_cast<double>(2.0L * acc / weight);
}

double mean_oscillation(const GridFunction& f, const Shape& s) {
    if (const auto* box = std::get_if<Box>(&s)) {
        if (box->is_cell_aligned()) return mean_oscillation(f, box->cells());
        return mean_oscillation(f, *box);
    }
    throw Error(ErrorCode::NotCellEnumerable,
                "not cell-enumerable: ball and sector oscillation needs a radial function");
}

double mean_oscillation(const StepFunction1D& g, const Interval& iv) {
    if (!(iv.hi > iv.lo) || iv.lo < 0.0) throw Error(ErrorCode::EmptyShape, "empty shape");
    const double len = iv.hi - iv.lo;
    const long double m = static_cast<long double>(g.integral(iv.lo, iv.hi)) / len;
    long double acc = 0.0L;
    const double end = std::min(iv.hi, g.length());
    if (end > iv.lo) {
        auto i = static_cast<std::size_t>(
                     std::upper_bound(g.breaks.begin(), g.breaks.end(), iv.lo) - g.breaks.begin()) - 1;
        for (; i < g.pieces() && g.breaks[i] < end; ++i) {
            const double lo = std::max(iv.lo, g.breaks[i]);
            const double hi = std::min(end, g.breaks[i + 1]);
            acc += std::fabs(g.values[i] - m) * (hi - lo);
        }
    }
    if (iv.hi > g.length()) acc += std::fabs(m) * (iv.hi - std::max(iv.lo, g.length()));
    return static_cast<double>(acc / len);
}

double mean_oscillation(const RadialFunction& f, const Shape& a) {
    return mean_oscillation(f.profile, radial_reduction(a));
}

double radial_oscillation_geometric(const RadialFunction& f, const Shape& a) {
    const std::size_t n = f.dim;
    double r_lo = 0.0;
    double r_hi = 0.0;
    double fraction = 1.0;
    if (const auto* b = std::get_if<Ball>(&a)) {
        if (norm(b->center) != 0.0) throw Error(ErrorCode::NotInBasisA, "not in basis A: ball is not centred");
        r_hi = b->radius;
    } else if (const auto* s = std::get_if<Sector>(&a)) {
        const double r = norm(s->x);
        r_lo = std::max(0.0, r - s->rho);
        r_hi = r + s->rho;
        fraction = cap_fraction(n, s->alpha);
    } else {
        throw Error(ErrorCode::NotInBasisA, "not in basis A");
    }
    if (shape_dim(a) != n) throw Error(ErrorCode::DimensionMismatch, "shape and function differ in dimension");

    const double omega = unit_ball_volume(n);
    const double dn = static_cast<double>(n);
    const double inv = 1.0 / dn;
    const auto& p = f.profile;
    struct Shell {
        double value;
        long double measure;
    };
    std::vector<Shell> shells;
    auto add = [&](double value, double lo, double hi) {
        lo = std::max(lo, r_lo);
        hi = std::min(hi, r_hi);
        if (hi > lo) {
            shells.push_back({value, static_cast<long double>(fraction) * omega *
                                         (std::pow(static_cast<long double>(hi), dn) -
                                          std::pow(static_cast<long double>(lo), dn))});
        }
    };
    // Skip pieces wholly inside r_lo; back off two for rounding.
    std::size_t first = 0;
    if (r_lo > 0.0) {
        const double t_lo = omega * std::pow(r_lo, dn);
        const auto it = std::upper_bound(p.breaks.begin(), p.breaks.end(), t_lo);
        first = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - p.breaks.begin()) - 2));
    }
    double prev = first == 0 ? 0.0 : std::pow(p.breaks[first] / omega, inv);
    for (std::size_t j = first; j < p.pieces(); ++j) {
        const double next = std::pow(p.breaks[j + 1] / omega, inv);
        if (next > r_lo && prev < r_hi) add(p.values[j], prev, next);
        prev = next;
        if (prev >= r_hi) break;
    }
    if (r_hi > prev) add(0.0, prev, r_hi);

    long double total = 0.0L;
    long double sum = 0.0L;
    for (const auto& s : shells) {
        total += s.measure;
        sum += s.measure * s.value;
    }
    if (!(total > 0.0L)) throw Error(ErrorCode::EmptyShape, "empty shape");
    const long double m = sum / total;
    long double acc = 0.0L;
    for (const auto& s : shells) acc += s.measure * std::fabs(s.value - m);
    return static_cast<double>(acc / total);
}

nlohmann::json OscillationReport::to_json() const {
    nlohmann::json j{{"value", value},
                     {"unrefined", unrefined},
                     {"argmax", shape_to_json(argmax)},
                     {"scanned", scanned},
                     {"evaluated", evaluated}};
    if (!per_scale.empty()) j["per_scale"] = per_scale;
    return j;
}

namespace {

// Relative tolerance below which a bound is treated as tying the running best.
constexpr double kTieTolerance = 1e-12;

// f minus its global mean, with prefix tables of the centred values.
struct Centred {
    GridFunction g;
    PrefixSumTable sum;
    long double margin;
    // Tables of |g - c| at a few quantile levels c, for a second bound.
    std::vector<double> levels;
    std::vector<PrefixSumTable> deviations;

    // Interleaved prefix sums of (g, g^2) over the (e+1)^n corner lattice.
    std::vector<long double> moments;
    std::array<std::size_t, kMaxDim> strides{};

    explicit Centred(const GridFunction& f)
        : g(centre(f)), sum(g), margin(0.0L) {
        build_moments();
        long double top = 0.0L;
        for (double v : g.values()) top = std::max(top, static_cast<long double>(v) * v);
        // Covers rounding in the prefix sums.
        margin = 64.0L * std::numeric_limits<long double>::epsilon() *
                 static_cast<long double>(g.size()) * top;
    }

    static GridFunction centre(const GridFunction& f) {
        long double s = 0.0L;
        for (double v : f.values()) s += v;
        const auto m = static_cast<double>(s / static_cast<long double>(f.size()));
        return f.map([m](double v) { return v - m; });
    }

    void add_levels(std::size_t count) {
        std::vector<double> sorted(g.values().begin(), g.values().end());
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < count; ++i) {
            const double c = sorted[(2 * i + 1) * sorted.size() / (2 * count)];
            if (levels.empty() || c != levels.back()) levels.push_back(c);
        }
        for (double c : levels) deviations.emplace_back(g.map([c](double v) { return std::fabs(v - c); }));
    }

    void build_moments() {
        const std::size_t n = g.dim();
        std::size_t total = 1;
        for (std::size_t a = n; a-- > 0;) {
            strides[a] = total;
            total *= g.extent(a) + 1;
        }
        moments.assign(2 * total, 0.0L);
        std::array<std::size_t, kMaxDim> idx{};
        for (std::size_t t = 0; t < total; ++t) {
            bool interior = true;
            std::size_t cell = 0;
            for (std::size_t a = 0; a < n; ++a) {
                interior = interior && idx[a] > 0;
                if (interior) cell += (idx[a] - 1) * g.strides()[a];
            }
            if (interior) {
                // Inclusion-exclusion over the lower neighbours.
                const long double v = g[cell];
                long double s1 = v;
                long double s2 = v * v;
                for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
                    std::size_t u = t;
                    for (std::size_t a = 0; a < n; ++a) {
                        if (mask & (std::size_t{1} << a)) u -= strides[a];
                    }
                    const bool odd = std::popcount(mask) % 2 == 1;
                    s1 += odd ? moments[2 * u] : -moments[2 * u];
                    s2 += odd ? moments[2 * u + 1] : -moments[2 * u + 1];
                }
                moments[2 * t] = s1;
                moments[2 * t + 1] = s2;
            }
            std::size_t a = n;
            while (a-- > 0) {
                if (++idx[a] <= g.extent(a)) break;
                idx[a] = 0;
            }
        }
    }

    // Standard deviation over the box, an upper bound for O by Cauchy-Schwarz.
    double bound(const IndexBox& box) const {
        const std::size_t n = box.dim;
        long double s1 = 0.0L;
        long double s2 = 0.0L;
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            std::size_t t = 0;
            std::size_t lows = 0;
            for (std::size_t a = 0; a < n; ++a) {
                const bool high = mask & (std::size_t{1} << a);
                t += (high ? box.hi[a] : box.lo[a]) * strides[a];
                lows += !high;
            }
            if (lows % 2 == 0) {
                s1 += moments[2 * t];
                s2 += moments[2 * t + 1];
            } else {
                s1 -= moments[2 * t];
                s2 -= moments[2 * t + 1];
            }
        }
        const auto count = static_cast<long double>(box.cell_count());
        const long double m = s1 / count;
        return static_cast<double>(std::sqrt(std::max(0.0L, s2 / count - m * m) + margin));
    }

    // mean |g - c| + |c - mean g| >= O for the levels next to the mean.
    double level_bound(const IndexBox& box) const {
        if (levels.empty()) return std::numeric_limits<double>::infinity();
        const auto count = static_cast<long double>(box.cell_count());
        const long double m = sum.value_sum(box) / count;
        const auto it = std::lower_bound(levels.begin(), levels.end(), static_cast<double>(m));
        const std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - levels.begin()), levels.size() - 1);
        const std::size_t lo = hi > 0 ? hi - 1 : 0;
        long double best = std::numeric_limits<long double>::infinity();
        for (std::size_t k : {lo, hi}) {
            const long double dev = deviations[k].value_sum(box) / count;
            best = std::min(best, dev + std::fabs(levels[k] - m));
        }
        return static_cast<double>(best * (1.0L + 1e-15L) + std::sqrt(margin));
    }

    double exact(const IndexBox& box) const { return mean_oscillation(g, sum, box); }
};

struct Candidate {
    double value = 0.0;
    std::size_t order = 0;
    IndexBox box;
};

bool better(const Candidate& a, const Candidate& b) {
    return a.value > b.value || (a.value == b.value && a.order < b.order);
}

void keep_top(std::vector<Candidate>& top, const Candidate& c, std::size_t limit) {
    if (limit == 0) return;
    for (const auto& t : top) {
        if (t.box == c.box) return;
    }
    if (top.size() == limit && !better(c, top.back())) return;
    top.insert(std::upper_bound(top.begin(), top.end(), c, better), c);
    if (top.size() > limit) top.pop_back();
}

struct ScanState {
    Candidate best;
    bool have_best = false;
    std::vector<double> per_scale;
    std::vector<Candidate> top;
    std::size_t evaluated = 0;

    void record(const Candidate& c, std::size_t scale, const ScanOptions& opt) {
        ++evaluated;
        if (!have_best || better(c, best)) {
            best = c;
            have_best = true;
        }
        if (opt.per_scale) per_scale[scale] = std::max(per_scale[scale], c.value);
        keep_top(top, c, opt.refine_candidates);
    }
};

enum class Family { Cube, FalseCube, Rectangle };

struct Refined {
    double value;
    Box box;
};

// Coordinate search over real-valued boxes of the same family.
Refined refine_box(const GridFunction& g, Family family, const IndexBox& start) {
    const std::size_t n = g.dim();
    Box cur = Box::from_cells(start);
    double val = mean_oscillation(g, cur);
    std::array<double, kMaxDim> ratio{};
    if (family != Family::Rectangle) {
        double side = static_cast<double>(start.side(0));
        for (std::size_t a = 1; a < n; ++a) side = std::min(side, static_cast<double>(start.side(a)));
        for (std::size_t a = 0; a < n; ++a) ratio[a] = static_cast<double>(start.side(a)) / side;
    }
    constexpr double kMinSide = 1.0 / 1024.0;
    auto valid = [&](const Box& b) {
        for (std::size_t a = 0; a < n; ++a) {
            if (b.lo[a] < 0.0 || b.hi[a] > static_cast<double>(g.extent(a))) return false;
            if (!(b.side(a) >= kMinSide)) return false;
        }
        return true;
    };
    auto try_move = [&](const Box& b) {
        if (!valid(b)) return false;
        const double v = mean_oscillation(g, b);
        if (v > val * (1.0 + 1e-13) && v > val) {
            val = v;
            cur = b;
            return true;
        }
        return false;
    };

    for (double delta = 0.5; delta >= 1.0 / 256.0; delta *= 0.5) {
        for (int iter = 0; iter < 64; ++iter) {
            bool improved = false;
            for (std::size_t a = 0; a < n && !improved; ++a) {
                for (double s : {delta, -delta}) {
                    Box b = cur;
                    b.lo[a] += s;
                    b.hi[a] += s;
                    if (try_move(b)) {
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved && family == Family::Rectangle) {
                for (std::size_t a = 0; a < n && !improved; ++a) {
                    for (double s : {delta, -delta}) {
                        Box lo = cur;
                        lo.lo[a] += s;
                        Box hi = cur;
                        hi.hi[a] += s;
                        if (try_move(lo) || try_move(hi)) {
                            improved = true;
                            break;
                        }
                    }
                }
            } else if (!improved) {
                for (std::size_t corner = 0; corner < (std::size_t{1} << n) && !improved; ++corner) {
                    for (double s : {delta, -delta}) {
                        Box b = cur;
                        for (std::size_t a = 0; a < n; ++a) {
                            const double grow = ratio[a] * s;
                            if (corner & (std::size_t{1} << a)) {
                                b.lo[a] -= grow;
                            } else {
                                b.hi[a] += grow;
                            }
                        }
                        if (try_move(b)) {
                            improved = true;
                            break;
                        }
                    }
                }
            }
            if (!improved) break;
        }
    }
    return {val, cur};
}

}  // namespace

OscillationReport bmo_seminorm(const GridFunction& f, const BasisDescriptor& basis,
                               const ScanOptions& opt) {
    if (!basis.cell_enumerable()) {
        throw Error(ErrorCode::NotCellEnumerable,
                    "not cell-enumerable: basis " + to_string(basis.family));
    }
    Centred c(f);
    if (c.g.size() * 32 <= (std::size_t{1} << 22)) c.add_levels(32);
    std::size_t max_scale = 0;
    for (auto d : f.extents()) max_scale = std::max(max_scale, d);

    // Pass 1: the shapes with the largest bounds seed the running maximum.
    struct Seed {
        double bound;
        std::size_t order;
        IndexBox box;
        std::size_t scale;
        bool operator>(const Seed& o) const {
            return bound > o.bound || (bound == o.bound && order < o.order);
        }
    };
    std::priority_queue<Seed, std::vector<Seed>, std::greater<>> heap;
    const std::size_t scanned = count_shapes(basis, f.extents());
    if (scanned == 0) throw Error(ErrorCode::EmptyShape, "empty shape: basis has no shapes on this grid");
    // Large bases are seeded from a coarser placement grid; seeds are
    // evaluated again in pass 2, so they only set the starting threshold.
    BasisDescriptor coarse = basis;
    if (basis.family != BasisFamily::Custom && scanned > 200000) {
        std::size_t s = 1;
        while (static_cast<std::size_t>(std::pow(static_cast<double>(s), static_cast<double>(f.dim()))) < 8) ++s;
        coarse.stride = basis.stride * s;
    }
    std::size_t seen = 0;
    for_each_shape(coarse, f.extents(), [&](const IndexBox& box, std::size_t scale) {
        const Seed s{c.bound(box), seen++, box, scale};
        if (heap.size() < std::max<std::size_t>(opt.seeds, 1)) {
            heap.push(s);
        } else if (s > heap.top()) {
            heap.pop();
            heap.push(s);
        }
    });

    ScanState seed_state;
    seed_state.per_scale.assign(opt.per_scale ? max_scale + 1 : 0, 0.0);
    while (!heap.empty()) {
        const Seed s = heap.top();
        heap.pop();
        // Seeds lose ties to the same shape found in pass 2.
        seed_state.record({c.exact(s.box), std::numeric_limits<std::size_t>::max(), s.box}, s.scale, opt);
    }

    // Pass 2: evaluate everything whose bound beats the running maximum.
    const std::size_t workers = std::max<std::size_t>(opt.threads, 1);
    std::vector<ScanState> states(workers, seed_state);
    for (auto& s : states) s.evaluated = 0;
    auto run = [&](std::size_t w) {
        ScanState& st = states[w];
        std::size_t order = 0;
        for_each_shape(basis, f.extents(), [&](const IndexBox& box, std::size_t scale) {
            const std::size_t k = order++;
            if (k % workers != w) return;
            const double threshold = (opt.per_scale ? st.per_scale[scale] : st.best.value) * (1.0 + kTieTolerance);
            if (c.bound(box) <= threshold) return;
            if (c.level_bound(box) <= threshold) return;
            st.record({c.exact(box), k, box}, scale, opt);
        });
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }

    ScanState total = seed_state;
    for (const auto& st : states) {
        total.evaluated += st.evaluated;
        if (better(st.best, total.best)) total.best = st.best;
        for (std::size_t s = 0; s < total.per_scale.size(); ++s) {
            total.per_scale[s] = std::max(total.per_scale[s], st.per_scale[s]);
        }
        for (const auto& cand : st.top) keep_top(total.top, cand, opt.refine_candidates);
    }

    OscillationReport report;
    report.value = total.best.value;
    report.unrefined = total.best.value;
    report.argmax = Box::from_cells(total.best.box);
    report.scanned = scanned;
    report.evaluated = total.evaluated;
    report.per_scale = std::move(total.per_scale);

    if (opt.refine && basis.family != BasisFamily::Custom && report.value > 0.0) {
        const Family family = basis.family == BasisFamily::Cubes       ? Family::Cube
                              : basis.family == BasisFamily::FalseCubes ? Family::FalseCube
                                                                        : Family::Rectangle;
        for (const auto& cand : total.top) {
            const auto r = refine_box(c.g, family, cand.box);
            if (r.value > report.value) {
                report.value = r.value;
                report.argmax = r.box;
            }
        }
    }
    return report;
}

double blo_functional(const GridFunction& f, const BasisDescriptor& basis) {
    const PrefixSumTable table(f);
    const auto values = f.values();
    double best = 0.0;
    for_each_shape(basis, f.extents(), [&](const IndexBox& box, std::size_t) {
        double lowest = values[0];
        bool first = true;
        for_each_row(f, box, [&](std::size_t base, std::size_t len) {
            const auto it = std::min_element(values.begin() + static_cast<std::ptrdiff_t>(base),
                                             values.begin() + static_cast<std::ptrdiff_t>(base + len));
            if (first || *it < lowest) lowest = *it;
            first = false;
        });
        best = std::max(best, box_mean(table, box) - lowest);
    });
    return best;
}

PartitionBounds partition_bounds(const GridFunction& f, const PrefixSumTable& table,
                                 const IndexBox& r, double bmo) {
    const auto info = classify_false_cube(r);
    if (!info) throw Error(ErrorCode::NotAFalseCube, "not a false cube");
    const long double fr = table.value_sum(r) / static_cast<long double>(r.cell_count());
    long double sum = 0.0L;
    const auto subs = false_cube_subcubes(r, *info);
    for (const auto& q : subs) {
        const long double fq = table.value_sum(q) / static_cast<long double>(q.cell_count());
        sum += std::fabs(fq - fr);
    }
    PartitionBounds out;
    out.m = info->long_axes.size();
    out.lower = static_cast<double>(sum / static_cast<long double>(subs.size()));
    out.osc = mean_oscillation(f, table, r);
    out.upper = bmo + out.lower;
    return out;
}

void for_each_interval_partition(const GridFunction& f, double bmo,
                                 const std::function<void(const IndexBox&, const PartitionBounds&)>& visit) {
    if (f.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "interval partition scan needs a 1-D grid");
    const auto values = f.values();
    const std::size_t n = values.size();
    std::vector<long double> prefix(n + 1, 0.0L);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + values[i];
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    const std::size_t u = sorted.size();
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < n; ++i) {
        rank[i] = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin());
    }
    // Fenwick trees over value ranks: counts and sums of the inserted cells.
    std::vector<std::size_t> count(u + 1);
    std::vector<long double> sum(u + 1);
    auto mean = [&](std::size_t a, std::size_t b) {
        return (prefix[b] - prefix[a]) / static_cast<long double>(b - a);
    };
    IndexBox box;
    box.dim = 1;
    for (std::size_t a = 0; a < n; ++a) {
        std::fill(count.begin(), count.end(), 0);
        std::fill(sum.begin(), sum.end(), 0.0L);
        std::size_t total = 0;
        long double total_sum = 0.0L;
        for (std::size_t b = a + 1; b <= n; ++b) {
            for (std::size_t k = rank[b - 1] + 1; k <= u; k += k & (~k + 1)) {
                ++count[k];
                sum[k] += values[b - 1];
            }
            ++total;
            total_sum += values[b - 1];
            const std::size_t len = b - a;
            const long double fr = mean(a, b);
            const auto m = static_cast<double>(fr);
            // Cells strictly above m: ranks past upper_bound(m).
            const auto cut = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), m) - sorted.begin());
            std::size_t below = 0;
            long double below_sum = 0.0L;
            for (std::size_t k = cut; k > 0; k -= k & (~k + 1)) {
                below += count[k];
                below_sum += sum[k];
            }
            const long double above = total_sum - below_sum - static_cast<long double>(m) * static_cast<long double>(total - below);
            PartitionBounds p;
            p.osc = static_cast<double>(2.0L * above / static_cast<long double>(len));
            if (len % 2 == 0) {
                p.m = 1;
                const std::size_t mid = a + len / 2;
                p.lower = static_cast<double>((std::fabs(mean(a, mid) - fr) + std::fabs(mean(mid, b) - fr)) / 2.0L);
            }
            p.upper = bmo + p.lower;
            box.lo[0] = a;
            box.hi[0] = b;
            visit(box, p);
        }
    }
}

NeighborGap neighbor_mean_gap(const GridFunction& f) {
    const PrefixSumTable table(f);
    const std::size_t n = f.dim();
    NeighborGap out;
    bool have = false;
    std::size_t top = f.extent(0);
    for (std::size_t a = 1; a < n; ++a) top = std::min(top, f.extent(a));
    for (std::size_t k = 1; k <= top; ++k) {
        for (std::size_t axis = 0; axis < n; ++axis) {
            if (2 * k > f.extent(axis)) continue;
            IndexBox q;
            q.dim = n;
            for (std::size_t a = 0; a < n; ++a) {
                q.lo[a] = 0;
                q.hi[a] = k;
            }
            while (true) {
                IndexBox p = q;
                p.lo[axis] += k;
                p.hi[axis] += k;
                const double gap = std::fabs(box_mean(table, q) - box_mean(table, p));
                if (!have || gap > out.gap) {
                    out = {gap, q, p};
                    have = true;
                }
                std::size_t a = n;
                bool done = true;
                while (a-- > 0) {
                    const std::size_t limit = f.extent(a) - (a == axis ? k : 0);
                    ++q.lo[a];
                    ++q.hi[a];
                    if (q.hi[a] <= limit) {
                        done = false;
                        break;
                    }
                    q.lo[a] = 0;
                    q.hi[a] = k;
                }
                if (done) break;
            }
        }
    }
    return out;
}

namespace {

// Prefix moments of a step function over its pieces.
struct StepMoments {
    std::vector<long double> t;
    std::vector<long double> p1;
    std::vector<long double> p2;
    long double margin = 0.0L;

    explicit StepMoments(const StepFunction1D& g) {
        const std::size_t k = g.pieces();
        t.assign(k + 1, 0.0L);
        p1.assign(k + 1, 0.0L);
        p2.assign(k + 1, 0.0L);
        for (std::size_t i = 0; i < k; ++i) {
            const long double w = static_cast<long double>(g.breaks[i + 1]) - g.breaks[i];
            t[i + 1] = g.breaks[i + 1];
            p1[i + 1] = p1[i] + w * g.values[i];
            p2[i + 1] = p2[i] + w * g.values[i] * g.values[i];
        }
        if (k > 0) {
            const long double mean = p1[k] / t[k];
            margin = 1e-10L * std::max(0.0L, p2[k] / t[k] - mean * mean) + 1e-300L;
        }
    }

    double bound(std::size_t p, std::size_t q) const {
        const long double len = t[q] - t[p];
        const long double m = (p1[q] - p1[p]) / len;
        const long double var = (p2[q] - p2[p]) / len - m * m;
        return static_cast<double>(std::sqrt(std::max(0.0L, var) + margin));
    }

    // O <= (1/L) int |g - c| + |c - m| for every level c.
    std::vector<long double> levels;
    std::vector<std::vector<long double>> dev;
    long double slop = 0.0L;

    void add_levels(const StepFunction1D& g, std::size_t count) {
        std::vector<double> v = g.values;
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        if (v.size() < 2) return;
        const std::size_t k = g.pieces();
        for (std::size_t j = 0; j < count; ++j) {
            levels.push_back(v[(j * (v.size() - 1)) / (count - 1)]);
        }
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
        dev.assign(levels.size(), std::vector<long double>(k + 1, 0.0L));
        long double top = 0.0L;
        for (std::size_t j = 0; j < levels.size(); ++j) {
            for (std::size_t i = 0; i < k; ++i) {
                dev[j][i + 1] = dev[j][i] + (t[i + 1] - t[i]) * std::fabs(g.values[i] - levels[j]);
            }
            top = std::max(top, dev[j][k]);
        }
        slop = 64.0L * std::numeric_limits<long double>::epsilon() * top;
    }

    double level_bound(std::size_t p, std::size_t q) const {
        const long double len = t[q] - t[p];
        const long double m = (p1[q] - p1[p]) / len;
        long double best = std::numeric_limits<long double>::infinity();
        for (std::size_t j = 0; j < levels.size(); ++j) {
            best = std::min(best, (dev[j][q] - dev[j][p] + slop) / len + std::fabs(levels[j] - m));
        }
        return static_cast<double>(best * (1.0L + 1e-15L));
    }
};

// Exact O(g, (t_p, t_q)) between breakpoints.
double piece_oscillation(const StepFunction1D& g, const StepMoments& mom, bool monotone,
                         std::size_t p, std::size_t q) {
    const long double len = mom.t[q] - mom.t[p];
    const long double m = (mom.p1[q] - mom.p1[p]) / len;
    if (monotone) {
        // Non-increasing: the pieces above the mean form a prefix.
        auto first_below = std::partition_point(
            g.values.begin() + static_cast<std::ptrdiff_t>(p),
            g.values.begin() + static_cast<std::ptrdiff_t>(q), [&](double v) { return v >= m; });
        const auto c = static_cast<std::size_t>(first_below - g.values.begin());
        const long double above = (mom.p1[c] - mom.p1[p]) - m * (mom.t[c] - mom.t[p]);
        return static_cast<double>(std::max(0.0L, 2.0L * above / len));
    }
    long double acc = 0.0L;
    for (std::size_t i = p; i < q; ++i) {
        acc += std::fabs(g.values[i] - m) * (mom.t[i + 1] - mom.t[i]);
    }
    return static_cast<double>(acc / len);
}

template <typename Exact>
IntervalReport scan_intervals(const StepFunction1D& g, const StepMoments& mom, Exact&& exact,
                              std::size_t seeds) {
    const std::size_t k = g.pieces();
    IntervalReport report;
    if (k == 0) return report;
    struct Seed {
        double bound;
        std::size_t p, q;
        bool operator>(const Seed& o) const {
            return bound > o.bound || (bound == o.bound && (p < o.p || (p == o.p && q < o.q)));
        }
    };
    std::priority_queue<Seed, std::vector<Seed>, std::greater<>> heap;
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = p + 1; q <= k; ++q) {
            const Seed s{mom.bound(p, q), p, q};
            ++report.scanned;
            if (heap.size() < seeds) {
                heap.push(s);
            } else if (s > heap.top()) {
                heap.pop();
                heap.push(s);
            }
        }
    }
    double best = -1.0;
    std::size_t bp = 0;
    std::size_t bq = k;
    auto consider = [&](std::size_t p, std::size_t q) {
        ++report.evaluated;
        const double v = exact(p, q);
        if (v > best || (v == best && (p < bp || (p == bp && q < bq)))) {
            best = v;
            bp = p;
            bq = q;
        }
    };
    std::vector<std::pair<std::size_t, std::size_t>> seeded;
    while (!heap.empty()) {
        seeded.emplace_back(heap.top().p, heap.top().q);
        consider(heap.top().p, heap.top().q);
        heap.pop();
    }
    std::sort(seeded.begin(), seeded.end());
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = p + 1; q <= k; ++q) {
            if (mom.bound(p, q) <= best) continue;
            if (!mom.levels.empty() && mom.level_bound(p, q) <= best) continue;
            if (std::binary_search(seeded.begin(), seeded.end(), std::make_pair(p, q))) continue;
            consider(p, q);
        }
    }
    report.value = std::max(best, 0.0);
    report.unrefined = report.value;
    report.argmax = {g.breaks[bp], g.breaks[bq]};
    return report;
}

Interval refine_interval(const StepFunction1D& g, Interval cur, double& val) {
    const double length = g.length();
    const double unit = length / static_cast<double>(g.pieces());
    auto try_move = [&](Interval iv) {
        if (iv.lo < 0.0 || iv.hi > length || !(iv.hi - iv.lo > 1e-9 * length)) return false;
        const double v = mean_oscillation(g, iv);
        if (v > val * (1.0 + 1e-13) && v > val) {
            val = v;
            cur = iv;
            return true;
        }
        return false;
    };
    for (double delta = 4.0 * unit; delta >= unit / 256.0; delta *= 0.5) {
        for (int iter = 0; iter < 64; ++iter) {
            bool improved = false;
            for (double s : {delta, -delta}) {
                if (try_move({cur.lo + s, cur.hi}) || try_move({cur.lo, cur.hi + s}) ||
                    try_move({cur.lo + s, cur.hi + s})) {
                    improved = true;
                    break;
                }
            }
            if (!improved) break;
        }
    }
    return cur;
}

}  // namespace

IntervalReport step_bmo(const StepFunction1D& g, bool refine) {
    StepMoments mom(g);
    mom.add_levels(g, 32);
    const bool monotone = g.non_increasing();
    auto report = scan_intervals(
        g, mom, [&](std::size_t p, std::size_t q) { return piece_oscillation(g, mom, monotone, p, q); },
        32);
    if (refine && report.value > 0.0) {
        double val = report.value;
        report.argmax = refine_interval(g, report.argmax, val);
        report.value = val;
    }
    return report;
}

IntervalReport radial_bmo_a(const RadialFunction& f) {
    const auto& g = f.profile;
    StepMoments mom(g);
    mom.add_levels(g, 32);
    return scan_intervals(
        g, mom,
        [&](std::size_t p, std::size_t q) {
            const Shape a = shape_for_interval({g.breaks[p], g.breaks[q]}, f.dim);
            return mean_oscillation(g, radial_reduction(a));
        },
        32);
}

}  // namespace oscbound
