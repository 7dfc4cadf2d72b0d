#include "oscbound/harness.hpp"

#include "oscbound/concentration.hpp"
#include "oscbound/cz.hpp"
#include "oscbound/equivalence.hpp"
#include "oscbound/error.hpp"
#include "oscbound/grid_io.hpp"
#include "oscbound/oscillation.hpp"
#include "oscbound/rearrangement.hpp"
#include "oscbound/sphere.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace oscbound {

nlohmann::json ConstantsRow::to_json() const {
    return {{"n", n},
            {"omega_n", omega},
            {"dyadic", dyadic},
            {"bisection", bisection},
            {"rising_sun", rising_sun},
            {"wik", wik},
            {"theorem_bound", theorem},
            {"composite", composite},
            {"iso_route", iso_route},
            {"ball_over_cube", ball_over_cube},
            {"cube_over_ball", cube_over_ball},
            {"sdr_lower", sdr_lower},
            {"sdr_upper", sdr_upper},
            {"D_n", d_n}};
}

ConstantsRow constants(std::size_t n) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "dimension must be at least 1");
    const double nd = static_cast<double>(n);
    ConstantsRow c;
    c.n = n;
    c.omega = unit_ball_volume(n);
    c.dyadic = std::ldexp(1.0, static_cast<int>(n));
    c.wik = 1.0 + 2.0 * std::sqrt(nd - 1.0);
    c.theorem = 2.0 * c.wik;
    c.composite = std::min(c.dyadic, c.theorem);
    c.iso_route = std::pow(2.0, (nd + 1.0) / 2.0);
    const double root = std::pow(nd, nd / 2.0);
    c.ball_over_cube = root * c.omega / c.dyadic;
    c.cube_over_ball = c.dyadic / c.omega;
    c.sdr_lower = c.omega / (c.dyadic * c.dyadic);
    c.sdr_upper = root * c.omega;
    c.d_n = c.theorem * c.sdr_upper;
    return c;
}

// ---------------------------------------------------------------------------
// Corpus

namespace {

const std::array<std::string, kCorpusFamilies> kFamilyNames = {
    "dyadic", "piecewise", "logspike", "radial", "checkerboard", "twolevel"};

std::size_t cell_count(const std::vector<std::size_t>& ext) {
    return std::accumulate(ext.begin(), ext.end(), std::size_t{1}, std::multiplies<>());
}

template <typename Fn>
void for_each_index(const std::vector<std::size_t>& ext, Fn&& fn) {
    const std::size_t n = ext.size();
    std::array<std::size_t, kMaxDim> idx{};
    const std::size_t total = cell_count(ext);
    for (std::size_t linear = 0; linear < total; ++linear) {
        fn(idx, linear);
        std::size_t a = n;
        while (a-- > 0) {
            if (++idx[a] < ext[a]) break;
            idx[a] = 0;
        }
    }
}

std::size_t random_power_of_two(std::mt19937_64& rng, std::size_t limit) {
    std::size_t levels = 0;
    while ((std::size_t{2} << levels) <= limit) ++levels;
    return std::size_t{1} << (rng() % (levels + 1));
}

double uniform(std::mt19937_64& rng, double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
}

// Linear block index for blocks of side b.
std::size_t block_of(const std::array<std::size_t, kMaxDim>& idx,
                     const std::vector<std::size_t>& ext, std::size_t b) {
    std::size_t out = 0;
    for (std::size_t a = 0; a < ext.size(); ++a) {
        out = out * ((ext[a] + b - 1) / b) + idx[a] / b;
    }
    return out;
}

std::size_t block_count(const std::vector<std::size_t>& ext, std::size_t b) {
    std::size_t out = 1;
    for (auto e : ext) out *= (e + b - 1) / b;
    return out;
}

}  // namespace

std::string to_string(CorpusFamily family) {
    return kFamilyNames[static_cast<std::size_t>(family)];
}

CorpusFamily corpus_family_from_string(const std::string& name) {
    for (std::size_t i = 0; i < kCorpusFamilies; ++i) {
        if (kFamilyNames[i] == name) return static_cast<CorpusFamily>(i);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown corpus family: " + name);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

GridFunction generate_function(CorpusFamily family, const CorpusOptions& options,
                               std::uint64_t seed) {
    const auto& ext = options.extents;
    if (ext.empty() || ext.size() > kMaxDim) {
        throw Error(ErrorCode::InvalidArgument, "corpus extents must have 1 to 8 axes");
    }
    const std::size_t n = ext.size();
    const double h = 1.0 / static_cast<double>(ext[0]);
    const std::size_t min_extent = *std::min_element(ext.begin(), ext.end());
    std::mt19937_64 rng(seed);
    std::vector<double> v(cell_count(ext), 0.0);

    auto centre = [&](const std::array<std::size_t, kMaxDim>& idx, std::size_t a) {
        return (static_cast<double>(idx[a]) + 0.5) * h;
    };
    auto random_point = [&] {
        std::vector<double> x(n);
        for (std::size_t a = 0; a < n; ++a) x[a] = uniform(rng, 0.0, static_cast<double>(ext[a]) * h);
        return x;
    };

    switch (family) {
    case CorpusFamily::DyadicUnion: {
        const std::size_t b = random_power_of_two(rng, min_extent);
        const double p = options.density ? *options.density : uniform(rng, 0.1, 0.9);
        std::vector<char> on(block_count(ext, b));
        for (auto& o : on) o = uniform(rng, 0.0, 1.0) < p;
        for_each_index(ext, [&](const auto& idx, std::size_t i) { v[i] = on[block_of(idx, ext, b)] ? 1.0 : 0.0; });
        break;
    }
    case CorpusFamily::Piecewise: {
        const std::size_t b = random_power_of_two(rng, std::max<std::size_t>(1, min_extent / 2));
        std::vector<double> blocks(block_count(ext, b));
        if (rng() % 2 == 0) {
            for (auto& x : blocks) x = uniform(rng, 0.0, 1.0);
        } else {
            const double alpha = uniform(rng, 1.2, 3.0);
            for (auto& x : blocks) x = std::pow(uniform(rng, 1e-12, 1.0), -1.0 / alpha) - 1.0;
        }
        for_each_index(ext, [&](const auto& idx, std::size_t i) { v[i] = blocks[block_of(idx, ext, b)]; });
        break;
    }
    case CorpusFamily::LogSpike: {
        const auto x0 = random_point();
        for_each_index(ext, [&](const auto& idx, std::size_t i) {
            double r2 = 0.0;
            for (std::size_t a = 0; a < n; ++a) r2 += (centre(idx, a) - x0[a]) * (centre(idx, a) - x0[a]);
            v[i] = std::max(0.0, -0.5 * std::log(r2));
        });
        break;
    }
    case CorpusFamily::RadialBump: {
        const auto c = random_point();
        const double r = uniform(rng, 0.05, 0.5);
        const double amp = uniform(rng, 0.5, 5.0);
        const bool indicator = rng() % 3 == 0;
        const double power = uniform(rng, 0.5, 3.0);
        for_each_index(ext, [&](const auto& idx, std::size_t i) {
            double r2 = 0.0;
            for (std::size_t a = 0; a < n; ++a) r2 += (centre(idx, a) - c[a]) * (centre(idx, a) - c[a]);
            const double s = std::sqrt(r2) / r;
            v[i] = indicator ? (s < 1.0 ? amp : 0.0) : amp * std::pow(std::max(0.0, 1.0 - s), power);
        });
        break;
    }
    case CorpusFamily::Checkerboard: {
        const std::size_t b = random_power_of_two(rng, std::max<std::size_t>(1, min_extent / 2));
        const double low = uniform(rng, 0.0, 1.0);
        const double high = low + uniform(rng, 0.1, 3.0);
        for_each_index(ext, [&](const auto& idx, std::size_t i) {
            std::size_t parity = 0;
            for (std::size_t a = 0; a < n; ++a) parity += idx[a] / b;
            v[i] = parity % 2 ? high : low;
        });
        break;
    }
    case CorpusFamily::TwoLevel: {
        const double amp = uniform(rng, 0.5, 4.0);
        if (rng() % 2 == 0) {
            const std::size_t axis = rng() % n;
            const std::size_t cut = ext[axis] > 1 ? 1 + rng() % (ext[axis] - 1) : 1;
            for_each_index(ext, [&](const auto& idx, std::size_t i) { v[i] = idx[axis] < cut ? amp : 0.0; });
        } else {
            const std::size_t side = 1 + rng() % min_extent;
            std::array<std::size_t, kMaxDim> lo{};
            for (std::size_t a = 0; a < n; ++a) lo[a] = rng() % (ext[a] - side + 1);
            for_each_index(ext, [&](const auto& idx, std::size_t i) {
                bool inside = true;
                for (std::size_t a = 0; a < n; ++a) inside = inside && idx[a] >= lo[a] && idx[a] < lo[a] + side;
                v[i] = inside ? amp : 0.0;
            });
        }
        break;
    }
    }
    return GridFunction(ext, h, std::move(v));
}

GridFunction corpus_member(const CorpusOptions& options, std::uint64_t seed, std::size_t index) {
    const std::uint64_t s = splitmix64(seed + index);
    const double total = std::accumulate(options.weights.begin(), options.weights.end(), 0.0);
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "corpus weights must have a positive sum");
    double pick = static_cast<double>(s >> 11) * 0x1.0p-53 * total;
    std::size_t fam = 0;
    while (fam + 1 < kCorpusFamilies && (options.weights[fam] <= 0.0 || pick >= options.weights[fam])) {
        pick -= std::max(0.0, options.weights[fam]);
        ++fam;
    }
    return generate_function(static_cast<CorpusFamily>(fam), options, splitmix64(s));
}

std::vector<GridFunction> generate_corpus(const CorpusOptions& options, std::uint64_t seed,
                                          std::size_t count) {
    std::vector<GridFunction> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(corpus_member(options, seed, i));
    return out;
}

// ---------------------------------------------------------------------------
// Reports

nlohmann::json SuiteConfig::to_json() const {
    nlohmann::json j = {{"suite", suite},   {"dim", dim},         {"extents", extents},
                        {"trials", trials}, {"seed", seed},       {"weights", weights},
                        {"refine", refine}, {"supersample", supersample},
                        {"samples", samples}};
    j["density"] = density ? nlohmann::json(*density) : nlohmann::json(nullptr);
    j["slack"] = slack ? nlohmann::json(*slack) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json SuiteReport::to_json() const {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& r : trials) {
        t.push_back({{"lhs", r.lhs}, {"rhs", r.rhs}, {"ratio", r.ratio}, {"ok", r.ok}, {"witness", r.witness}});
    }
    nlohmann::json j = {{"suite", suite},         {"config", config},   {"constant", constant},
                        {"slack", slack},         {"max_ratio", max_ratio},
                        {"min_ratio", min_ratio}, {"verdict", pass ? "pass" : "fail"},
                        {"trials", t},            {"reproducers", reproducers},
                        {"wall_time_s", wall_time_s}};
    if (lower_constant) j["lower_constant"] = *lower_constant;
    return j;
}

std::string SuiteReport::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "trial,lhs,rhs,ratio,ok\n";
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const auto& r = trials[i];
        out << i << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << ',' << (r.ok ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string plot_data(const std::vector<SuiteReport>& reports) {
    std::ostringstream out;
    out.precision(17);
    out << "suite,n,constant,max_ratio\n";
    for (const auto& r : reports) {
        out << r.suite << ',' << r.config.value("dim", 0) << ',' << r.constant << ',' << r.max_ratio << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Suites

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Context {
    SuiteConfig cfg;
    CorpusOptions corpus;
    ConstantsRow c;
    double slack = 0.0;

    GridFunction member(std::size_t index) const { return corpus_member(corpus, cfg.seed, index); }
    // Stream for suite-side randomness, independent of the corpus stream.
    std::mt19937_64 rng(std::size_t trial) const {
        return std::mt19937_64(splitmix64(splitmix64(cfg.seed + trial) ^ 0x6f7363626f756e64ULL));
    }
    OscillationReport seminorm(const GridFunction& f, BasisFamily family, bool refine) const {
        BasisDescriptor b;
        b.family = family;
        ScanOptions opt;
        opt.refine = refine;
        return bmo_seminorm(f, b, opt);
    }
};

struct Suite {
    std::function<double(const ConstantsRow&)> constant;
    std::function<std::optional<double>(const ConstantsRow&)> lower;
    double slack = 1e-3;
    std::function<std::size_t(std::size_t)> default_extent;
    std::size_t min_dim = 1;
    std::size_t max_dim = 3;
    std::function<TrialResult(const Context&, std::size_t)> run;
};

// Corpus values are O(1); anything below this is rounding.
constexpr double kZeroFloor = 1e-13;

double quotient(double lhs, double rhs) {
    if (rhs > 0.0) return lhs / rhs;
    return lhs > 0.0 ? kInf : 0.0;
}

// Excess below `tol` is rounding, not a violation.
double quotient(double lhs, double rhs, double tol) {
    if (lhs > rhs && lhs <= rhs + tol) return 1.0;
    return lhs <= tol && rhs <= tol ? 0.0 : quotient(lhs, rhs);
}

double max_abs(const GridFunction& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::fabs(v));
    return m;
}

// f extended by zero: twice the extent on each axis, f in the middle.
GridFunction zero_padded(const GridFunction& f) {
    const std::size_t n = f.dim();
    std::vector<std::size_t> ext(n), shift(n);
    std::vector<double> origin(n);
    for (std::size_t a = 0; a < n; ++a) {
        ext[a] = 2 * f.extents()[a];
        shift[a] = f.extents()[a] / 2;
        origin[a] = f.origin()[a] - static_cast<double>(shift[a]) * f.cell_size();
    }
    std::vector<double> values(cell_count(ext), 0.0);
    std::vector<std::size_t> src(n);
    for_each_index(ext, [&](const auto& idx, std::size_t i) {
        for (std::size_t a = 0; a < n; ++a) {
            if (idx[a] < shift[a] || idx[a] >= shift[a] + f.extents()[a]) return;
            src[a] = idx[a] - shift[a];
        }
        values[i] = f.at(src);
    });
    return GridFunction(std::move(ext), f.cell_size(), std::move(origin), std::move(values));
}

TrialResult inequality(double lhs, double rhs, double constant, double slack, nlohmann::json witness) {
    TrialResult r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.ratio = quotient(lhs, rhs);
    r.ok = r.ratio <= constant * (1.0 + slack);
    r.witness = std::move(witness);
    return r;
}

nlohmann::json box_json(const GridFunction& f, const Box& b) {
    std::vector<double> lo(f.dim()), hi(f.dim());
    for (std::size_t a = 0; a < f.dim(); ++a) {
        lo[a] = f.origin()[a] + b.lo[a] * f.cell_size();
        hi[a] = f.origin()[a] + b.hi[a] * f.cell_size();
    }
    return shape_to_json(make_box(lo, hi));
}

nlohmann::json interval_json(const Interval& i) { return nlohmann::json::array({i.lo, i.hi}); }

std::size_t desk_extent(std::size_t n) {
    switch (n) {
    case 1: return 4096;
    case 2: return 64;
    case 3: return 16;
    default: return 8;
    }
}

std::size_t sdr_extent(std::size_t n) {
    switch (n) {
    case 1: return 256;
    case 2: return 32;
    default: return 8;
    }
}

// ||f*|| against a majorant seminorm of f.
TrialResult rearrangement_vs(const Context& ctx, std::size_t trial, BasisFamily family, double constant) {
    const auto f = ctx.member(trial);
    const auto lhs = step_bmo(decreasing_rearrangement(f));
    const auto rhs = ctx.seminorm(f, family, ctx.cfg.refine);
    return inequality(lhs.value, rhs.value, constant, ctx.slack,
                      {{"members", {trial}},
                       {"interval", interval_json(lhs.argmax)},
                       {"shape", box_json(f, rhs.argmax)},
                       {"unrefined_rhs", rhs.unrefined}});
}

TrialResult bds_trial(const Context& ctx, std::size_t trial) {
    const auto f = ctx.member(trial);
    const auto lhs = step_bmo(decreasing_rearrangement(f));
    const auto rhs = ctx.seminorm(f, BasisFamily::Cubes, ctx.cfg.refine);
    const double w = ctx.seminorm(f, BasisFamily::FalseCubes, false).value;
    const double dyadic = ctx.c.dyadic * rhs.value;
    const double false_cube = ctx.c.bisection * w;
    return inequality(lhs.value, rhs.value, ctx.c.composite, ctx.slack,
                      {{"members", {trial}},
                       {"interval", interval_json(lhs.argmax)},
                       {"shape", box_json(f, rhs.argmax)},
                       {"dyadic_bound", dyadic},
                       {"false_cube_bound", false_cube},
                       {"tighter_route", dyadic <= false_cube ? "dyadic" : "false-cube"}});
}

TrialResult wik_trial(const Context& ctx, std::size_t trial) {
    const auto f = ctx.member(trial);
    const auto lhs = ctx.seminorm(f, BasisFamily::FalseCubes, false);
    const auto rhs = ctx.seminorm(f, BasisFamily::Cubes, ctx.cfg.refine);
    return inequality(lhs.value, rhs.value, ctx.c.wik, ctx.slack,
                      {{"members", {trial}},
                       {"false_cube", box_json(f, lhs.argmax)},
                       {"cube", box_json(f, rhs.argmax)}});
}

TrialResult falsecompare_trial(const Context& ctx, std::size_t trial) {
    const auto f = ctx.member(trial);
    const auto lhs = ctx.seminorm(f, BasisFamily::Cubes, false);
    const auto rhs = ctx.seminorm(f, BasisFamily::FalseCubes, false);
    return inequality(lhs.value, rhs.value, 1.0, ctx.slack,
                      {{"members", {trial}},
                       {"cube", box_json(f, lhs.argmax)},
                       {"false_cube", box_json(f, rhs.argmax)}});
}

TrialResult neighbors_trial(const Context& ctx, std::size_t trial) {
    const auto f = ctx.member(trial);
    const auto gap = neighbor_mean_gap(f);
    const auto rhs = ctx.seminorm(f, BasisFamily::Cubes, ctx.cfg.refine);
    return inequality(gap.gap, rhs.value, 4.0, ctx.slack,
                      {{"members", {trial}},
                       {"first", box_json(f, Box::from_cells(gap.first))},
                       {"second", box_json(f, Box::from_cells(gap.second))},
                       {"cube", box_json(f, rhs.argmax)}});
}

TrialResult partition_trial(const Context& ctx, std::size_t trial) {
    const auto f = ctx.member(trial);
    const PrefixSumTable table(f);
    const double bmo = ctx.seminorm(f, BasisFamily::Cubes, false).value;
    BasisDescriptor w;
    w.family = BasisFamily::FalseCubes;
    TrialResult r;
    IndexBox worst = f.domain();
    std::size_t count = 0;
    const double tol = 1e-12 * std::max(1.0, max_abs(f));
    auto visit = [&](const IndexBox& box, const PartitionBounds& p) {
        ++count;
        const double q = std::max(quotient(p.lower, p.osc, tol), quotient(p.osc, p.upper, tol));
        if (q > r.ratio || count == 1) {
            r.ratio = q;
            r.lhs = p.osc;
            r.rhs = p.upper;
            worst = box;
        }
    };
    if (f.dim() == 1) {
        for_each_interval_partition(f, bmo, visit);
    } else {
        for_each_shape(w, f.extents(), [&](const IndexBox& box, std::size_t) {
            visit(box, partition_bounds(f, table, box, bmo));
        });
    }
    r.ok = r.ratio <= 1.0 + ctx.slack;
    r.witness = {{"members", {trial}}, {"false_cubes", count}, {"shape", box_json(f, Box::from_cells(worst))},
                 {"bmo", bmo}};
    return r;
}

ConcentrationInstance random_instance(std::mt19937_64& rng) {
    const std::size_t m = 1 + rng() % 12;
    std::vector<double> t(std::size_t{1} << m);
    std::normal_distribution<double> gauss;
    const int kind = static_cast<int>(rng() % 4);
    std::vector<double> w(m);
    for (auto& x : w) x = gauss(rng);
    for (std::size_t x = 0; x < t.size(); ++x) {
        switch (kind) {
        case 0: t[x] = gauss(rng); break;
        case 1: t[x] = std::exp(gauss(rng)); break;
        case 2: t[x] = static_cast<double>(rng() % 2); break;
        default: {
            double s = 0.1 * gauss(rng);
            for (std::size_t i = 0; i < m; ++i) s += ((x >> i) & 1) ? w[i] : 0.0;
            t[x] = s;
        }
        }
    }
    const double p = rng() % 2 ? 0.5 : uniform(rng, 0.0, 1.0);
    return ConcentrationInstance(m, std::move(t), p);
}

TrialResult concentration_trial(const Context& ctx, std::size_t trial) {
    auto rng = ctx.rng(trial);
    const auto inst = random_instance(rng);
    const auto a = check_concentration(inst);
    // Gadget on the largest false cube at the origin.
    const auto f = ctx.member(trial);
    const std::size_t min_extent = *std::min_element(f.extents().begin(), f.extents().end());
    const std::size_t side = std::max<std::size_t>(1, min_extent / 2);
    // Long sides on the leading axes keep the box a false cube.
    const std::size_t long_axes = rng() % (f.dim() + 1);
    IndexBox r{f.dim(), {}, {}};
    for (std::size_t ax = 0; ax < f.dim(); ++ax) r.hi[ax] = ax < long_axes ? 2 * side : side;
    const auto gadget = subcube_gadget(f, r);
    const auto b = check_concentration(gadget);
    const double qa = quotient(a.lhs, a.rhs);
    const double qb = quotient(b.lhs, b.rhs);
    TrialResult out;
    const bool first = qa >= qb;
    out.lhs = first ? a.lhs : b.lhs;
    out.rhs = first ? a.rhs : b.rhs;
    out.ratio = std::max(qa, qb);
    out.ok = a.lhs <= a.rhs + ctx.slack && b.lhs <= b.rhs + ctx.slack;
    out.witness = {{"members", {trial}},
                   {"instance", {{"m", inst.m}, {"p", inst.p}, {"lhs", a.lhs}, {"rhs", a.rhs}}},
                   {"gadget", {{"m", gadget.m}, {"shape", box_json(f, Box::from_cells(r))},
                               {"lhs", b.lhs}, {"rhs", b.rhs}}}};
    if (!out.ok) out.witness["instance"]["table"] = inst.table;
    return out;
}

TrialResult czd_trial(const Context& ctx, std::size_t trial) {
    auto rng = ctx.rng(trial);
    const auto g = ctx.member(trial);
    const double omega = g.domain_measure();
    const double t = omega * std::exp2(-uniform(rng, 0.0, std::log2(static_cast<double>(g.size()))));
    TrialResult r;
    r.witness = {{"members", {trial}}, {"t", t}};
    auto record = [&](const char* name, const CZDecomposition& d) {
        const auto v = validate_cz(g, d, ctx.slack);
        const double q = v.measured_c / d.c_star;
        r.ok = r.ok && v.ok && q <= 1.0 + ctx.slack;
        if (q > r.ratio) {
            r.ratio = q;
            r.lhs = v.measured_c;
            r.rhs = d.c_star;
        }
        auto j = v.to_json();
        j["gamma"] = d.gamma;
        j["pairs"] = d.pairs.size();
        r.witness[name] = j;
        return v;
    };
    record("dyadic", dyadic_cz_from_t(g, t));
    record("bisection", bisection_cz(g, t));
    if (g.dim() == 1) {
        const auto v = record("rising_sun", rising_sun_1d(g, level_from_t(g, t)));
        r.ok = r.ok && v.equal_mean_error <= ctx.slack;
    }
    return r;
}

TrialResult hardy_littlewood_trial(const Context& ctx, std::size_t trial) {
    auto rng = ctx.rng(trial);
    const auto f = ctx.member(trial);
    TrialResult r;
    r.witness = {{"members", {trial}}};
    for (int k = 0; k < 10; ++k) {
        std::vector<std::size_t> cells;
        switch (k % 4) {
        case 0: {
            const double p = uniform(rng, 0.01, 1.0);
            for (std::size_t c = 0; c < f.size(); ++c) {
                if (uniform(rng, 0.0, 1.0) < p) cells.push_back(c);
            }
            break;
        }
        case 1: {
            IndexBox b{f.dim(), {}, {}};
            for (std::size_t a = 0; a < f.dim(); ++a) {
                b.lo[a] = rng() % f.extent(a);
                b.hi[a] = b.lo[a] + 1 + rng() % (f.extent(a) - b.lo[a]);
            }
            for_each_row(f, b, [&](std::size_t base, std::size_t len) {
                for (std::size_t i = 0; i < len; ++i) cells.push_back(base + i);
            });
            break;
        }
        case 2: {
            // The largest |values|: the equality case.
            std::vector<std::size_t> order(f.size());
            std::iota(order.begin(), order.end(), 0);
            const std::size_t count = 1 + rng() % f.size();
            std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                              [&](std::size_t a, std::size_t b) { return std::fabs(f[a]) > std::fabs(f[b]); });
            cells.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
            break;
        }
        default: {
            const std::size_t count = 1 + rng() % std::min<std::size_t>(f.size(), 64);
            for (std::size_t i = 0; i < count; ++i) cells.push_back(rng() % f.size());
        }
        }
        if (cells.empty()) cells.push_back(rng() % f.size());
        const auto hl = hardy_littlewood_check(f, cells);
        const double q = quotient(hl.lhs, hl.rhs);
        r.ok = r.ok && hl.lhs <= hl.rhs * (1.0 + ctx.slack);
        if (q >= r.ratio) {
            r.ratio = q;
            r.lhs = hl.lhs;
            r.rhs = hl.rhs;
        }
    }
    return r;
}

std::size_t mismatches(const StepFunction1D& a, const StepFunction1D& b) {
    std::size_t bad = a.breaks.size() + a.values.size() > b.breaks.size() + b.values.size()
                          ? a.breaks.size() + a.values.size() - b.breaks.size() - b.values.size()
                          : b.breaks.size() + b.values.size() - a.breaks.size() - a.values.size();
    for (std::size_t i = 0; i < std::min(a.breaks.size(), b.breaks.size()); ++i) bad += a.breaks[i] != b.breaks[i];
    for (std::size_t i = 0; i < std::min(a.values.size(), b.values.size()); ++i) bad += a.values[i] != b.values[i];
    return bad;
}

TrialResult equimeasurable_trial(const Context& ctx, std::size_t trial) {
    auto rng = ctx.rng(trial);
    const auto f = ctx.member(trial);
    const auto mu = distribution(f);
    const auto star = decreasing_rearrangement(f);
    std::vector<double> shuffled(f.values().begin(), f.values().end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto g = f.with_values(std::move(shuffled));
    const std::size_t bad = mismatches(distribution(star), mu) + mismatches(decreasing_rearrangement(g), star) +
                            mismatches(decreasing_rearrangement(star), star);
    TrialResult r;
    r.lhs = static_cast<double>(bad);
    r.rhs = static_cast<double>(mu.breaks.size() + mu.values.size());
    r.ratio = quotient(r.lhs, r.rhs);
    r.ok = bad == 0;
    r.witness = {{"members", {trial}}, {"pieces", star.pieces()}};
    return r;
}

// Shape in basis A: from a random interval or from a random ball.
Shape random_a_shape(std::mt19937_64& rng, std::size_t n, double length) {
    if (rng() % 2 == 0) {
        double lo = rng() % 5 == 0 ? 0.0 : uniform(rng, 0.0, length);
        double hi = uniform(rng, 0.0, length);
        if (lo > hi) std::swap(lo, hi);
        if (!(hi > lo)) hi = lo + 1e-3 * length;
        return shape_for_interval({lo, hi}, n);
    }
    const double reach = std::pow(length / unit_ball_volume(n), 1.0 / static_cast<double>(n));
    std::normal_distribution<double> gauss;
    std::vector<double> x(n);
    double norm2 = 0.0;
    for (auto& c : x) {
        c = gauss(rng);
        norm2 += c * c;
    }
    const double dist = uniform(rng, 0.0, reach);
    for (auto& c : x) c *= dist / std::sqrt(norm2);
    const double r = uniform(rng, 0.01, 0.5) * reach;
    return sector_for_ball(make_ball(x, r)).middle;
}

double equality_error(double lhs, double rhs) { return std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs)); }

TrialResult equality(double lhs, double rhs, double slack) {
    TrialResult r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.ratio = lhs == rhs ? 1.0 : quotient(lhs, rhs);
    r.ok = equality_error(lhs, rhs) <= slack;
    return r;
}

TrialResult radial_isometry_trial(const Context& ctx, std::size_t trial) {
    auto rng = ctx.rng(trial);
    const auto f = ctx.member(trial);
    const double length = f.domain_measure();
    const RadialFunction rf{decreasing_rearrangement(f).padded(2.0 * length), ctx.cfg.dim};
    TrialResult worst;
    double worst_error = -1.0;
    for (int k = 0; k < 20; ++k) {
        const Shape a = random_a_shape(rng, ctx.cfg.dim, 2.0 * length);
        const double lhs = radial_oscillation_geometric(rf, a);
        const double rhs = mean_oscillation(rf.profile, radial_reduction(a));
        const double err = equality_error(lhs, rhs);
        if (err > worst_error) {
            worst_error = err;
            worst = equality(lhs, rhs, ctx.slack);
            worst.witness = {{"members", {trial}}, {"shape", shape_to_json(a)},
                             {"interval", interval_json(radial_reduction(a))}, {"error", err}};
        }
    }
    return worst;
}

StepFunction1D profile_difference(const Context& ctx, std::size_t trial, nlohmann::json& members) {
    const auto f1 = ctx.member(2 * trial);
    const auto s1 = decreasing_rearrangement(f1);
    if (trial % 10 == 0) {
        members = {2 * trial};
        return s1;
    }
    members = {2 * trial, 2 * trial + 1};
    return s1 - decreasing_rearrangement(ctx.member(2 * trial + 1));
}

TrialResult sdr_ai_trial(const Context& ctx, std::size_t trial) {
    nlohmann::json members;
    const auto d = profile_difference(ctx, trial, members);
    const auto profile = d.padded(2.0 * d.length());
    const auto lhs = radial_bmo_a({profile, ctx.cfg.dim});
    const auto rhs = step_bmo(profile);
    auto r = equality(lhs.value, rhs.value, ctx.slack);
    // The maximizing shape is also evaluated shell by shell.
    const Shape best = shape_for_interval(lhs.argmax, ctx.cfg.dim);
    const double geometric = radial_oscillation_geometric({profile, ctx.cfg.dim}, best);
    const double err = equality_error(geometric, lhs.value);
    r.ok = r.ok && err <= ctx.slack;
    r.witness = {{"members", members},
                 {"shape", shape_to_json(best)},
                 {"interval", interval_json(rhs.argmax)},
                 {"geometric", geometric},
                 {"geometric_error", err}};
    return r;
}

std::size_t sample_side(std::size_t n) { return n == 1 ? 8192 : n == 2 ? 256 : n == 3 ? 40 : 12; }

// O(F, Q) for a radial F from k^n stratified points.
double sampled_oscillation(const RadialFunction& f, const Box& q, std::size_t k) {
    const std::size_t n = q.dim;
    std::vector<std::size_t> ext(n, k);
    std::vector<double> samples(cell_count(ext));
    std::vector<double> x(n);
    for_each_index(ext, [&](const auto& idx, std::size_t i) {
        for (std::size_t a = 0; a < n; ++a) {
            x[a] = q.lo[a] + (static_cast<double>(idx[a]) + 0.5) / static_cast<double>(k) * q.side(a);
        }
        samples[i] = f(x);
    });
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (*lo == *hi) return 0.0;
    long double sum = 0.0L;
    for (double v : samples) sum += v;
    const double mean = static_cast<double>(sum / static_cast<long double>(samples.size()));
    long double dev = 0.0L;
    for (double v : samples) dev += std::fabs(v - mean);
    return static_cast<double>(dev / static_cast<long double>(samples.size()));
}

// Cubes from the chain I -> A -> inscribed and doubled balls -> circumscribed cubes.
std::pair<double, Box> witness_cube(const RadialFunction& f, const Interval& i) {
    const auto w = ball_for_sector(shape_for_interval(i, f.dim));
    std::pair<double, Box> best{-1.0, Box{}};
    for (const Shape& ball : {w.inner, w.outer}) {
        const Box cube = std::get<Box>(circumscribe_cube_ball(ball).outer);
        const double v = sampled_oscillation(f, cube, sample_side(f.dim));
        if (v > best.first) best = {v, cube};
    }
    return best;
}

Rasterized raster_for(const Context& ctx, const StepFunction1D& profile) {
    const std::size_t n = ctx.cfg.dim;
    std::vector<std::size_t> ext(n);
    for (std::size_t a = 0; a < n; ++a) ext[a] = 2 * ctx.corpus.extents[a];
    const double h = 2.0 / static_cast<double>(ext[0]);
    return rasterize_radial({profile, n}, ext, h, std::vector<double>(n, -1.0), ctx.cfg.supersample);
}

TrialResult sdr_bilipschitz_trial(const Context& ctx, std::size_t trial) {
    nlohmann::json members;
    const auto d = profile_difference(ctx, trial, members);
    const auto raster = raster_for(ctx, d);
    const auto profile = d.padded(raster.grid.domain_measure());
    const auto one = step_bmo(profile);
    const double n1 = one.value;
    const auto grid = ctx.seminorm(raster.grid, BasisFamily::Cubes, ctx.cfg.refine);
    // Features thinner than a raster cell vanish from the raster; the witness
    // cube scales with the feature.
    const auto [sampled, cube] = n1 > 0.0 ? witness_cube({profile, ctx.cfg.dim}, one.argmax)
                                          : std::pair<double, Box>{0.0, Box{}};
    const double n2 = std::max(grid.value, sampled);
    TrialResult r;
    r.lhs = n2;
    r.rhs = n1;
    if (n1 == 0.0 && n2 == 0.0) {
        r.ratio = 0.0;
    } else {
        r.ratio = quotient(n2, n1);
        r.ok = r.ratio >= ctx.c.sdr_lower * (1.0 - ctx.slack) && r.ratio <= ctx.c.sdr_upper * (1.0 + ctx.slack);
    }
    r.witness = {{"members", members},
                 {"cube", box_json(raster.grid, grid.argmax)},
                 {"raster_value", grid.value},
                 {"interval", interval_json(one.argmax)},
                 {"witness_value", sampled},
                 {"support_clipped", raster.support_clipped},
                 {"rasterized", true}};
    if (n1 > 0.0) r.witness["witness_cube"] = shape_to_json(cube);
    return r;
}

TrialResult sdr_corollary_trial(const Context& ctx, std::size_t trial) {
    const auto f = ctx.member(trial);
    const auto raster = raster_for(ctx, decreasing_rearrangement(f));
    const auto lhs = ctx.seminorm(raster.grid, BasisFamily::Cubes, false);
    const auto padded = zero_padded(f);
    const auto rhs = ctx.seminorm(padded, BasisFamily::Cubes, ctx.cfg.refine);
    return inequality(lhs.value, rhs.value, ctx.c.d_n, ctx.slack,
                      {{"members", {trial}},
                       {"sf_cube", box_json(raster.grid, lhs.argmax)},
                       {"cube", box_json(padded, rhs.argmax)},
                       {"support_clipped", raster.support_clipped}});
}

TrialResult sdr_local_trial(const Context& ctx, std::size_t trial) {
    auto rng = ctx.rng(trial);
    nlohmann::json members;
    const auto d = profile_difference(ctx, trial, members);
    const std::size_t n = ctx.cfg.dim;
    const RadialFunction rf{d, n};
    const double radius = 1.0;
    const std::size_t k = sample_side(n);
    TrialResult worst;
    worst.ratio = -1.0;
    std::normal_distribution<double> gauss;
    for (int c = 0; c < 10; ++c) {
        const double diam = uniform(rng, 0.01, 1.0);
        std::vector<double> dir(n);
        double norm2 = 0.0;
        for (auto& v : dir) {
            v = gauss(rng);
            norm2 += v * v;
        }
        const double reach = (c % 5 == 0 ? diam / 2 : radius - diam / 2) * (1.0 - 1e-9);
        const double dist = reach * std::pow(uniform(rng, 0.0, 1.0), 1.0 / static_cast<double>(n));
        const double side = diam / std::sqrt(static_cast<double>(n));
        std::vector<double> lo(n);
        for (std::size_t a = 0; a < n; ++a) lo[a] = dir[a] / std::sqrt(norm2) * dist - side / 2;
        const Box cube = make_cube(lo, side);
        const Interval i = local_interval_for_cube(cube, radius);
        const double bound = static_cast<double>(n) * ctx.c.omega * std::pow(radius, static_cast<double>(n) - 1) * diam;
        const bool length_ok = i.length() <= bound * (1.0 + 1e-12) && i.lo >= 0.0 &&
                               i.hi <= ctx.c.omega * std::pow(radius, static_cast<double>(n)) * (1.0 + 1e-12);
        const double lhs = sampled_oscillation(rf, cube, k);
        const double rhs = ctx.c.sdr_upper * mean_oscillation(d, i);
        auto r = inequality(lhs, rhs, 1.0, ctx.slack, nlohmann::json::object());
        r.ok = r.ok && length_ok;
        // Keep the first failure, otherwise the largest ratio.
        const bool take = worst.ratio < 0.0 || (worst.ok && (!r.ok || r.ratio > worst.ratio));
        if (take) {
            worst = r;
            worst.witness = {{"members", members},
                             {"cube", shape_to_json(cube)},
                             {"interval", interval_json(i)},
                             {"interval_bound", bound},
                             {"length_ok", length_ok}};
        }
    }
    return worst;
}

TrialResult shape_equivalence_trial(const Context& ctx, std::size_t trial) {
    auto rng = ctx.rng(trial);
    const std::size_t n = ctx.cfg.dim;
    std::normal_distribution<double> gauss;
    auto point = [&](double scale) {
        std::vector<double> x(n);
        for (auto& v : x) v = scale * gauss(rng);
        return x;
    };
    std::vector<std::pair<std::string, EquivalenceWitness>> witnesses;
    {
        const auto lo = point(1.0);
        witnesses.emplace_back("cube-ball", circumscribe_cube_ball(make_cube(lo, uniform(rng, 0.01, 2.0))));
    }
    witnesses.emplace_back("ball-cube", circumscribe_cube_ball(make_ball(point(1.0), uniform(rng, 0.01, 2.0))));
    {
        const auto x = point(1.0);
        const double r = norm(x) * (trial % 2 ? uniform(rng, 0.05, 1.0) : uniform(rng, 1.0, 2.0));
        witnesses.emplace_back("ball-sector", sector_for_ball(make_ball(x, r)));
    }
    {
        const auto x = point(1.0);
        const double alpha = uniform(rng, 0.01, std::acos(-1.0) / 2 - 0.01);
        const Shape a = trial % 3 == 0 ? make_ball(std::vector<double>(n, 0.0), uniform(rng, 0.1, 2.0))
                                       : Shape(make_sector(x, norm(x) * std::sin(alpha), alpha));
        witnesses.emplace_back("sector-ball", ball_for_sector(a));
    }
    TrialResult r;
    r.witness = {{"witnesses", nlohmann::json::array()}};
    std::size_t violations = 0;
    std::size_t samples = 0;
    for (std::size_t w = 0; w < witnesses.size(); ++w) {
        const auto& [name, wit] = witnesses[w];
        const auto report = check_containment(wit, ctx.cfg.samples, splitmix64(ctx.cfg.seed + trial) + w);
        const double inner = measure(wit.inner);
        const double middle = measure(wit.middle);
        const double outer = measure(wit.outer);
        const double measured = outer / inner;
        const bool ratio_ok = std::fabs(measured - wit.outer_ratio) <= 1e-12 * wit.outer_ratio;
        const bool ab = name == "ball-sector" || name == "sector-ball";
        const bool power_ok = !ab || std::fabs(measured - std::ldexp(1.0, static_cast<int>(n))) <= 1e-12 * measured;
        // In one dimension the circumscribed ball of a cube is the cube.
        const bool strict = ab ? middle < outer : middle <= outer * (1.0 + 1e-12);
        violations += report.violations;
        samples += report.samples;
        r.ok = r.ok && report.violations == 0 && ratio_ok && power_ok && strict;
        r.ratio = std::max(r.ratio, middle / outer);
        r.witness["witnesses"].push_back({{"kind", name},
                                          {"inner", shape_to_json(wit.inner)},
                                          {"middle", shape_to_json(wit.middle)},
                                          {"outer", shape_to_json(wit.outer)},
                                          {"outer_ratio", measured},
                                          {"declared_ratio", wit.outer_ratio},
                                          {"violations", report.violations}});
    }
    r.lhs = static_cast<double>(violations);
    r.rhs = static_cast<double>(samples);
    return r;
}

const std::map<std::string, Suite>& catalog() {
    static const std::map<std::string, Suite> suites = [] {
        std::map<std::string, Suite> s;
        auto one = [](const ConstantsRow&) { return 1.0; };
        auto none = [](const ConstantsRow&) { return std::optional<double>(); };
        auto desk = [](std::size_t n) { return desk_extent(n); };
        auto sdr = [](std::size_t n) { return sdr_extent(n); };
        s["klemes1d"] = {one, none, 1e-3, desk, 1, 1,
                         [](const Context& c, std::size_t t) { return rearrangement_vs(c, t, BasisFamily::Cubes, 1.0); }};
        s["korenovskii"] = {one, none, 1e-3, desk, 1, 3, [](const Context& c, std::size_t t) {
                                return rearrangement_vs(c, t, BasisFamily::Rectangles, 1.0);
                            }};
        s["bisection"] = {[](const ConstantsRow& c) { return c.bisection; }, none, 1e-3, desk, 1, 3,
                          [](const Context& c, std::size_t t) {
                              return rearrangement_vs(c, t, BasisFamily::FalseCubes, c.c.bisection);
                          }};
        s["wik"] = {[](const ConstantsRow& c) { return c.wik; }, none, 1e-3, desk, 1, 3, wik_trial};
        s["falsecompare"] = {one, none, 0.0, desk, 1, 3, falsecompare_trial};
        s["bds"] = {[](const ConstantsRow& c) { return c.composite; }, none, 1e-3, desk, 1, 3, bds_trial};
        s["neighbors"] = {[](const ConstantsRow&) { return 4.0; }, none, 1e-3, desk, 1, 3, neighbors_trial};
        s["partition"] = {one, none, 1e-12, desk, 1, 3, partition_trial};
        s["concentration"] = {one, none, 1e-12, desk, 1, 3, concentration_trial};
        s["czd-validity"] = {one, none, 1e-12, desk, 1, 3, czd_trial};
        s["hardy-littlewood"] = {one, none, 1e-12, desk, 1, kMaxDim, hardy_littlewood_trial};
        s["equimeasurable"] = {[](const ConstantsRow&) { return 0.0; }, none, 0.0, desk, 1, kMaxDim,
                               equimeasurable_trial};
        s["radial-isometry"] = {one, [](const ConstantsRow&) { return std::optional<double>(1.0); }, 1e-12, desk,
                                1, kMaxDim, radial_isometry_trial};
        s["sdr-ai"] = {one, [](const ConstantsRow&) { return std::optional<double>(1.0); }, 1e-12, desk, 1,
                       kMaxDim, sdr_ai_trial};
        s["sdr-bilipschitz"] = {[](const ConstantsRow& c) { return c.sdr_upper; },
                                [](const ConstantsRow& c) { return std::optional<double>(c.sdr_lower); }, 5e-2, sdr,
                                1, 3, sdr_bilipschitz_trial};
        s["sdr-corollary"] = {[](const ConstantsRow& c) { return c.d_n; }, none, 5e-2, sdr, 1, 3,
                              sdr_corollary_trial};
        s["sdr-local"] = {one, none, 5e-2, desk, 1, 4, sdr_local_trial};
        s["shape-equivalence"] = {one, none, 0.0, desk, 1, kMaxDim, shape_equivalence_trial};
        return s;
    }();
    return suites;
}

void write_reproducer(const Context& ctx, SuiteReport& report, std::size_t trial) {
    namespace fs = std::filesystem;
    const auto& dir = ctx.cfg.reproducer_dir;
    fs::create_directories(dir);
    const std::string stem = ctx.cfg.suite + "_trial" + std::to_string(trial);
    nlohmann::json j = {{"suite", ctx.cfg.suite},
                        {"config", ctx.cfg.to_json()},
                        {"trial", trial},
                        {"lhs", report.trials[trial].lhs},
                        {"rhs", report.trials[trial].rhs},
                        {"ratio", report.trials[trial].ratio},
                        {"witness", report.trials[trial].witness},
                        {"grids", nlohmann::json::array()}};
    if (report.trials[trial].witness.contains("members")) {
        for (const auto& m : report.trials[trial].witness["members"]) {
            const std::size_t index = m.get<std::size_t>();
            const auto path = dir / (stem + "_member" + std::to_string(index) + ".oscg");
            save_grid(ctx.member(index), path);
            j["grids"].push_back(path.filename().string());
        }
    }
    const auto path = dir / (stem + ".json");
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write reproducer " + path.string());
    out << j.dump(2) << '\n';
    report.reproducers.push_back(path.string());
}

}  // namespace

const std::vector<std::string>& suite_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> out;
        for (const auto& [id, s] : catalog()) out.push_back(id);
        return out;
    }();
    return ids;
}

SuiteReport run_suite(const SuiteConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const auto it = catalog().find(config.suite);
    if (it == catalog().end()) throw Error(ErrorCode::UnknownSuite, "unknown suite: " + config.suite);
    const Suite& suite = it->second;
    if (config.dim < suite.min_dim || config.dim > suite.max_dim) {
        throw Error(ErrorCode::InvalidArgument, "suite " + config.suite + " runs in dimensions " +
                                                    std::to_string(suite.min_dim) + " to " +
                                                    std::to_string(suite.max_dim));
    }

    Context ctx;
    ctx.cfg = config;
    if (ctx.cfg.extents.empty()) ctx.cfg.extents.assign(config.dim, suite.default_extent(config.dim));
    if (ctx.cfg.extents.size() != config.dim) {
        throw Error(ErrorCode::DimensionMismatch, "extents do not match the dimension");
    }
    ctx.corpus.extents = ctx.cfg.extents;
    ctx.corpus.weights = config.weights;
    ctx.corpus.density = config.density;
    ctx.c = constants(config.dim);
    ctx.slack = config.slack ? *config.slack : suite.slack;

    SuiteReport report;
    report.suite = config.suite;
    report.config = ctx.cfg.to_json();
    report.constant = suite.constant(ctx.c);
    report.lower_constant = suite.lower(ctx.c);
    report.slack = ctx.slack;
    report.trials.resize(config.trials);

    // Workers pull trial indices; results land in trial order.
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t t = next.fetch_add(1);
            if (t >= config.trials) return;
            try {
                report.trials[t] = suite.run(ctx, t);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = config.trials;
                return;
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(config.threads, config.trials));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::optional<double> lowest;
    for (std::size_t t = 0; t < report.trials.size(); ++t) {
        const auto& r = report.trials[t];
        report.pass = report.pass && r.ok;
        report.max_ratio = t == 0 ? r.ratio : std::max(report.max_ratio, r.ratio);
        // Trials where both sides are numerically zero say nothing about the lower bound.
        if (std::fabs(r.lhs) > kZeroFloor || std::fabs(r.rhs) > kZeroFloor) lowest = lowest ? std::min(*lowest, r.ratio) : r.ratio;
    }
    report.min_ratio = lowest.value_or(0.0);
    if (!ctx.cfg.reproducer_dir.empty()) {
        std::size_t written = 0;
        for (std::size_t t = 0; t < report.trials.size() && written < 10; ++t) {
            if (!report.trials[t].ok) {
                write_reproducer(ctx, report, t);
                ++written;
            }
        }
    }
    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace oscbound
