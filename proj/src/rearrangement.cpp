#include "oscbound/rearrangement.hpp"

#include "oscbound/equivalence.hpp"
#include "oscbound/error.hpp"
#include "oscbound/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace oscbound {

StepFunction1D::StepFunction1D(std::vector<double> b, std::vector<double> v)
    : breaks(std::move(b)), values(std::move(v)) {
    if (breaks.empty() || breaks.front() != 0.0) {
        throw Error(ErrorCode::InvalidArgument, "step function must start at 0");
    }
    if (breaks.size() != values.size() + 1) {
        throw Error(ErrorCode::InvalidArgument, "step function needs one value per piece");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i]) || !std::isfinite(breaks[i + 1])) {
            throw Error(ErrorCode::InvalidArgument, "breakpoints must increase strictly");
        }
        if (!std::isfinite(values[i])) {
            throw Error(ErrorCode::InvalidArgument, "step values must be finite");
        }
    }
}

double StepFunction1D::operator()(double t) const {
    if (t < 0.0 || t >= length()) return 0.0;
    const auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
    return values[static_cast<std::size_t>(it - breaks.begin()) - 1];
}

double StepFunction1D::integral(double a, double b) const {
    a = std::max(a, 0.0);
    b = std::min(b, length());
    if (!(b > a)) return 0.0;
    auto i = static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), a) -
                                      breaks.begin()) - 1;
    long double sum = 0.0L;
    for (; i < values.size() && breaks[i] < b; ++i) {
        const double lo = std::max(a, breaks[i]);
        const double hi = std::min(b, breaks[i + 1]);
        sum += static_cast<long double>(values[i]) * (hi - lo);
    }
    return static_cast<double>(sum);
}

double StepFunction1D::mean(double a, double b) const {
    if (!(b > a)) throw Error(ErrorCode::EmptyShape, "empty shape");
    return integral(a, b) / (b - a);
}

bool StepFunction1D::non_increasing() const {
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[i - 1]) return false;
    }
    return true;
}

StepFunction1D StepFunction1D::padded(double new_length) const {
    if (new_length < length()) {
        throw Error(ErrorCode::InvalidArgument, "padding cannot shorten a step function");
    }
    StepFunction1D out = *this;
    if (new_length > length()) {
        out.breaks.push_back(new_length);
        out.values.push_back(0.0);
    }
    return out;
}

StepFunction1D StepFunction1D::merged() const {
    StepFunction1D out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!out.values.empty() && out.values.back() == values[i]) {
            out.breaks.back() = breaks[i + 1];
        } else {
            out.values.push_back(values[i]);
            out.breaks.push_back(breaks[i + 1]);
        }
    }
    return out;
}

std::string StepFunction1D::to_csv() const {
    std::string out = "breakpoint,value\n";
    char line[64];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", breaks[i], values[i]);
        out += line;
    }
    std::snprintf(line, sizeof line, "%.17g,0\n", length());
    out += line;
    return out;
}

nlohmann::json StepFunction1D::to_json() const {
    return {{"breaks", breaks}, {"values", values}};
}

StepFunction1D StepFunction1D::from_json(const nlohmann::json& j) {
    return StepFunction1D(j.at("breaks").get<std::vector<double>>(),
                          j.at("values").get<std::vector<double>>());
}

StepFunction1D operator-(const StepFunction1D& a, const StepFunction1D& b) {
    std::vector<double> cuts;
    cuts.reserve(a.breaks.size() + b.breaks.size());
    std::merge(a.breaks.begin(), a.breaks.end(), b.breaks.begin(), b.breaks.end(),
               std::back_inserter(cuts));
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<double> values;
    values.reserve(cuts.size());
    std::size_t ia = 0;
    std::size_t ib = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        while (ia < a.pieces() && a.breaks[ia + 1] <= cuts[i]) ++ia;
        while (ib < b.pieces() && b.breaks[ib + 1] <= cuts[i]) ++ib;
        const double va = ia < a.pieces() ? a.values[ia] : 0.0;
        const double vb = ib < b.pieces() ? b.values[ib] : 0.0;
        values.push_back(va - vb);
    }
    return StepFunction1D(std::move(cuts), std::move(values));
}

namespace {

std::vector<double> sorted_abs_descending(std::span<const double> v) {
    std::vector<double> a(v.size());
    std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::abs(x); });
    std::sort(a.begin(), a.end(), std::greater<>());
    return a;
}

}  // namespace

StepFunction1D distribution(const GridFunction& f) {
    const auto a = sorted_abs_descending(f.values());
    const double cell = f.cell_measure();
    // mu(alpha) = cell * #{|f| > alpha}; walk distinct values upwards.
    StepFunction1D mu;
    std::size_t greater = a.size();
    double left = 0.0;
    std::size_t i = a.size();
    while (i > 0) {
        const double v = a[i - 1];
        if (v > left) {
            mu.breaks.push_back(v);
            mu.values.push_back(static_cast<double>(greater) * cell);
            left = v;
        }
        while (i > 0 && a[i - 1] == v) {
            --i;
            --greater;
        }
    }
    return mu;
}

StepFunction1D distribution(const StepFunction1D& f) {
    if (f.non_increasing() && (f.values.empty() || f.values.back() >= 0.0)) {
        // mu(alpha) is the right end of the last piece above alpha.
        StepFunction1D mu;
        double left = 0.0;
        for (std::size_t j = f.pieces(); j-- > 0;) {
            const double v = f.values[j];
            if (v > left) {
                mu.breaks.push_back(v);
                mu.values.push_back(f.breaks[j + 1]);
                left = v;
            }
        }
        return mu;
    }
    std::vector<std::size_t> order(f.pieces());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return std::abs(f.values[x]) < std::abs(f.values[y]);
    });
    long double total = 0.0L;
    for (std::size_t i = 0; i < f.pieces(); ++i) total += f.width(i);
    StepFunction1D mu;
    double left = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double v = std::abs(f.values[order[i]]);
        if (v > left) {
            mu.breaks.push_back(v);
            mu.values.push_back(static_cast<double>(total));
            left = v;
        }
        while (i < order.size() && std::abs(f.values[order[i]]) == v) {
            total -= f.width(order[i]);
            ++i;
        }
    }
    return mu;
}

StepFunction1D decreasing_rearrangement(const GridFunction& f) {
    const auto a = sorted_abs_descending(f.values());
    const double cell = f.cell_measure();
    StepFunction1D out;
    std::size_t i = 0;
    while (i < a.size()) {
        const double v = a[i];
        while (i < a.size() && a[i] == v) ++i;
        out.values.push_back(v);
        out.breaks.push_back(static_cast<double>(i) * cell);
    }
    return out;
}

StepFunction1D decreasing_rearrangement(const StepFunction1D& f) {
    if (f.non_increasing() && (f.values.empty() || f.values.back() >= 0.0)) return f.merged();
    std::vector<std::size_t> order(f.pieces());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return std::abs(f.values[x]) > std::abs(f.values[y]);
    });
    StepFunction1D out;
    long double end = 0.0L;
    std::size_t i = 0;
    while (i < order.size()) {
        const double v = std::abs(f.values[order[i]]);
        while (i < order.size() && std::abs(f.values[order[i]]) == v) {
            end += f.width(order[i]);
            ++i;
        }
        out.values.push_back(v);
        out.breaks.push_back(static_cast<double>(end));
    }
    return out;
}

HardyLittlewood hardy_littlewood_check(const GridFunction& f,
                                       const std::vector<std::size_t>& cells) {
    std::vector<std::size_t> set(cells);
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    if (set.empty()) throw Error(ErrorCode::EmptyShape, "empty shape: Hardy-Littlewood set");
    long double lhs = 0.0L;
    for (std::size_t c : set) {
        if (c >= f.size()) throw Error(ErrorCode::OutOfRange, "cell index outside the grid");
        lhs += std::abs(f[c]);
    }
    const auto star = decreasing_rearrangement(f);
    const double measure = static_cast<double>(set.size()) * f.cell_measure();
    return {static_cast<double>(lhs * f.cell_measure()), star.integral(0.0, measure)};
}

double RadialFunction::operator()(std::span<const double> x) const {
    const double r = norm(x);
    return profile(unit_ball_volume(dim) * std::pow(r, static_cast<double>(dim)));
}

double RadialFunction::support_radius() const {
    std::size_t j = profile.pieces();
    while (j > 0 && profile.values[j - 1] == 0.0) --j;
    if (j == 0) return 0.0;
    return std::pow(profile.breaks[j] / unit_ball_volume(dim), 1.0 / static_cast<double>(dim));
}

RadialFunction symmetrize(const GridFunction& f) {
    return RadialFunction{decreasing_rearrangement(f), f.dim()};
}

Rasterized rasterize_radial(const RadialFunction& rf, std::vector<std::size_t> extents,
                            double h, std::vector<double> origin, std::size_t k) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "supersample factor must be positive");
    const std::size_t n = extents.size();
    if (n != rf.dim || origin.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "radial function and grid differ in dimension");
    }
    std::size_t cells = 1;
    for (auto d : extents) cells *= d;
    std::size_t sub = 1;
    for (std::size_t a = 0; a < n; ++a) sub *= k;

    const double omega = unit_ball_volume(n);
    std::vector<double> values(cells);
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> p(n);
    for (std::size_t c = 0; c < cells; ++c) {
        long double acc = 0.0L;
        for (std::size_t s = 0; s < sub; ++s) {
            std::size_t rest = s;
            long double r2 = 0.0L;
            for (std::size_t a = n; a-- > 0;) {
                const std::size_t j = rest % k;
                rest /= k;
                p[a] = origin[a] + h * (static_cast<double>(idx[a]) +
                                        (static_cast<double>(j) + 0.5) / static_cast<double>(k));
                r2 += static_cast<long double>(p[a]) * p[a];
            }
            const double r = static_cast<double>(std::sqrt(r2));
            acc += rf.profile(omega * std::pow(r, static_cast<double>(n)));
        }
        values[c] = static_cast<double>(acc / static_cast<long double>(sub));
        for (std::size_t a = n; a-- > 0;) {
            if (++idx[a] < extents[a]) break;
            idx[a] = 0;
        }
    }

    const double rs = rf.support_radius();
    bool clipped = false;
    for (std::size_t a = 0; a < n; ++a) {
        const double lo = origin[a];
        const double hi = origin[a] + h * static_cast<double>(extents[a]);
        const double tol = 1e-12 * std::max(1.0, rs);
        if (lo > -rs + tol || hi < rs - tol) clipped = true;
    }
    return {GridFunction(std::move(extents), h, std::move(origin), std::move(values)), clipped};
}

Interval radial_reduction(const Shape& a) {
    if (const auto* b = std::get_if<Ball>(&a)) {
        if (norm(b->center) != 0.0) {
            throw Error(ErrorCode::NotInBasisA, "not in basis A: ball is not centred");
        }
        return {0.0, measure(a)};
    }
    if (const auto* s = std::get_if<Sector>(&a)) {
        const std::size_t n = s->x.size();
        const double omega = unit_ball_volume(n);
        const double r = norm(s->x);
        const double dn = static_cast<double>(n);
        return {omega * std::pow(std::max(0.0, r - s->rho), dn), omega * std::pow(r + s->rho, dn)};
    }
    throw Error(ErrorCode::NotInBasisA, "not in basis A: boxes have no radial reduction");
}

Shape shape_for_interval(const Interval& i, std::size_t n) {
    if (!(i.lo >= 0.0) || !(i.hi > i.lo)) {
        throw Error(ErrorCode::InvalidArgument, "interval must satisfy 0 <= lo < hi");
    }
    const double omega = unit_ball_volume(n);
    const double inv = 1.0 / static_cast<double>(n);
    const double b = std::pow(i.hi / omega, inv);
    if (i.lo == 0.0) return make_ball(std::vector<double>(n, 0.0), b);
    const double a = std::pow(i.lo / omega, inv);
    const double centre = 0.5 * (a + b);
    const double rho = 0.5 * (b - a);
    if (!(rho < centre)) throw Error(ErrorCode::NoAdmissibleSector, "no admissible sector");
    std::vector<double> x(n, 0.0);
    x[0] = centre;
    return make_sector(std::move(x), rho, std::asin(rho / centre));
}

Interval local_interval_for_cube(const Box& cube, double radius) {
    if (!is_cube(cube)) throw Error(ErrorCode::NotACube, "not a cube");
    const std::size_t n = cube.dim;
    const double d = std::sqrt(static_cast<double>(n)) * cube.side(0);
    std::vector<double> x(n);
    for (std::size_t a = 0; a < n; ++a) x[a] = 0.5 * (cube.lo[a] + cube.hi[a]);
    if (norm(x) > (radius - d / 2) * (1.0 + 1e-12) + 1e-15) {
        throw Error(ErrorCode::OutOfRange, "cube not inside B(0, R)");
    }
    const auto witness = sector_for_ball(make_ball(std::move(x), d / 2));
    const Interval i = radial_reduction(witness.middle);
    const double omega = unit_ball_volume(n);
    const double bound = static_cast<double>(n) * omega *
                         std::pow(radius, static_cast<double>(n) - 1.0) * d;
    if (i.length() > bound * (1.0 + 1e-12)) {
        throw Error(ErrorCode::OutOfRange, "interval longer than n omega_n R^(n-1) d");
    }
    return i;
}

}  // namespace oscbound
