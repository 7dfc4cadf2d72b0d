#include "oscbound/shape.hpp"

#include "oscbound/error.hpp"
#include "oscbound/sphere.hpp"

#include <cmath>
#include <numbers>

namespace oscbound {

double norm(std::span<const double> v) {
    long double s = 0.0L;
    for (double c : v) s += static_cast<long double>(c) * c;
    return static_cast<double>(std::sqrt(s));
}

Ball make_ball(std::vector<double> center, double radius) {
    if (center.empty()) throw Error(ErrorCode::InvalidShape, "ball needs a centre");
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw Error(ErrorCode::InvalidShape, "invalid shape: ball radius must be positive");
    }
    for (double c : center) {
        if (!std::isfinite(c)) throw Error(ErrorCode::InvalidShape, "ball centre must be finite");
    }
    return Ball{std::move(center), radius};
}

Sector make_sector(std::vector<double> x, double rho, double alpha) {
    const double r = norm(x);
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw Error(ErrorCode::InvalidShape, "invalid shape: sector centre must be non-zero");
    }
    if (!(rho > 0.0) || rho > r * (1.0 + 1e-12)) {
        throw Error(ErrorCode::InvalidShape, "invalid shape: sector half-width must lie in (0, |x|]");
    }
    if (!(alpha > 0.0) || alpha > std::numbers::pi / 2 * (1.0 + 1e-15)) {
        throw Error(ErrorCode::InvalidShape, "invalid shape: sector aperture must lie in (0, pi/2]");
    }
    return Sector{std::move(x), rho, alpha};
}

Box make_box(std::span<const double> lo, std::span<const double> hi) {
    if (lo.size() != hi.size() || lo.empty() || lo.size() > kMaxDim) {
        throw Error(ErrorCode::InvalidShape, "box corners have mismatched dimensions");
    }
    Box b;
    b.dim = lo.size();
    for (std::size_t a = 0; a < b.dim; ++a) {
        if (!(hi[a] > lo[a])) throw Error(ErrorCode::EmptyShape, "empty shape");
        b.lo[a] = lo[a];
        b.hi[a] = hi[a];
    }
    return b;
}

Box make_cube(std::span<const double> lo, double side) {
    std::vector<double> hi(lo.begin(), lo.end());
    for (auto& h : hi) h += side;
    return make_box(lo, hi);
}

std::size_t shape_dim(const Shape& s) {
    return std::visit(
        [](const auto& v) -> std::size_t {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Box>) {
                return v.dim;
            } else if constexpr (std::is_same_v<T, Ball>) {
                return v.center.size();
            } else {
                return v.x.size();
            }
        },
        s);
}

double sector_measure(const Shape& s) {
    if (const auto* b = std::get_if<Ball>(&s)) {
        return unit_ball_volume(b->center.size()) * std::pow(b->radius, b->center.size());
    }
    if (const auto* a = std::get_if<Sector>(&s)) {
        const std::size_t n = a->x.size();
        const double r = norm(a->x);
        const double outer = std::pow(r + a->rho, static_cast<double>(n));
        const double inner = std::pow(std::max(0.0, r - a->rho), static_cast<double>(n));
        return cap_fraction(n, a->alpha) * unit_ball_volume(n) * (outer - inner);
    }
    throw Error(ErrorCode::InvalidShape, "sector_measure expects a sector or a ball");
}

double measure(const Shape& s) {
    if (const auto* b = std::get_if<Box>(&s)) return b->volume();
    return sector_measure(s);
}

bool contains(const Shape& s, std::span<const double> p) {
    if (const auto* b = std::get_if<Box>(&s)) {
        for (std::size_t a = 0; a < b->dim; ++a) {
            if (!(p[a] > b->lo[a] && p[a] < b->hi[a])) return false;
        }
        return true;
    }
    if (const auto* b = std::get_if<Ball>(&s)) {
        long double d2 = 0.0L;
        for (std::size_t a = 0; a < b->center.size(); ++a) {
            const long double d = static_cast<long double>(p[a]) - b->center[a];
            d2 += d * d;
        }
        return d2 < static_cast<long double>(b->radius) * b->radius;
    }
    const auto& sec = std::get<Sector>(s);
    const double rx = norm(sec.x);
    const double ry = norm(p);
    if (!(ry > rx - sec.rho && ry < rx + sec.rho)) return false;
    long double dot = 0.0L;
    for (std::size_t a = 0; a < sec.x.size(); ++a) dot += static_cast<long double>(sec.x[a]) * p[a];
    return dot > static_cast<long double>(rx) * ry * std::cos(static_cast<long double>(sec.alpha));
}

bool in_basis_a(const Shape& s, double tol) {
    if (const auto* b = std::get_if<Ball>(&s)) return norm(b->center) == 0.0;
    if (const auto* a = std::get_if<Sector>(&s)) {
        const double expected = norm(a->x) * std::sin(a->alpha);
        return std::abs(a->rho - expected) <= tol * std::max(expected, a->rho);
    }
    return false;
}

bool is_cube(const Box& b, double rel_tol) {
    const double s0 = b.side(0);
    for (std::size_t a = 1; a < b.dim; ++a) {
        if (std::abs(b.side(a) - s0) > rel_tol * s0) return false;
    }
    return s0 > 0.0;
}

nlohmann::json shape_to_json(const Shape& s) {
    using nlohmann::json;
    if (const auto* b = std::get_if<Box>(&s)) {
        return json{{"type", "box"},
                    {"lo", std::vector<double>(b->lo.begin(), b->lo.begin() + b->dim)},
                    {"hi", std::vector<double>(b->hi.begin(), b->hi.begin() + b->dim)}};
    }
    if (const auto* b = std::get_if<Ball>(&s)) {
        return json{{"type", "ball"}, {"x", b->center}, {"r", b->radius}};
    }
    const auto& a = std::get<Sector>(s);
    return json{{"type", "sector"}, {"x", a.x}, {"rho", a.rho}, {"alpha", a.alpha}};
}

Shape shape_from_json(const nlohmann::json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "box") {
        const auto lo = j.at("lo").get<std::vector<double>>();
        const auto hi = j.at("hi").get<std::vector<double>>();
        return make_box(lo, hi);
    }
    if (type == "ball") {
        return make_ball(j.at("x").get<std::vector<double>>(), j.at("r").get<double>());
    }
    if (type == "sector") {
        return make_sector(j.at("x").get<std::vector<double>>(), j.at("rho").get<double>(),
                           j.at("alpha").get<double>());
    }
    throw Error(ErrorCode::InvalidShape, "unknown shape type '" + type + "'");
}

}  // namespace oscbound
