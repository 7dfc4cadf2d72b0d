#include "oscbound/equivalence.hpp"

#include "oscbound/error.hpp"
#include "oscbound/sphere.hpp"

#include <cmath>
#include <random>

namespace oscbound {

EquivalenceWitness circumscribe_cube_ball(const Shape& shape) {
    if (const auto* box = std::get_if<Box>(&shape)) {
        if (!is_cube(*box)) throw Error(ErrorCode::NotACube, "not a cube");
        const std::size_t n = box->dim;
        const double side = box->side(0);
        std::vector<double> centre(n);
        for (std::size_t a = 0; a < n; ++a) centre[a] = 0.5 * (box->lo[a] + box->hi[a]);
        const double dn = static_cast<double>(n);
        const double radius = std::sqrt(dn) * side / 2.0;
        const double ratio = std::pow(2.0, -dn) * std::pow(dn, dn / 2.0) * unit_ball_volume(n);
        return {*box, *box, make_ball(std::move(centre), radius), 1.0, ratio};
    }
    if (const auto* ball = std::get_if<Ball>(&shape)) {
        const std::size_t n = ball->center.size();
        std::vector<double> lo(n);
        for (std::size_t a = 0; a < n; ++a) lo[a] = ball->center[a] - ball->radius;
        const double ratio = std::pow(2.0, static_cast<double>(n)) / unit_ball_volume(n);
        return {*ball, *ball, make_cube(lo, 2.0 * ball->radius), 1.0, ratio};
    }
    throw Error(ErrorCode::NotACube, "not a cube");
}

namespace {

std::vector<double> scaled(const std::vector<double>& v, double s) {
    std::vector<double> out(v);
    for (auto& c : out) c *= s;
    return out;
}

EquivalenceWitness with_ratios(Shape inner, Shape middle, Shape outer) {
    const double base = measure(inner);
    const double mid = measure(middle) / base;
    const double out = measure(outer) / base;
    return {std::move(inner), std::move(middle), std::move(outer), mid, out};
}

}  // namespace

EquivalenceWitness sector_for_ball(const Ball& ball) {
    const Ball b = make_ball(ball.center, ball.radius);
    const std::size_t n = b.center.size();
    const double r = b.radius;
    const double dist = norm(b.center);
    if (dist < r) {
        Ball middle = make_ball(std::vector<double>(n, 0.0), dist + r);
        Ball outer = make_ball(std::vector<double>(n, 0.0), 2.0 * r);
        return with_ratios(b, middle, outer);
    }
    const double alpha = std::asin(r / dist);
    Sector middle = make_sector(b.center, r, alpha);
    Ball outer = make_ball(scaled(b.center, std::cos(alpha)), 2.0 * r);
    return with_ratios(b, middle, outer);
}

EquivalenceWitness ball_for_sector(const Shape& a) {
    if (!in_basis_a(a)) throw Error(ErrorCode::NotInBasisA, "not in basis A");
    if (const auto* ball = std::get_if<Ball>(&a)) {
        Ball outer = make_ball(ball->center, 2.0 * ball->radius);
        return with_ratios(*ball, *ball, outer);
    }
    const auto& s = std::get<Sector>(a);
    Ball inner = make_ball(s.x, s.rho);
    Ball outer = make_ball(scaled(s.x, std::cos(s.alpha)), 2.0 * s.rho);
    // inner ⊂ sector ⊂ outer; ratios are taken against the inscribed ball.
    return with_ratios(inner, s, outer);
}

namespace {

std::vector<double> sample_in(const Shape& s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (const auto* box = std::get_if<Box>(&s)) {
        std::vector<double> p(box->dim);
        for (std::size_t a = 0; a < box->dim; ++a) {
            p[a] = box->lo[a] + unit(rng) * box->side(a);
        }
        return p;
    }
    if (const auto* ball = std::get_if<Ball>(&s)) {
        const std::size_t n = ball->center.size();
        std::normal_distribution<double> gauss;
        std::vector<double> dir(n);
        double len = 0.0;
        do {
            for (auto& d : dir) d = gauss(rng);
            len = norm(dir);
        } while (!(len > 0.0));
        const double radius = ball->radius * std::pow(unit(rng), 1.0 / static_cast<double>(n));
        std::vector<double> p(n);
        for (std::size_t a = 0; a < n; ++a) p[a] = ball->center[a] + radius * dir[a] / len;
        return p;
    }
    throw Error(ErrorCode::InvalidShape, "outer shape must be a box or a ball");
}

}  // namespace

ContainmentReport check_containment(const EquivalenceWitness& w, std::size_t samples,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ContainmentReport report;
    report.samples = samples;
    for (std::size_t i = 0; i < samples; ++i) {
        const auto p = sample_in(w.outer, rng);
        const bool in_inner = contains(w.inner, p);
        const bool in_middle = contains(w.middle, p);
        const bool in_outer = contains(w.outer, p);
        report.in_inner += in_inner;
        report.in_middle += in_middle;
        if ((in_inner && !in_middle) || (in_middle && !in_outer)) ++report.violations;
    }
    return report;
}

}  // namespace oscbound
