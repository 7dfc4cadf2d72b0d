#include "oscbound/sphere.hpp"

#include "oscbound/error.hpp"

#include <cmath>
#include <numbers>

namespace oscbound {
namespace {

double adaptive_simpson(auto&& fn, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = fn(lm);
    const double frm = fn(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(fn, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Integral of sin^k over [0, pi] by the Wallis recurrence.
double wallis(std::size_t k) {
    double w = (k % 2 == 0) ? std::numbers::pi : 2.0;
    for (std::size_t j = (k % 2 == 0) ? 2 : 3; j <= k; j += 2) {
        w *= static_cast<double>(j - 1) / static_cast<double>(j);
    }
    return w;
}

}  // namespace

double unit_ball_volume(std::size_t n) {
    if (n == 0) return 1.0;
    const double pi = std::numbers::pi;
    if (n % 2 == 0) {
        const std::size_t k = n / 2;
        double v = 1.0;
        for (std::size_t j = 1; j <= k; ++j) v *= pi / static_cast<double>(j);
        return v;
    }
    // n = 2k+1: 2^{2k+1} k! pi^k / (2k+1)!
    const std::size_t k = (n - 1) / 2;
    double v = 2.0;
    for (std::size_t j = 1; j <= k; ++j) {
        v *= 4.0 * static_cast<double>(j) * pi /
             (static_cast<double>(2 * j) * static_cast<double>(2 * j + 1));
    }
    return v;
}

double cap_fraction(std::size_t n, double alpha) {
    const double pi = std::numbers::pi;
    if (!(alpha > 0.0) || alpha > pi / 2 + 1e-15) {
        throw Error(ErrorCode::InvalidShape, "aperture must lie in (0, pi/2]");
    }
    switch (n) {
    case 0: throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
    case 1: return 0.5;
    case 2: return alpha / pi;
    case 3: return 0.5 * (1.0 - std::cos(alpha));
    default: break;
    }
    const double k = static_cast<double>(n - 2);
    auto integrand = [k](double t) { return std::pow(std::sin(t), k); };
    const double fa = integrand(0.0);
    const double fb = integrand(alpha);
    const double fm = integrand(0.5 * alpha);
    const double whole = alpha / 6.0 * (fa + 4.0 * fm + fb);
    const double total = wallis(n - 2);
    // sin^{k+1}(alpha)/(k+1) bounds the partial integral from below.
    const double tol =
        1e-3 * kCapFractionTolerance * std::pow(std::sin(alpha), k + 1) / (k + 1);
    const double part =
        adaptive_simpson(integrand, 0.0, alpha, fa, fm, fb, whole, std::max(tol, 1e-300), 50);
    return part / total;
}

}  // namespace oscbound
