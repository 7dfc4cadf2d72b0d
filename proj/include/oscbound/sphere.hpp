#pragma once

#include <cstddef>

namespace oscbound {

/// Volume of the unit ball in R^n, pi^{n/2} / Gamma(n/2 + 1), with the Gamma
/// factor evaluated in closed form at integers and half-integers.
double unit_ball_volume(std::size_t n);

/// Fraction of the unit sphere S^{n-1} lying within angle `alpha` of a pole,
/// for alpha in (0, pi/2].
///
/// n = 1, 2, 3 use closed forms. Larger n integrate sin^{n-2} numerically
/// with relative error below kCapFractionTolerance.
double cap_fraction(std::size_t n, double alpha);

inline constexpr double kCapFractionTolerance = 1e-9;

}  // namespace oscbound
