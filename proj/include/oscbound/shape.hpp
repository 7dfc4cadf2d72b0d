#pragma once

#include "oscbound/grid.hpp"

#include "json.hpp"

#include <span>
#include <variant>
#include <vector>

namespace oscbound {

/// Open Euclidean ball B(center, radius).
struct Ball {
    std::vector<double> center;
    double radius = 0.0;
};

/// Annular sector A(x, rho, alpha):
/// { y : |x|-rho < |y| < |x|+rho, y.x > |x||y| cos(alpha) }.
struct Sector {
    std::vector<double> x;
    double rho = 0.0;
    double alpha = 0.0;
};

/// A `Box` is read in whatever coordinates its consumer uses: cell units on
/// grids, physical units in the equivalence constructions.
using Shape = std::variant<Box, Ball, Sector>;

Ball make_ball(std::vector<double> center, double radius);
Sector make_sector(std::vector<double> x, double rho, double alpha);
Box make_box(std::span<const double> lo, std::span<const double> hi);
/// Cube with the given lower corner and side.
Box make_cube(std::span<const double> lo, double side);

std::size_t shape_dim(const Shape& s);
double norm(std::span<const double> v);

/// Lebesgue measure. Sectors use the cap-fraction formula.
double measure(const Shape& s);
/// Measure of a sector or ball; boxes are rejected.
double sector_measure(const Shape& s);

bool contains(const Shape& s, std::span<const double> point);

/// True for centred balls and for sectors with rho = |x| sin(alpha)
/// (relative tolerance `tol`).
bool in_basis_a(const Shape& s, double tol = 1e-12);

bool is_cube(const Box& b, double rel_tol = 1e-12);

nlohmann::json shape_to_json(const Shape& s);
Shape shape_from_json(const nlohmann::json& j);

}  // namespace oscbound
