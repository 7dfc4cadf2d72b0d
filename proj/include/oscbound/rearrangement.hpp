#pragma once

#include "oscbound/grid.hpp"
#include "oscbound/shape.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace oscbound {

/// Right-continuous step function on (0, L): value `values[i]` on
/// `[breaks[i], breaks[i+1])`, and zero from L on.
struct StepFunction1D {
    std::vector<double> breaks{0.0};
    std::vector<double> values;

    StepFunction1D() = default;
    /// Validates: breaks start at 0 and strictly increase, one value per piece,
    /// all finite.
    StepFunction1D(std::vector<double> breaks, std::vector<double> values);

    std::size_t pieces() const { return values.size(); }
    double length() const { return breaks.back(); }
    double width(std::size_t i) const { return breaks[i + 1] - breaks[i]; }
    double operator()(double t) const;
    /// Exact integral over (a, b), with the function taken as zero past L.
    double integral(double a, double b) const;
    double mean(double a, double b) const;
    bool non_increasing() const;

    /// Same function on (0, length) with zero past its old end.
    StepFunction1D padded(double length) const;
    /// Adjacent pieces with equal values merged.
    StepFunction1D merged() const;

    std::string to_csv() const;
    nlohmann::json to_json() const;
    static StepFunction1D from_json(const nlohmann::json& j);
};

/// Pointwise difference on the union of the breakpoints.
StepFunction1D operator-(const StepFunction1D& a, const StepFunction1D& b);

/// Half-open interval (lo, hi) on the half-line.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

/// Distribution function alpha -> |{|f| > alpha}| as a step function in alpha.
///
/// Each value is (cell count) * h^n, so two functions with the same multiset
/// of |values| give bit-identical results.
StepFunction1D distribution(const GridFunction& f);
StepFunction1D distribution(const StepFunction1D& f);

/// Sorted |values|, descending, one piece per distinct value. Breakpoints are
/// cumulative counts times h^n.
StepFunction1D decreasing_rearrangement(const GridFunction& f);
StepFunction1D decreasing_rearrangement(const StepFunction1D& f);

struct HardyLittlewood {
    double lhs = 0.0;  // integral of |f| over A
    double rhs = 0.0;  // integral of f* over (0, |A|)
};

/// Both sides of the Hardy-Littlewood inequality for a set of cells.
HardyLittlewood hardy_littlewood_check(const GridFunction& f,
                                       const std::vector<std::size_t>& cells);

/// Radial function x -> profile(omega_n |x|^n).
struct RadialFunction {
    StepFunction1D profile;
    std::size_t dim = 1;

    double operator()(std::span<const double> x) const;
    /// Radius of the smallest centred ball outside which the function is zero.
    double support_radius() const;
};

RadialFunction symmetrize(const GridFunction& f);

struct Rasterized {
    GridFunction grid;
    /// True when the support ball of the radial function leaves the grid.
    bool support_clipped = false;
};

/// Cell values are averages over k^n stratified points per cell (the centres
/// of a k-fold subdivision). Physical coordinates use `origin` and `h`.
Rasterized rasterize_radial(const RadialFunction& rf, std::vector<std::size_t> extents,
                            double h, std::vector<double> origin, std::size_t k = 4);

/// Interval I with O(f, a) = O(profile, I) for every radial f.
Interval radial_reduction(const Shape& a);
/// Inverse map: a centred ball when I starts at 0, else a sector in basis A.
Shape shape_for_interval(const Interval& i, std::size_t n);

/// Interval for a cube (physical coordinates) inside B(0, R): the radial image
/// of the basis-A shape built from the cube's circumscribed ball.
Interval local_interval_for_cube(const Box& cube, double radius);

}  // namespace oscbound
