#pragma once

#include "oscbound/basis.hpp"
#include "oscbound/grid.hpp"
#include "oscbound/rearrangement.hpp"

#include "json.hpp"

#include <functional>
#include <vector>

namespace oscbound {

/// O(f, S) over a box of whole cells. Uses the prefix table for the mean.
double mean_oscillation(const GridFunction& f, const PrefixSumTable& table, const IndexBox& box);
double mean_oscillation(const GridFunction& f, const IndexBox& box);
/// O(f, S) over a box in cell units whose corners may be fractional.
double mean_oscillation(const GridFunction& f, const Box& box);
/// 2 * mean of (f - f_S)_+, which equals O(f, S).
double oscillation_positive_part(const GridFunction& f, const Box& box);
/// Boxes only; balls and sectors need a radial function.
double mean_oscillation(const GridFunction& f, const Shape& s);

/// O(g, I) for a step function, taken as zero past its length.
double mean_oscillation(const StepFunction1D& g, const Interval& i);

/// O(f, A) for radial f and A a centred ball or a sector, through the radial
/// reduction to the profile.
double mean_oscillation(const RadialFunction& f, const Shape& a);
/// Same quantity computed in polar coordinates: the shape's radial extent is
/// cut into shells at the profile's radii and weighted by shell measure.
double radial_oscillation_geometric(const RadialFunction& f, const Shape& a);

struct ScanOptions {
    /// Locally optimise the best shapes over real-valued coordinates.
    bool refine = false;
    /// Record the maximum for every scale (shortest side in cells).
    bool per_scale = false;
    std::size_t threads = 1;
    /// Shapes with the largest upper bounds evaluated before the main pass.
    std::size_t seeds = 32;
    /// Shapes handed to the refinement.
    std::size_t refine_candidates = 4;
};

struct OscillationReport {
    double value = 0.0;
    /// Best value over cell-aligned shapes, before refinement.
    double unrefined = 0.0;
    /// Argmax in cell units; fractional after refinement.
    Box argmax;
    std::size_t scanned = 0;
    std::size_t evaluated = 0;
    /// Indexed by scale; empty unless requested.
    std::vector<double> per_scale;

    nlohmann::json to_json() const;
};

/// Supremum of O(f, S) over the cell-enumerable basis.
///
/// Exact over cell-aligned shapes: each shape's standard deviation bounds its
/// oscillation from above and is read off prefix tables of f and f^2, so only
/// shapes whose bound beats the running maximum are evaluated cell by cell.
OscillationReport bmo_seminorm(const GridFunction& f, const BasisDescriptor& basis,
                               const ScanOptions& options = {});

/// Maximum over the basis of (mean - min) on the shape.
double blo_functional(const GridFunction& f, const BasisDescriptor& basis);

struct PartitionBounds {
    double lower = 0.0;  // 2^-m sum |f_Q(nu) - f_R|
    double osc = 0.0;    // O(f, R)
    double upper = 0.0;  // bmo + lower
    std::size_t m = 0;
};

PartitionBounds partition_bounds(const GridFunction& f, const PrefixSumTable& table,
                                 const IndexBox& r, double bmo);

/// partition_bounds for every interval of a 1-D grid, in O(N^2 log N).
void for_each_interval_partition(const GridFunction& f, double bmo,
                                 const std::function<void(const IndexBox&, const PartitionBounds&)>& visit);

struct NeighborGap {
    double gap = 0.0;
    IndexBox first;
    IndexBox second;
};

/// Largest |f_Q1 - f_Q2| over equal cubes of whole cells sharing a face.
NeighborGap neighbor_mean_gap(const GridFunction& f);

struct IntervalReport {
    double value = 0.0;
    double unrefined = 0.0;
    Interval argmax;
    std::size_t scanned = 0;
    std::size_t evaluated = 0;
};

/// Supremum of O(g, I) over subintervals of (0, L), endpoints at breakpoints;
/// `refine` then moves the endpoints of the best intervals continuously.
IntervalReport step_bmo(const StepFunction1D& g, bool refine = false);

/// Supremum of O(f, A) over centred balls and basis-A sectors whose radial
/// extent runs between profile radii. Each shape is evaluated on its reduced
/// interval `radial_reduction(A)`.
IntervalReport radial_bmo_a(const RadialFunction& f);

}  // namespace oscbound
