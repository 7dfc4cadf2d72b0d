#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace oscbound {

inline constexpr std::size_t kMaxDim = 8;

/// Half-open box of whole cells, `[lo[i], hi[i])` along each axis.
struct IndexBox {
    std::size_t dim = 0;
    std::array<std::size_t, kMaxDim> lo{};
    std::array<std::size_t, kMaxDim> hi{};

    std::size_t side(std::size_t axis) const { return hi[axis] - lo[axis]; }
    std::size_t cell_count() const;
    bool empty() const;
    bool contains(const IndexBox& other) const;
    bool operator==(const IndexBox& other) const;
};

/// Axis-aligned box in cell coordinates; corners may sit inside cells.
///
/// Cell `c` along an axis occupies `[c, c+1)`. A `Box` with integral corners
/// covers exactly the cells of the corresponding `IndexBox`.
struct Box {
    std::size_t dim = 0;
    std::array<double, kMaxDim> lo{};
    std::array<double, kMaxDim> hi{};

    static Box from_cells(const IndexBox& cells);

    double side(std::size_t axis) const { return hi[axis] - lo[axis]; }
    /// Volume in cell units (multiply by h^n for physical measure).
    double volume() const;
    bool is_cell_aligned() const;
    /// Only meaningful when `is_cell_aligned()`.
    IndexBox cells() const;
    bool contains(const Box& other, double tol = 0.0) const;
    /// Volume of the intersection in cell units.
    double overlap(const Box& other) const;
};

/// Piecewise-constant function on a uniform grid of cubic cells.
///
/// Values are stored row-major (last axis fastest). The object is immutable
/// once constructed.
class GridFunction {
public:
    GridFunction(std::vector<std::size_t> extents, double cell_size,
                 std::vector<double> origin, std::vector<double> values);
    /// Grid on `[0, extents*h)` with origin at zero.
    GridFunction(std::vector<std::size_t> extents, double cell_size,
                 std::vector<double> values);

    static GridFunction constant(std::vector<std::size_t> extents, double cell_size,
                                 double value);

    std::size_t dim() const { return extents_.size(); }
    std::span<const std::size_t> extents() const { return extents_; }
    std::size_t extent(std::size_t axis) const { return extents_[axis]; }
    double cell_size() const { return cell_size_; }
    double cell_measure() const { return cell_measure_; }
    double domain_measure() const { return cell_measure_ * static_cast<double>(size()); }
    std::span<const double> origin() const { return origin_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    std::span<const std::size_t> strides() const { return strides_; }

    double operator[](std::size_t linear) const { return values_[linear]; }
    double at(std::span<const std::size_t> index) const;
    std::size_t linear_index(std::span<const std::size_t> index) const;

    /// The whole domain as a box of cells.
    IndexBox domain() const;

    double min_value() const;
    double max_value() const;

    /// Same grid with values transformed cell by cell.
    template <typename Fn>
    GridFunction map(Fn&& fn) const {
        std::vector<double> out(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) {
            out[i] = fn(values_[i]);
        }
        return GridFunction(extents_, cell_size_, origin_, std::move(out));
    }

    GridFunction with_values(std::vector<double> values) const {
        return GridFunction(extents_, cell_size_, origin_, std::move(values));
    }

private:
    std::vector<std::size_t> extents_;
    double cell_size_;
    double cell_measure_;
    std::vector<double> origin_;
    std::vector<double> values_;
    std::vector<std::size_t> strides_;
};

/// Cumulative sums over all lower-corner boxes; `box_sum` is O(2^n).
class PrefixSumTable {
public:
    explicit PrefixSumTable(const GridFunction& f);

    /// Table over squared cell values, used for second-moment bounds.
    static PrefixSumTable of_squares(const GridFunction& f);

    std::size_t dim() const { return extents_.size(); }
    std::span<const std::size_t> extents() const { return extents_; }
    double cell_measure() const { return cell_measure_; }
    std::size_t table_size() const { return table_.size(); }

    /// Plain sum of cell values over the box.
    long double value_sum(const IndexBox& box) const;
    /// Integral over the box: value sum times the cell measure.
    double box_sum(const IndexBox& box) const;

private:
    PrefixSumTable(const GridFunction& f, bool squares);

    std::vector<std::size_t> extents_;
    std::vector<std::size_t> table_strides_;
    double cell_measure_;
    std::vector<long double> table_;
};

/// Mean over a non-empty box. Throws `ErrorCode::EmptyShape` on zero measure.
double box_mean(const PrefixSumTable& table, const IndexBox& box);

/// Exact integral over a box whose corners may be fractional.
double box_integral(const GridFunction& f, const Box& box);
/// Exact mean over a box whose corners may be fractional.
double box_mean(const GridFunction& f, const Box& box);

/// Calls `fn(linear_index, weight)` for every cell meeting the box, where
/// `weight` is the overlap volume in cell units.
template <typename Fn>
void for_each_weighted_cell(const GridFunction& f, const Box& box, Fn&& fn);

/// Calls `fn(first_linear_index, length)` for each contiguous run of cells
/// along the last axis inside the box.
template <typename Fn>
void for_each_row(const GridFunction& f, const IndexBox& box, Fn&& fn) {
    const std::size_t n = f.dim();
    const auto strides = f.strides();
    const std::size_t last = n - 1;
    const std::size_t len = box.hi[last] - box.lo[last];
    if (box.empty()) return;
    std::array<std::size_t, kMaxDim> idx{};
    for (std::size_t a = 0; a < n; ++a) idx[a] = box.lo[a];
    while (true) {
        std::size_t base = 0;
        for (std::size_t a = 0; a < n; ++a) base += idx[a] * strides[a];
        fn(base, len);
        if (last == 0) return;
        std::size_t a = last;
        while (a-- > 0) {
            if (++idx[a] < box.hi[a]) break;
            idx[a] = box.lo[a];
            if (a == 0) return;
        }
    }
}

namespace detail {
struct AxisWeights {
    std::size_t first = 0;
    std::vector<double> weights;
};
AxisWeights axis_weights(double lo, double hi, std::size_t extent);
}  // namespace detail

template <typename Fn>
void for_each_weighted_cell(const GridFunction& f, const Box& box, Fn&& fn) {
    const std::size_t n = f.dim();
    std::array<detail::AxisWeights, kMaxDim> axes;
    for (std::size_t a = 0; a < n; ++a) {
        axes[a] = detail::axis_weights(box.lo[a], box.hi[a], f.extent(a));
        if (axes[a].weights.empty()) return;
    }
    const auto strides = f.strides();
    std::array<std::size_t, kMaxDim> idx{};
    while (true) {
        std::size_t linear = 0;
        double w = 1.0;
        for (std::size_t a = 0; a < n; ++a) {
            linear += (axes[a].first + idx[a]) * strides[a];
            w *= axes[a].weights[idx[a]];
        }
        fn(linear, w);
        std::size_t a = n;
        while (a-- > 0) {
            if (++idx[a] < axes[a].weights.size()) break;
            idx[a] = 0;
            if (a == 0) return;
        }
    }
}

}  // namespace oscbound
