#pragma once

#include "oscbound/grid.hpp"
#include "oscbound/shape.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace oscbound {

enum class BasisFamily {
    Cubes,        // Q
    Rectangles,   // R
    FalseCubes,   // W
    Balls,        // B (analytic only)
    Sectors,      // A (analytic only)
    Custom,
};

std::string to_string(BasisFamily family);
BasisFamily basis_family_from_string(const std::string& name);

struct BasisDescriptor {
    BasisFamily family = BasisFamily::Cubes;
    /// Largest side in cells; 0 means no limit.
    std::size_t max_side = 0;
    /// Placement stride in cells.
    std::size_t stride = 1;
    /// False cubes only: long sides may sit on any proper subset of axes
    /// instead of the leading ones.
    bool permuted_axes = false;
    /// Shapes for `BasisFamily::Custom`.
    std::vector<IndexBox> custom;

    bool cell_enumerable() const {
        return family != BasisFamily::Balls && family != BasisFamily::Sectors;
    }
};

/// Decomposition data for a cell-aligned false cube: sides are `short_side`
/// on the axes not in `long_axes` and `2 * short_side` on those in it.
struct FalseCubeInfo {
    std::size_t short_side = 0;
    std::vector<std::size_t> long_axes;
};

/// Classifies a cell-aligned box as a false cube with cell-aligned subcubes.
///
/// Cubes of even side are read as all-long false cubes (2^n subcubes); cubes
/// of odd side have no cell-aligned split and are reported with no long axes.
std::optional<FalseCubeInfo> classify_false_cube(const IndexBox& box);

/// The 2^m subcubes of a false cube, indexed by bit strings: bit i of the
/// index selects the upper half along `info.long_axes[i]`.
std::vector<IndexBox> false_cube_subcubes(const IndexBox& box, const FalseCubeInfo& info);

/// Splits a false cube into two congruent false cubes by halving the last
/// long axis (the m-th coordinate for the leading-axes family).
std::pair<IndexBox, IndexBox> bisect_false_cube(const IndexBox& box);

/// Visits every shape of the basis that fits in the grid, exactly once.
/// `scale` is the shortest side in cells.
void for_each_shape(const BasisDescriptor& basis, std::span<const std::size_t> extents,
                    const std::function<void(const IndexBox&, std::size_t scale)>& fn);

std::size_t count_shapes(const BasisDescriptor& basis, std::span<const std::size_t> extents);

/// Materialised enumeration. Balls and sectors are rejected with
/// `ErrorCode::NotCellEnumerable`.
std::vector<Shape> enumerate_basis(const BasisDescriptor& basis, const GridFunction& g);

}  // namespace oscbound
