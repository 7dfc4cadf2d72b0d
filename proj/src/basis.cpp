#include "oscbound/basis.hpp"

#include "oscbound/error.hpp"

#include <algorithm>

namespace oscbound {

std::string to_string(BasisFamily family) {
    switch (family) {
    case BasisFamily::Cubes: return "cubes";
    case BasisFamily::Rectangles: return "rectangles";
    case BasisFamily::FalseCubes: return "falsecubes";
    case BasisFamily::Balls: return "balls";
    case BasisFamily::Sectors: return "sectors";
    case BasisFamily::Custom: return "custom";
    }
    return "unknown";
}

BasisFamily basis_family_from_string(const std::string& name) {
    if (name == "cubes" || name == "Q") return BasisFamily::Cubes;
    if (name == "rectangles" || name == "R") return BasisFamily::Rectangles;
    if (name == "falsecubes" || name == "W") return BasisFamily::FalseCubes;
    if (name == "balls" || name == "B") return BasisFamily::Balls;
    if (name == "sectors" || name == "A") return BasisFamily::Sectors;
    if (name == "custom") return BasisFamily::Custom;
    throw Error(ErrorCode::InvalidArgument, "unknown basis '" + name + "'");
}

std::optional<FalseCubeInfo> classify_false_cube(const IndexBox& box) {
    if (box.empty()) return std::nullopt;
    std::size_t shortest = box.side(0);
    std::size_t longest = box.side(0);
    for (std::size_t a = 1; a < box.dim; ++a) {
        shortest = std::min(shortest, box.side(a));
        longest = std::max(longest, box.side(a));
    }
    FalseCubeInfo info;
    if (shortest == longest) {
        if (shortest % 2 == 0) {
            info.short_side = shortest / 2;
            for (std::size_t a = 0; a < box.dim; ++a) info.long_axes.push_back(a);
        } else {
            info.short_side = shortest;
        }
        return info;
    }
    if (longest != 2 * shortest) return std::nullopt;
    info.short_side = shortest;
    for (std::size_t a = 0; a < box.dim; ++a) {
        if (box.side(a) == longest) info.long_axes.push_back(a);
    }
    return info;
}

std::vector<IndexBox> false_cube_subcubes(const IndexBox& box, const FalseCubeInfo& info) {
    const std::size_t m = info.long_axes.size();
    std::vector<IndexBox> out;
    out.reserve(std::size_t{1} << m);
    for (std::size_t nu = 0; nu < (std::size_t{1} << m); ++nu) {
        IndexBox q = box;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t a = info.long_axes[i];
            const std::size_t mid = box.lo[a] + info.short_side;
            if (nu & (std::size_t{1} << i)) {
                q.lo[a] = mid;
            } else {
                q.hi[a] = mid;
            }
        }
        out.push_back(q);
    }
    return out;
}

std::pair<IndexBox, IndexBox> bisect_false_cube(const IndexBox& box) {
    const auto info = classify_false_cube(box);
    if (!info || info->long_axes.empty()) {
        throw Error(ErrorCode::NotAFalseCube, "box cannot be bisected into false cubes");
    }
    const std::size_t a = info->long_axes.back();
    IndexBox left = box;
    IndexBox right = box;
    left.hi[a] = box.lo[a] + info->short_side;
    right.lo[a] = left.hi[a];
    return {left, right};
}

namespace {

using Visitor = std::function<void(const IndexBox&, std::size_t)>;

// Visits every placement of a box with the given sides.
void place(std::span<const std::size_t> extents, std::span<const std::size_t> sides,
           std::size_t stride, std::size_t scale, const Visitor& fn) {
    const std::size_t n = extents.size();
    IndexBox box;
    box.dim = n;
    for (std::size_t a = 0; a < n; ++a) {
        if (sides[a] == 0 || sides[a] > extents[a]) return;
        box.lo[a] = 0;
        box.hi[a] = sides[a];
    }
    while (true) {
        fn(box, scale);
        std::size_t a = n;
        while (true) {
            if (a == 0) return;
            --a;
            box.lo[a] += stride;
            box.hi[a] += stride;
            if (box.hi[a] <= extents[a]) break;
            box.lo[a] = 0;
            box.hi[a] = sides[a];
        }
    }
}

std::size_t min_extent(std::span<const std::size_t> extents) {
    return *std::min_element(extents.begin(), extents.end());
}

void visit_cubes(const BasisDescriptor& b, std::span<const std::size_t> extents,
                 const Visitor& fn) {
    const std::size_t n = extents.size();
    std::size_t top = min_extent(extents);
    if (b.max_side) top = std::min(top, b.max_side);
    std::vector<std::size_t> sides(n);
    for (std::size_t k = 1; k <= top; ++k) {
        std::fill(sides.begin(), sides.end(), k);
        place(extents, sides, b.stride, k, fn);
    }
}

void visit_false_cubes(const BasisDescriptor& b, std::span<const std::size_t> extents,
                       const Visitor& fn) {
    visit_cubes(b, extents, fn);
    const std::size_t n = extents.size();
    if (n < 2) return;
    std::vector<std::size_t> sides(n);
    const std::size_t top = min_extent(extents);
    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
        if (!b.permuted_axes) {
            // Leading-axes family: masks of the form 0b0..01..1.
            if ((mask & (mask + 1)) != 0) continue;
        }
        for (std::size_t k = 1; k <= top; ++k) {
            if (b.max_side && 2 * k > b.max_side) break;
            bool fits = true;
            for (std::size_t a = 0; a < n; ++a) {
                sides[a] = (mask & (std::size_t{1} << a)) ? 2 * k : k;
                fits = fits && sides[a] <= extents[a];
            }
            if (!fits) break;
            place(extents, sides, b.stride, k, fn);
        }
    }
}

void visit_rectangles(const BasisDescriptor& b, std::span<const std::size_t> extents,
                      const Visitor& fn) {
    const std::size_t n = extents.size();
    IndexBox box;
    box.dim = n;
    std::array<std::size_t, kMaxDim> limit{};
    for (std::size_t a = 0; a < n; ++a) {
        limit[a] = b.max_side ? std::min(b.max_side, extents[a]) : extents[a];
        box.lo[a] = 0;
        box.hi[a] = 1;
    }
    while (true) {
        std::size_t scale = box.side(0);
        for (std::size_t a = 1; a < n; ++a) scale = std::min(scale, box.side(a));
        fn(box, scale);
        std::size_t a = n;
        while (true) {
            if (a == 0) return;
            --a;
            // Advance hi first, then lo.
            if (box.hi[a] + 1 <= extents[a] && box.hi[a] + 1 - box.lo[a] <= limit[a]) {
                ++box.hi[a];
                break;
            }
            box.lo[a] += b.stride;
            if (box.lo[a] < extents[a]) {
                box.hi[a] = box.lo[a] + 1;
                break;
            }
            box.lo[a] = 0;
            box.hi[a] = 1;
        }
    }
}

}  // namespace

void for_each_shape(const BasisDescriptor& basis, std::span<const std::size_t> extents,
                    const Visitor& fn) {
    if (extents.empty()) throw Error(ErrorCode::InvalidArgument, "empty extents");
    if (basis.stride == 0) throw Error(ErrorCode::InvalidArgument, "stride must be positive");
    switch (basis.family) {
    case BasisFamily::Cubes: visit_cubes(basis, extents, fn); return;
    case BasisFamily::FalseCubes: visit_false_cubes(basis, extents, fn); return;
    case BasisFamily::Rectangles: visit_rectangles(basis, extents, fn); return;
    case BasisFamily::Custom:
        for (const auto& box : basis.custom) {
            if (box.dim != extents.size()) {
                throw Error(ErrorCode::DimensionMismatch, "custom shape has wrong dimension");
            }
            for (std::size_t a = 0; a < box.dim; ++a) {
                if (box.hi[a] > extents[a]) {
                    throw Error(ErrorCode::OutOfRange, "custom shape leaves the grid");
                }
            }
            if (box.empty()) throw Error(ErrorCode::EmptyShape, "empty shape");
            std::size_t scale = box.side(0);
            for (std::size_t a = 1; a < box.dim; ++a) scale = std::min(scale, box.side(a));
            fn(box, scale);
        }
        return;
    case BasisFamily::Balls:
    case BasisFamily::Sectors:
        throw Error(ErrorCode::NotCellEnumerable,
                    "not cell-enumerable: basis " + to_string(basis.family) +
                        " is used analytically only");
    }
}

std::size_t count_shapes(const BasisDescriptor& basis, std::span<const std::size_t> extents) {
    std::size_t count = 0;
    for_each_shape(basis, extents, [&](const IndexBox&, std::size_t) { ++count; });
    return count;
}

std::vector<Shape> enumerate_basis(const BasisDescriptor& basis, const GridFunction& g) {
    std::vector<Shape> out;
    for_each_shape(basis, g.extents(),
                   [&](const IndexBox& box, std::size_t) { out.emplace_back(Box::from_cells(box)); });
    return out;
}

}  // namespace oscbound
