#pragma once

#include "oscbound/shape.hpp"

#include <cstdint>

namespace oscbound {

/// Nested triple inner ⊂ middle ⊂ outer produced by a basis-equivalence
/// construction, with the volume ratios the construction promises.
///
/// Two-shape constructions (cube/ball) repeat the given shape as `middle`.
struct EquivalenceWitness {
    Shape inner;
    Shape middle;
    Shape outer;
    /// Declared |middle| / |inner|.
    double middle_ratio = 1.0;
    /// Declared |outer| / |inner|.
    double outer_ratio = 1.0;
};

/// Cube of side l -> circumscribed ball of radius sqrt(n) l / 2 (centred on
/// the cube); ball of radius r -> circumscribed cube of side 2r.
EquivalenceWitness circumscribe_cube_ball(const Shape& cube_or_ball);

/// Ball B(x, r) -> shape in basis A containing it, then a ball of radius 2r
/// containing that.
EquivalenceWitness sector_for_ball(const Ball& ball);

/// Shape in basis A -> inscribed ball and a circumscribed ball of twice its
/// radius.
EquivalenceWitness ball_for_sector(const Shape& a);

struct ContainmentReport {
    std::size_t samples = 0;
    std::size_t in_inner = 0;
    std::size_t in_middle = 0;
    /// Points in inner but not middle, or in middle but not outer.
    std::size_t violations = 0;
};

/// Samples `samples` points uniformly in the outer shape and checks the
/// nesting pointwise.
ContainmentReport check_containment(const EquivalenceWitness& w, std::size_t samples,
                                    std::uint64_t seed);

}  // namespace oscbound
