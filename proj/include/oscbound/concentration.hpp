#pragma once

#include "oscbound/grid.hpp"

#include "json.hpp"

#include <vector>

namespace oscbound {

/// g on {0,1}^m with independent coordinates, P(x_i = 1) = p. Entry `nu` of
/// the table is g at the point whose i-th coordinate is bit i of nu.
struct ConcentrationInstance {
    std::size_t m = 0;
    std::vector<double> table{0.0};
    double p = 0.5;

    ConcentrationInstance() = default;
    ConcentrationInstance(std::size_t m, std::vector<double> table, double p = 0.5);

    nlohmann::json to_json() const;
    static ConcentrationInstance from_json(const nlohmann::json& j);
};

inline constexpr std::size_t kMaxConcentrationBits = 20;

/// Smallest a_i with |g(x) - g(x with bit i flipped)| <= a_i for all x.
std::vector<double> bounded_differences(const ConcentrationInstance& inst);

struct ConcentrationCheck {
    double mean = 0.0;  // E g
    double lhs = 0.0;   // E |g - E g|
    double rhs = 0.0;   // |a|_2 / 2
};

/// Exact enumeration of all 2^m outcomes under the product measure.
ConcentrationCheck check_concentration(const ConcentrationInstance& inst);

/// g(nu) = mean of f over the subcube Q(nu) of the false cube r.
ConcentrationInstance subcube_gadget(const GridFunction& f, const IndexBox& r);

}  // namespace oscbound
