#pragma once

#include "oscbound/grid.hpp"
#include "oscbound/shape.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace oscbound {

struct CZPair {
    Box selected;  // S_i, cell units
    Box parent;    // S~_i, cell units
};

struct CZDecomposition {
    double gamma = 0.0;
    double c_star = 1.0;
    std::string method;
    std::string basis;
    std::optional<double> t;
    std::vector<CZPair> pairs;

    nlohmann::json to_json(const GridFunction& g) const;
};

/// Average of g* over (0, t). Any box of measure at least t has mean at most
/// this level.
double level_from_t(const GridFunction& g, double t);

/// Stopping-time halving of power-of-two cubes into 2^n children; children
/// with mean above the level are selected. The base is the coarsest tiling by
/// equal power-of-two cubes.
CZDecomposition dyadic_cz(const GridFunction& g, double gamma);
/// Level from t; base cubes are the smallest power-of-two cubes of measure >= t.
CZDecomposition dyadic_cz_from_t(const GridFunction& g, double t);

enum class BaseTiling { Finest, Coarsest };

/// Repeated bisection of false cubes. Children with mean >= level are
/// selected together with their parent, so c* = 2. The default base is the
/// finest tiling by power-of-two cubes of measure >= t.
CZDecomposition bisection_cz(const GridFunction& g, double t,
                             BaseTiling tiling = BaseTiling::Finest);
/// Bisection at a given level over the coarsest power-of-two tiling.
CZDecomposition bisection_cz_level(const GridFunction& g, double gamma);

/// Riesz rising sun on a 1-D grid: maximal intervals on which the mean equals
/// gamma exactly, with g <= gamma elsewhere. Endpoints may fall inside cells.
CZDecomposition rising_sun_1d(const GridFunction& g, double gamma);

struct CZValidation {
    bool ok = true;
    /// "i", "ii", "iii" or "disjoint" for the first failed clause.
    std::string clause;
    std::string message;
    /// Largest |S~_i| / |S_i| seen.
    double measured_c = 0.0;
    /// Largest |mean(S_i) - gamma| / max(1, |gamma|) when S_i = S~_i.
    double equal_mean_error = 0.0;

    nlohmann::json to_json() const;
};

CZValidation validate_cz(const GridFunction& g, const CZDecomposition& d, double slack = 1e-12);

}  // namespace oscbound
