#pragma once

#include "oscbound/grid.hpp"

#include "json.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace oscbound {

struct ConstantsRow {
    std::size_t n = 1;
    double omega = 0.0;
    double dyadic = 0.0;       // 2^n
    double bisection = 2.0;
    double rising_sun = 1.0;
    double wik = 0.0;          // 1 + 2 sqrt(n-1)
    double theorem = 0.0;      // 2 (1 + 2 sqrt(n-1))
    double composite = 0.0;    // min(dyadic, theorem)
    double iso_route = 0.0;    // 2^((n+1)/2), documentation only
    double ball_over_cube = 0.0;  // 2^-n n^(n/2) omega
    double cube_over_ball = 0.0;  // 2^n / omega
    double sdr_lower = 0.0;    // 2^-2n omega
    double sdr_upper = 0.0;    // n^(n/2) omega
    double d_n = 0.0;          // theorem * sdr_upper

    nlohmann::json to_json() const;
};

ConstantsRow constants(std::size_t n);

enum class CorpusFamily {
    DyadicUnion,   // (a)
    Piecewise,     // (b)
    LogSpike,      // (c)
    RadialBump,    // (d)
    Checkerboard,  // (e)
    TwoLevel,      // (f)
};

inline constexpr std::size_t kCorpusFamilies = 6;

std::string to_string(CorpusFamily family);
CorpusFamily corpus_family_from_string(const std::string& name);

std::uint64_t splitmix64(std::uint64_t x);

struct CorpusOptions {
    std::vector<std::size_t> extents;
    /// Relative weights of the families, in enum order.
    std::array<double, kCorpusFamilies> weights{1, 1, 1, 1, 1, 1};
    /// Fraction of blocks switched on in family (a); random when unset.
    std::optional<double> density;
};

/// One member of the corpus on [0, 1) along the first axis (cell size
/// 1 / extents[0]). Values are non-negative. Deterministic in `seed`.
GridFunction generate_function(CorpusFamily family, const CorpusOptions& options,
                               std::uint64_t seed);
/// Member `index`: family drawn by weight, seed mixed from `seed + index`.
GridFunction corpus_member(const CorpusOptions& options, std::uint64_t seed, std::size_t index);
std::vector<GridFunction> generate_corpus(const CorpusOptions& options, std::uint64_t seed,
                                          std::size_t count);

struct SuiteConfig {
    std::string suite;
    std::size_t dim = 2;
    /// Defaults depend on the suite and dimension when empty.
    std::vector<std::size_t> extents;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::array<double, kCorpusFamilies> weights{1, 1, 1, 1, 1, 1};
    std::optional<double> density;
    /// Suite default when unset.
    std::optional<double> slack;
    bool refine = true;
    std::size_t supersample = 4;
    std::size_t threads = 1;
    /// Sample points per witness in shape-equivalence.
    std::size_t samples = 100000;
    /// Where reproducers go on a violation; nothing is written when empty.
    std::filesystem::path reproducer_dir;

    nlohmann::json to_json() const;
};

struct TrialResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool ok = true;
    nlohmann::json witness = nlohmann::json::object();
};

struct SuiteReport {
    std::string suite;
    nlohmann::json config;
    double constant = 1.0;
    /// Two-sided suites only.
    std::optional<double> lower_constant;
    double slack = 0.0;
    double max_ratio = 0.0;
    /// Over trials where not both sides are numerically zero (below 1e-13).
    double min_ratio = 0.0;
    bool pass = true;
    std::vector<TrialResult> trials;
    std::vector<std::string> reproducers;
    double wall_time_s = 0.0;

    nlohmann::json to_json() const;
    /// "trial,lhs,rhs,ratio,ok" rows.
    std::string to_csv() const;
};

const std::vector<std::string>& suite_ids();
/// Throws `ErrorCode::UnknownSuite`.
SuiteReport run_suite(const SuiteConfig& config);

/// Rows "suite,n,constant,max_ratio" for plotting ratios against dimension.
std::string plot_data(const std::vector<SuiteReport>& reports);

}  // namespace oscbound
