#pragma once

#include "oscbound/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace oscbound {

// OSCG binary layout, all little-endian:
//   "OSCG" | u32 version=1 | u32 n | u32 extents[n] | f64 cell_size |
//   f64 origin[n] | f64 values[prod extents], row-major.
inline constexpr char kGridMagic[4] = {'O', 'S', 'C', 'G'};
inline constexpr std::uint32_t kGridVersion = 1;

std::vector<std::uint8_t> encode_grid(const GridFunction& f);
/// `expected_dim`, when given, rejects grids of any other dimension.
GridFunction decode_grid(const std::vector<std::uint8_t>& bytes,
                         std::optional<std::size_t> expected_dim = std::nullopt);

void save_grid(const GridFunction& f, const std::filesystem::path& path);
GridFunction load_grid(const std::filesystem::path& path,
                       std::optional<std::size_t> expected_dim = std::nullopt);

}  // namespace oscbound
