#pragma once

#include <string>
#include <vector>

#include "reach/hypercube.hpp"
#include "reach/records.hpp"

namespace reach::testing {

inline std::string psid(std::size_t device) { return "dev" + std::to_string(device); }

// Hypercube over `rows` (PSID first, then one value per column) with a
// universe of devices 0..universe-1.
inline cube::Hypercube make_cube(const std::string& dimension, const std::vector<std::string>& columns,
                                 const std::vector<std::vector<std::string>>& rows, std::size_t universe,
                                 const HashConfig& config, bool exact = false) {
  std::vector<std::string> names{"PSID"};
  names.insert(names.end(), columns.begin(), columns.end());
  const auto batch = cube::make_batch(names, rows, "PSID");
  std::vector<std::vector<std::string>> uni;
  uni.reserve(universe);
  for (std::size_t d = 0; d < universe; ++d) uni.push_back({psid(d)});
  const auto ubatch = cube::make_batch({"PSID"}, uni, "PSID");
  return cube::build_exclude(cube::build_cells(batch, columns, config, dimension), ubatch, {exact});
}

}  // namespace reach::testing
