#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "reach/expression.hpp"
#include "reach/oracle.hpp"
#include "reach/records.hpp"

namespace reach::oracle {

struct SyntheticDimension {
  std::string name;
  std::vector<std::string> group_by;
  cube::RecordBatch records;
};

// A seeded device population with four dimensions of group-by arity 1 to 3:
//   DeviceProfile(year, chipset, screen)  one row per device
//   Region(region)                        one row per device
//   Program(genre, daypart)               1-4 rows for most devices
//   AppUsage(app_category)                1-3 rows for most devices
struct SyntheticWorld {
  cube::RecordBatch universe;
  std::vector<SyntheticDimension> dimensions;
};

[[nodiscard]] SyntheticWorld make_world(std::size_t devices, std::uint64_t seed);

// Clause counts of one scenario: placement clauses, number of creatives and
// clauses across all creatives.
struct ScenarioShape {
  std::size_t placement = 0;
  std::size_t creatives = 0;
  std::size_t creative_clauses = 0;

  [[nodiscard]] std::string label() const;
  [[nodiscard]] std::size_t clauses() const noexcept { return placement + creative_clauses; }
};

// 5 / 5+5 / 10+10 / 10+30 clauses.
inline constexpr ScenarioShape kScenarioShapes[] = {{5, 0, 0}, {5, 1, 5}, {10, 1, 10}, {10, 5, 30}};

// Random expression of the given shape over the materialized dimensions. One
// clause in five excludes. Include clauses keep most of a dimension's
// population and exclude clauses remove a small slice, so that long clause
// chains still leave a sizeable audience.
[[nodiscard]] TargetingExpression make_scenario(const MaterializedDimensions& dims, const ScenarioShape& shape,
                                                std::mt19937_64& rng);

}  // namespace reach::oracle
