#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "reach/expression.hpp"
#include "reach/hypercube.hpp"
#include "reach/records.hpp"

namespace reach::oracle {

// Exact ground truth for one dimension: the PSIDs behind every cell and the
// device universe used for complements.
struct MaterializedDimension {
  std::string name;
  std::vector<std::string> group_by;
  std::map<cube::CellKey, std::vector<std::string>> cells;  // sorted, distinct PSIDs
  std::vector<std::string> universe;                        // sorted, distinct PSIDs
};

using MaterializedDimensions = std::map<std::string, MaterializedDimension, std::less<>>;

// Groups rows the same way the cube builder does (empty values become
// "(empty)") but keeps the exact PSID sets.
[[nodiscard]] MaterializedDimension materialize(const cube::RecordBatch& records, std::span<const std::string> group_by,
                                                std::string name, const cube::RecordBatch& universe);

// |placement ∩ (creative 1 ∪ ... ∪ creative M)| with real set operations.
// An exclude clause is the universe minus the union of its selected cells.
// Throws the same resolution errors as the query engine.
[[nodiscard]] std::uint64_t oracle_reach(const MaterializedDimensions& dims, const TargetingExpression& expr);

// Second implementation: evaluates the expression as a predicate on each
// device in turn. Used to cross-check oracle_reach.
[[nodiscard]] std::uint64_t oracle_reach_per_device(const MaterializedDimensions& dims,
                                                    const TargetingExpression& expr);

// Exact device set of one clause.
[[nodiscard]] std::vector<std::string> clause_devices(const MaterializedDimensions& dims,
                                                      const TargetingClause& clause);

// |true - observed| / true * 100. Throws ContractError when true_value is 0;
// report absolute error in that case.
[[nodiscard]] double relative_error(std::uint64_t true_value, double observed);

}  // namespace reach::oracle
