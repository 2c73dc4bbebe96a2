#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "reach/expression.hpp"
#include "reach/hll.hpp"
#include "reach/hypercube.hpp"
#include "reach/minhash.hpp"

namespace reach {

// Named hypercubes an expression resolves against. Immutable once built.
class CubeCatalog {
 public:
  // Throws ConfigError when a cube with the same dimension name exists.
  void add(cube::Hypercube cube);
  [[nodiscard]] const cube::Hypercube* find(std::string_view dimension) const noexcept;
  [[nodiscard]] std::size_t size() const noexcept { return cubes_.size(); }
  [[nodiscard]] const std::map<std::string, cube::Hypercube, std::less<>>& cubes() const noexcept { return cubes_; }

 private:
  std::map<std::string, cube::Hypercube, std::less<>> cubes_;
};

// Sketches one clause contributes. An include clause is the merged
// signature of its cells, lifted. An exclude clause over several cells is the
// intersection of their exclude signatures: the complement of a union is the
// intersection of complements.
struct OperandSketches {
  HllSketch hll_part;
  IntermediateSignature mh_part;
  std::size_t cells = 0;
};

// Throws ResolutionError for an unknown dimension or column and
// EmptySelectionError when no cell matches.
[[nodiscard]] OperandSketches resolve_operand(const cube::Hypercube& cube, const TargetingClause& clause);
[[nodiscard]] OperandSketches resolve_operand(const CubeCatalog& catalog, const TargetingClause& clause);

// Indices of the cells whose key satisfies every filter.
[[nodiscard]] std::vector<std::size_t> select_cells(const cube::Hypercube& cube, const TargetingClause& clause);

struct ReachEstimate {
  double reach = 0.0;
  double jaccard = 0.0;
  double union_cardinality = 0.0;
  std::size_t operand_count = 0;  // clauses evaluated
  double elapsed_ms = 0.0;
  // Valid bins of the final intermediate.
  std::size_t valid_bins = 0;

  [[nodiscard]] nlohmann::json to_json() const;
};

// Throws ContractError unless jaccard lies in [0, 1] and the cardinality is
// non-negative.
[[nodiscard]] double estimate_reach(double jaccard, double union_cardinality);

// Throws IncompatibleSketchError when the referenced cubes disagree on
// HashConfig, plus any resolution error.
[[nodiscard]] ReachEstimate eval_expression(const CubeCatalog& catalog, const TargetingExpression& expr);

}  // namespace reach
