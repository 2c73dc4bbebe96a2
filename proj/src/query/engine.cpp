#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

#include "reach/errors.hpp"
#include "reach/query.hpp"

namespace reach {
namespace {

struct ColumnFilter {
  std::size_t position;
  std::vector<std::string> values;  // sorted
};

std::vector<ColumnFilter> compile_filters(const cube::Hypercube& cube, const TargetingClause& clause) {
  std::vector<ColumnFilter> out;
  for (const auto& [column, values] : clause.filters) {
    const int pos = cube.column_position(column);
    if (pos < 0) throw ResolutionError(ResolutionError::Kind::unknown_column, cube.dimension, column);
    ColumnFilter f{static_cast<std::size_t>(pos), values};
    std::sort(f.values.begin(), f.values.end());
    out.push_back(std::move(f));
  }
  return out;
}

// Folds a chain of operands into one intersection; the first operand seeds
// the accumulator.
void fold_intersection(std::optional<IntermediateSignature>& acc, const IntermediateSignature& operand) {
  if (!acc) {
    acc = operand;
  } else {
    acc->intersect(operand);
  }
}

}  // namespace

void CubeCatalog::add(cube::Hypercube cube) {
  const std::string name = cube.dimension;
  if (!cubes_.emplace(name, std::move(cube)).second) {
    throw ConfigError("hypercube '" + name + "' loaded twice");
  }
}

const cube::Hypercube* CubeCatalog::find(std::string_view dimension) const noexcept {
  const auto it = cubes_.find(dimension);
  return it == cubes_.end() ? nullptr : &it->second;
}

std::vector<std::size_t> select_cells(const cube::Hypercube& cube, const TargetingClause& clause) {
  if (clause.dimension != cube.dimension) {
    throw ResolutionError(ResolutionError::Kind::unknown_dimension, clause.dimension);
  }
  const auto filters = compile_filters(cube, clause);
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < cube.cells.size(); ++i) {
    const auto& key = cube.cells[i].key.values;
    const bool match = std::all_of(filters.begin(), filters.end(), [&](const ColumnFilter& f) {
      return std::binary_search(f.values.begin(), f.values.end(), key[f.position]);
    });
    if (match) selected.push_back(i);
  }
  return selected;
}

OperandSketches resolve_operand(const cube::Hypercube& cube, const TargetingClause& clause) {
  const auto selected = select_cells(cube, clause);
  if (selected.empty()) throw EmptySelectionError(clause.dimension);

  const auto& config = cube.config;
  OperandSketches out{HllSketch(config), IntermediateSignature(config), selected.size()};
  if (clause.mode == Mode::include) {
    MinHashSignature merged(config);
    for (const auto i : selected) {
      out.hll_part.merge(cube.cells[i].hll);
      merged.merge(cube.cells[i].minhash);
    }
    out.mh_part = IntermediateSignature::from_signature(merged);
    return out;
  }

  std::optional<IntermediateSignature> acc;
  for (const auto i : selected) {
    const auto& cell = cube.cells[i];
    out.hll_part.merge(cell.exhll);
    if (!acc) {
      acc = IntermediateSignature::from_signature(cell.exminhash);
    } else {
      acc->intersect(cell.exminhash);
    }
  }
  out.mh_part = std::move(*acc);
  return out;
}

OperandSketches resolve_operand(const CubeCatalog& catalog, const TargetingClause& clause) {
  const auto* cube = catalog.find(clause.dimension);
  if (cube == nullptr) throw ResolutionError(ResolutionError::Kind::unknown_dimension, clause.dimension);
  return resolve_operand(*cube, clause);
}

double estimate_reach(double jaccard, double union_cardinality) {
  if (!(jaccard >= 0.0 && jaccard <= 1.0)) {
    throw ContractError("jaccard ratio " + std::to_string(jaccard) + " outside [0, 1]");
  }
  if (!(union_cardinality >= 0.0)) throw ContractError("union cardinality must be non-negative");
  return jaccard * union_cardinality;
}

nlohmann::json ReachEstimate::to_json() const {
  return {{"reach", reach},
          {"jaccard", jaccard},
          {"unionCardinality", union_cardinality},
          {"operandCount", operand_count},
          {"elapsedMs", elapsed_ms}};
}

ReachEstimate eval_expression(const CubeCatalog& catalog, const TargetingExpression& expr) {
  const auto start = std::chrono::steady_clock::now();
  if (expr.placement.empty()) throw ContractError("placement needs at least one targeting");

  // Resolve every clause up front so configuration mismatches surface before
  // any sketch arithmetic.
  const cube::Hypercube* first = nullptr;
  auto lookup = [&](const TargetingClause& clause) -> const cube::Hypercube& {
    const auto* cube = catalog.find(clause.dimension);
    if (cube == nullptr) throw ResolutionError(ResolutionError::Kind::unknown_dimension, clause.dimension);
    if (first == nullptr) {
      first = cube;
    } else {
      require_same_config(first->config, cube->config);
    }
    return *cube;
  };
  for (const auto& c : expr.placement) (void)lookup(c);
  for (const auto& cr : expr.creatives) {
    for (const auto& c : cr.targetings) (void)lookup(c);
  }
  const HashConfig config = first->config;

  HllSketch all(config);
  auto fold_chain = [&](const std::vector<TargetingClause>& clauses) {
    std::optional<IntermediateSignature> acc;
    for (const auto& c : clauses) {
      auto op = resolve_operand(*catalog.find(c.dimension), c);
      all.merge(op.hll_part);
      fold_intersection(acc, op.mh_part);
    }
    return std::move(*acc);
  };

  IntermediateSignature final_sig = fold_chain(expr.placement);
  if (!expr.creatives.empty()) {
    IntermediateSignature creative_level(config);
    for (const auto& cr : expr.creatives) {
      if (cr.targetings.empty()) throw ContractError("creative needs at least one targeting");
      creative_level.unite(fold_chain(cr.targetings));
    }
    final_sig.intersect(creative_level);
  }

  ReachEstimate out;
  out.jaccard = jaccard_ratio(final_sig).value;
  out.union_cardinality = all.estimate();
  out.reach = estimate_reach(out.jaccard, out.union_cardinality);
  out.operand_count = expr.clause_count();
  out.valid_bins = final_sig.valid_count();
  out.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace reach
