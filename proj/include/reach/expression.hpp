#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace reach {

enum class Mode { include, exclude };

[[nodiscard]] std::string_view to_string(Mode mode) noexcept;

// One targeting over a hypercube. Columns are combined conjunctively; the
// values listed for one column are alternatives.
struct TargetingClause {
  std::string dimension;
  std::map<std::string, std::vector<std::string>> filters;
  Mode mode = Mode::include;

  friend bool operator==(const TargetingClause&, const TargetingClause&) = default;
};

struct Creative {
  std::vector<TargetingClause> targetings;

  friend bool operator==(const Creative&, const Creative&) = default;
};

// placement (T1 ∩ ... ∩ TN) ∩ (creative 1 ∪ ... ∪ creative M), where each
// creative is the intersection of its own clauses.
struct TargetingExpression {
  std::vector<TargetingClause> placement;
  std::vector<Creative> creatives;

  [[nodiscard]] std::size_t clause_count() const noexcept;

  friend bool operator==(const TargetingExpression&, const TargetingExpression&) = default;
};

// Validates an expression document. Throws SchemaError whose path is a JSON
// pointer to the offending member ("/placement/targetings/0/mode").
[[nodiscard]] TargetingExpression parse_expression(const nlohmann::json& document);

// Parses JSON text first; malformed text throws nlohmann::json::parse_error.
[[nodiscard]] TargetingExpression parse_expression(std::string_view text);

[[nodiscard]] nlohmann::json to_json(const TargetingExpression& expr);
[[nodiscard]] nlohmann::json to_json(const TargetingClause& clause);

}  // namespace reach
