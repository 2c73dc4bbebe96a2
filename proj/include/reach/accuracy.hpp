#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reach/config.hpp"
#include "reach/expression.hpp"

namespace reach::oracle {

struct AccuracyOptions {
  std::size_t devices = 100000;
  std::size_t scenarios = 50;
  std::uint64_t seed = 1;
  HashConfig config{};
  double tolerance_pct = 5.0;
  // Below this exact reach, a scenario is judged on absolute error instead:
  // |predicted - true| <= 3 / sqrt(k) * union estimate.
  std::uint64_t small_reach = 1000;
};

struct ScenarioResult {
  std::size_t index = 0;
  std::string shape;
  std::size_t clauses = 0;
  std::uint64_t true_value = 0;
  double predicted = 0.0;
  std::optional<double> error_pct;  // absent when true_value is 0
  double union_estimate = 0.0;
  bool absolute_rule = false;
  bool passed = false;
  TargetingExpression expression;
};

struct AccuracyReport {
  std::vector<ScenarioResult> scenarios;
  std::size_t pass_count = 0;
  double max_error = 0.0;  // over scenarios with a defined relative error
  double p90_error = 0.0;  // nearest-rank 90th percentile of the same
  double build_seconds = 0.0;
  double eval_seconds = 0.0;

  [[nodiscard]] double pass_rate() const noexcept;
  // Delimited text: scenario, shape, clauses, true_value, predicted_value,
  // error_rate_percent, rule, result.
  [[nodiscard]] std::string table() const;
  // {scenarios, pass_count, max_error, p90_error}
  [[nodiscard]] nlohmann::json summary() const;
};

// Builds a synthetic world and its hypercubes, draws scenarios cycling through
// the standard shapes, and compares the sketch estimate with the exact count.
// Deterministic for a given options value.
[[nodiscard]] AccuracyReport run_accuracy_suite(const AccuracyOptions& options);

}  // namespace reach::oracle
