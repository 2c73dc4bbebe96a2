#include "reach/accuracy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "reach/errors.hpp"
#include "reach/oracle.hpp"
#include "reach/query.hpp"
#include "reach/synthetic.hpp"

namespace reach::oracle {
namespace {

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

}  // namespace

double AccuracyReport::pass_rate() const noexcept {
  return scenarios.empty() ? 0.0 : static_cast<double>(pass_count) / static_cast<double>(scenarios.size());
}

std::string AccuracyReport::table() const {
  std::string out = "scenario,shape,clauses,true_value,predicted_value,error_rate_percent,rule,result\n";
  char line[256];
  for (const auto& s : scenarios) {
    char err[32] = "n/a";
    if (s.error_pct) std::snprintf(err, sizeof err, "%.3f", *s.error_pct);
    std::snprintf(line, sizeof line, "%zu,%s,%zu,%llu,%.0f,%s,%s,%s\n", s.index, s.shape.c_str(), s.clauses,
                  static_cast<unsigned long long>(s.true_value), s.predicted, err,
                  s.absolute_rule ? "absolute" : "relative", s.passed ? "pass" : "FAIL");
    out += line;
  }
  return out;
}

nlohmann::json AccuracyReport::summary() const {
  return {{"scenarios", scenarios.size()}, {"pass_count", pass_count}, {"max_error", max_error}, {"p90_error", p90_error}};
}

AccuracyReport run_accuracy_suite(const AccuracyOptions& options) {
  options.config.validate();
  if (options.scenarios == 0) throw ConfigError("scenario count must be positive");

  AccuracyReport report;
  const auto build_start = std::chrono::steady_clock::now();
  const auto world = make_world(options.devices, options.seed);
  CubeCatalog catalog;
  MaterializedDimensions dims;
  const auto universe = cube::device_hashes(world.universe);
  for (const auto& d : world.dimensions) {
    catalog.add(cube::build_exclude(cube::build_cells(d.records, d.group_by, options.config, d.name), universe));
    dims.emplace(d.name, materialize(d.records, d.group_by, d.name, world.universe));
  }
  report.build_seconds = seconds_since(build_start);

  const auto eval_start = std::chrono::steady_clock::now();
  // Scenario draws use their own stream so the world and the scenarios vary
  // independently with the seed.
  std::mt19937_64 rng(options.seed ^ 0x5ce7a810ULL);
  const double abs_bound = 3.0 / std::sqrt(static_cast<double>(options.config.bins));
  std::vector<double> errors;
  for (std::size_t i = 0; i < options.scenarios; ++i) {
    const auto& shape = kScenarioShapes[i % std::size(kScenarioShapes)];
    ScenarioResult r;
    r.index = i;
    r.shape = shape.label();
    r.clauses = shape.clauses();
    r.expression = make_scenario(dims, shape, rng);
    r.true_value = oracle_reach(dims, r.expression);
    const auto est = eval_expression(catalog, r.expression);
    r.predicted = est.reach;
    r.union_estimate = est.union_cardinality;
    if (r.true_value > 0) {
      r.error_pct = relative_error(r.true_value, r.predicted);
      errors.push_back(*r.error_pct);
    }
    r.absolute_rule = r.true_value < options.small_reach;
    if (r.absolute_rule) {
      r.passed = std::abs(r.predicted - static_cast<double>(r.true_value)) <= abs_bound * r.union_estimate;
    } else {
      r.passed = *r.error_pct <= options.tolerance_pct;
    }
    report.pass_count += r.passed ? 1 : 0;
    report.scenarios.push_back(std::move(r));
  }
  report.eval_seconds = seconds_since(eval_start);

  if (!errors.empty()) {
    std::sort(errors.begin(), errors.end());
    report.max_error = errors.back();
    const auto rank = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(errors.size())));
    report.p90_error = errors[std::max<std::size_t>(rank, 1) - 1];
  }
  return report;
}

}  // namespace reach::oracle
