#include "reach/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <unordered_set>

#include "reach/errors.hpp"

namespace reach::oracle {
namespace {

using Rows = std::vector<std::vector<std::string>>;

struct Weighted {
  std::vector<std::string> values;
  std::discrete_distribution<std::size_t> pick;

  Weighted(std::vector<std::string> v, const std::vector<double>& w) : values(std::move(v)), pick(w.begin(), w.end()) {}
  const std::string& operator()(std::mt19937_64& rng) { return values[pick(rng)]; }
};

std::vector<std::string> device_ids(std::size_t n, std::mt19937_64& rng) {
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::string> out;
  out.reserve(n);
  char buf[24];
  while (out.size() < n) {
    const std::uint64_t mac = rng() & 0xFFFFFFFFFFFFULL;
    if (!seen.insert(mac).second) continue;
    std::snprintf(buf, sizeof buf, "%012llx", static_cast<unsigned long long>(mac));
    out.emplace_back(buf);
  }
  return out;
}

// Per-value row weight of one column, read from the materialized cells.
std::map<std::string, double> value_weights(const MaterializedDimension& dim, std::size_t column) {
  std::map<std::string, double> w;
  for (const auto& [key, devices] : dim.cells) w[key.values[column]] += static_cast<double>(devices.size());
  return w;
}

// Values of one column whose dropped (include) or kept (exclude) weight stays
// within `budget` of the total.
std::vector<std::string> pick_values(const std::map<std::string, double>& weights, double budget, bool include,
                                     std::mt19937_64& rng) {
  std::vector<std::pair<std::string, double>> order(weights.begin(), weights.end());
  std::shuffle(order.begin(), order.end(), rng);
  double total = 0;
  for (const auto& [v, w] : order) total += w;

  std::vector<std::string> chosen;  // values taken out of the full set
  double taken = 0;
  for (const auto& [v, w] : order) {
    if (chosen.size() + 1 >= order.size()) break;
    if (taken + w <= budget * total) {
      chosen.push_back(v);
      taken += w;
    }
  }
  if (include) {
    std::vector<std::string> kept;
    for (const auto& [v, w] : weights) {
      if (std::find(chosen.begin(), chosen.end(), v) == chosen.end()) kept.push_back(v);
    }
    return kept;
  }
  if (chosen.empty()) {
    // Nothing fits the budget: exclude the lightest value.
    const auto lightest = std::min_element(order.begin(), order.end(),
                                           [](const auto& a, const auto& b) { return a.second < b.second; });
    chosen.push_back(lightest->first);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

TargetingClause make_clause(const MaterializedDimensions& dims, Mode mode, std::mt19937_64& rng) {
  auto it = dims.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(rng() % dims.size()));
  const auto& dim = it->second;

  TargetingClause clause{dim.name, {}, mode};
  const std::size_t first = rng() % dim.group_by.size();
  // Include clauses sometimes filter a second column of the same dimension.
  const bool two = mode == Mode::include && dim.group_by.size() > 1 && rng() % 10 < 3;
  std::uniform_real_distribution<double> drop(0.02, 0.12);
  std::uniform_real_distribution<double> slice(0.02, 0.10);
  for (std::size_t n = 0; n < (two ? 2U : 1U); ++n) {
    const std::size_t column = (first + n) % dim.group_by.size();
    const double budget = mode == Mode::include ? drop(rng) / (two ? 2.0 : 1.0) : slice(rng);
    clause.filters[dim.group_by[column]] =
        pick_values(value_weights(dim, column), budget, mode == Mode::include, rng);
  }
  return clause;
}

}  // namespace

std::string ScenarioShape::label() const {
  if (creatives == 0) return std::to_string(placement);
  return std::to_string(placement) + "+" + std::to_string(creative_clauses) + "/" + std::to_string(creatives) + "c";
}

SyntheticWorld make_world(std::size_t devices, std::uint64_t seed) {
  if (devices == 0) throw ConfigError("synthetic world needs at least one device");
  std::mt19937_64 rng(seed);
  const auto ids = device_ids(devices, rng);

  Rows universe;
  universe.reserve(devices);
  for (const auto& id : ids) universe.push_back({id});

  Weighted year({"2011", "2012", "2013", "2014", "2015", "2016", "2017", "2018", "2019", "2020", "2021", "2022"},
                {2, 3, 4, 5, 7, 9, 11, 13, 14, 13, 11, 8});
  Weighted chipset({"KRM", "CHM", "MTK", "RTK", "AML", "NVT", ""}, {30, 25, 18, 12, 8, 6, 1});
  Weighted screen({"32", "43", "50", "55", "65", "75"}, {15, 20, 12, 25, 20, 8});
  Weighted region({"NE", "MA", "SE", "MW", "SW", "MT", "PC", "AK", "HI", "PR", "GU", "VI"},
                  {18, 14, 20, 16, 11, 6, 12, 1, 1, 0.6, 0.2, 0.2});
  Weighted genre({"news", "sports", "drama", "comedy", "kids", "reality", "docs", "movies"},
                 {16, 18, 15, 14, 8, 10, 6, 13});
  Weighted daypart({"morning", "daytime", "primetime", "latenight"}, {18, 22, 42, 18});
  Weighted app({"streaming", "music", "games", "news", "fitness", "shopping", "kids", "sports", "social", "tools"},
               {30, 14, 12, 9, 6, 7, 5, 8, 6, 3});

  Rows profile;
  Rows regions;
  Rows program;
  Rows apps;
  std::uniform_int_distribution<int> programs(1, 4);
  std::uniform_int_distribution<int> app_count(1, 3);
  for (const auto& id : ids) {
    profile.push_back({id, year(rng), chipset(rng), screen(rng)});
    regions.push_back({id, region(rng)});
    if (rng() % 100 < 96) {
      const int n = programs(rng);
      for (int i = 0; i < n; ++i) program.push_back({id, genre(rng), daypart(rng)});
    }
    if (rng() % 100 < 94) {
      const int n = app_count(rng);
      for (int i = 0; i < n; ++i) apps.push_back({id, app(rng)});
    }
  }

  SyntheticWorld world;
  world.universe = cube::make_batch({"PSID"}, universe, "PSID");
  world.dimensions.push_back(
      {"DeviceProfile", {"year", "chipset", "screen"}, cube::make_batch({"PSID", "year", "chipset", "screen"}, profile, "PSID")});
  world.dimensions.push_back({"Region", {"region"}, cube::make_batch({"PSID", "region"}, regions, "PSID")});
  world.dimensions.push_back(
      {"Program", {"genre", "daypart"}, cube::make_batch({"PSID", "genre", "daypart"}, program, "PSID")});
  world.dimensions.push_back({"AppUsage", {"app_category"}, cube::make_batch({"PSID", "app_category"}, apps, "PSID")});
  return world;
}

TargetingExpression make_scenario(const MaterializedDimensions& dims, const ScenarioShape& shape,
                                  std::mt19937_64& rng) {
  if (dims.empty()) throw ConfigError("no dimensions to draw clauses from");
  if (shape.placement == 0) throw ConfigError("scenario needs placement clauses");
  if ((shape.creatives == 0) != (shape.creative_clauses == 0) || shape.creative_clauses < shape.creatives) {
    throw ConfigError("every creative needs at least one clause");
  }

  // Exactly one clause in five excludes, at random positions.
  const std::size_t total = shape.clauses();
  std::vector<Mode> modes(total, Mode::include);
  std::fill(modes.begin(), modes.begin() + static_cast<std::ptrdiff_t>(total / 5), Mode::exclude);
  std::shuffle(modes.begin(), modes.end(), rng);

  TargetingExpression expr;
  std::size_t next = 0;
  for (std::size_t i = 0; i < shape.placement; ++i) expr.placement.push_back(make_clause(dims, modes[next++], rng));
  for (std::size_t c = 0; c < shape.creatives; ++c) {
    // Spread the creative clauses as evenly as possible.
    const std::size_t n = shape.creative_clauses / shape.creatives + (c < shape.creative_clauses % shape.creatives);
    Creative cr;
    for (std::size_t i = 0; i < n; ++i) cr.targetings.push_back(make_clause(dims, modes[next++], rng));
    expr.creatives.push_back(std::move(cr));
  }
  return expr;
}

}  // namespace reach::oracle
