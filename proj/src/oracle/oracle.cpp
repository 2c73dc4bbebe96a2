#include "reach/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <set>
#include <unordered_map>

#include "reach/errors.hpp"

namespace reach::oracle {
namespace {

using Devices = std::vector<std::string>;

Devices sorted_unique(Devices v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

Devices set_union(const Devices& a, const Devices& b) {
  Devices out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Devices set_intersection(const Devices& a, const Devices& b) {
  Devices out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Devices set_difference(const Devices& a, const Devices& b) {
  Devices out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

const MaterializedDimension& find_dimension(const MaterializedDimensions& dims, const std::string& name) {
  const auto it = dims.find(name);
  if (it == dims.end()) throw ResolutionError(ResolutionError::Kind::unknown_dimension, name);
  return it->second;
}

// Column positions of the clause's filters, validated.
std::vector<std::pair<std::size_t, const std::vector<std::string>*>> filter_positions(
    const MaterializedDimension& dim, const TargetingClause& clause) {
  std::vector<std::pair<std::size_t, const std::vector<std::string>*>> out;
  for (const auto& [column, values] : clause.filters) {
    const auto it = std::find(dim.group_by.begin(), dim.group_by.end(), column);
    if (it == dim.group_by.end()) throw ResolutionError(ResolutionError::Kind::unknown_column, dim.name, column);
    out.emplace_back(static_cast<std::size_t>(it - dim.group_by.begin()), &values);
  }
  return out;
}

bool key_matches(const cube::CellKey& key,
                 const std::vector<std::pair<std::size_t, const std::vector<std::string>*>>& filters) {
  for (const auto& [pos, values] : filters) {
    if (std::find(values->begin(), values->end(), key.values[pos]) == values->end()) return false;
  }
  return true;
}

Devices intersect_all(const MaterializedDimensions& dims, const std::vector<TargetingClause>& clauses) {
  Devices acc = clause_devices(dims, clauses.front());
  for (std::size_t i = 1; i < clauses.size(); ++i) acc = set_intersection(acc, clause_devices(dims, clauses[i]));
  return acc;
}

}  // namespace

MaterializedDimension materialize(const cube::RecordBatch& records, std::span<const std::string> group_by,
                                  std::string name, const cube::RecordBatch& universe) {
  MaterializedDimension dim;
  dim.name = std::move(name);
  dim.group_by.assign(group_by.begin(), group_by.end());
  std::vector<const std::vector<std::string>*> cols;
  for (const auto& c : group_by) cols.push_back(&records.column(c));
  const auto& psids = records.psids();
  for (std::size_t r = 0; r < records.row_count; ++r) {
    cube::CellKey key;
    for (const auto* col : cols) {
      const auto& v = (*col)[r];
      key.values.push_back(v.empty() ? std::string(cube::kEmptyAttribute) : v);
    }
    dim.cells[std::move(key)].push_back(psids[r]);
  }
  for (auto& [key, devices] : dim.cells) devices = sorted_unique(std::move(devices));
  dim.universe = sorted_unique(universe.psids());
  return dim;
}

std::vector<std::string> clause_devices(const MaterializedDimensions& dims, const TargetingClause& clause) {
  const auto& dim = find_dimension(dims, clause.dimension);
  const auto filters = filter_positions(dim, clause);
  Devices selected;
  bool any = false;
  for (const auto& [key, devices] : dim.cells) {
    if (!key_matches(key, filters)) continue;
    any = true;
    selected.insert(selected.end(), devices.begin(), devices.end());
  }
  if (!any) throw EmptySelectionError(clause.dimension);
  selected = sorted_unique(std::move(selected));
  if (clause.mode == Mode::include) return selected;
  return set_difference(dim.universe, selected);
}

std::uint64_t oracle_reach(const MaterializedDimensions& dims, const TargetingExpression& expr) {
  if (expr.placement.empty()) throw ContractError("placement needs at least one targeting");
  Devices reach = intersect_all(dims, expr.placement);
  if (!expr.creatives.empty()) {
    Devices creative_level;
    for (const auto& cr : expr.creatives) {
      if (cr.targetings.empty()) throw ContractError("creative needs at least one targeting");
      creative_level = set_union(creative_level, intersect_all(dims, cr.targetings));
    }
    reach = set_intersection(reach, creative_level);
  }
  return reach.size();
}

std::uint64_t oracle_reach_per_device(const MaterializedDimensions& dims, const TargetingExpression& expr) {
  if (expr.placement.empty()) throw ContractError("placement needs at least one targeting");

  // Per dimension: device -> the cell keys it appears under, and universe
  // membership. Every device that could satisfy anything is a candidate.
  struct DeviceFacts {
    std::unordered_map<std::string, std::vector<const cube::CellKey*>> keys;
    std::set<std::string, std::less<>> universe;
  };
  std::map<std::string, DeviceFacts, std::less<>> facts;
  std::set<std::string> candidates;
  auto touch = [&](const TargetingClause& c) {
    const auto& dim = find_dimension(dims, c.dimension);
    (void)filter_positions(dim, c);
    if (facts.count(dim.name) != 0) return;
    auto& f = facts[dim.name];
    for (const auto& [key, devices] : dim.cells) {
      for (const auto& d : devices) {
        f.keys[d].push_back(&key);
        candidates.insert(d);
      }
    }
    for (const auto& d : dim.universe) {
      f.universe.insert(d);
      candidates.insert(d);
    }
  };
  for (const auto& c : expr.placement) touch(c);
  for (const auto& cr : expr.creatives) {
    if (cr.targetings.empty()) throw ContractError("creative needs at least one targeting");
    for (const auto& c : cr.targetings) touch(c);
  }

  // Empty selections are checked against cell keys, independently of devices.
  auto check_selection = [&](const TargetingClause& c) {
    const auto& dim = find_dimension(dims, c.dimension);
    const auto filters = filter_positions(dim, c);
    const bool any = std::any_of(dim.cells.begin(), dim.cells.end(),
                                 [&](const auto& cell) { return key_matches(cell.first, filters); });
    if (!any) throw EmptySelectionError(c.dimension);
  };
  for (const auto& c : expr.placement) check_selection(c);
  for (const auto& cr : expr.creatives) {
    for (const auto& c : cr.targetings) check_selection(c);
  }

  auto satisfies = [&](const std::string& device, const TargetingClause& c) {
    const auto& dim = find_dimension(dims, c.dimension);
    const auto filters = filter_positions(dim, c);
    const auto& f = facts.at(c.dimension);
    bool in_selection = false;
    if (const auto it = f.keys.find(device); it != f.keys.end()) {
      for (const auto* key : it->second) in_selection = in_selection || key_matches(*key, filters);
    }
    if (c.mode == Mode::include) return in_selection;
    return !in_selection && f.universe.count(device) != 0;
  };
  auto all_of = [&](const std::string& device, const std::vector<TargetingClause>& clauses) {
    return std::all_of(clauses.begin(), clauses.end(), [&](const auto& c) { return satisfies(device, c); });
  };

  std::uint64_t count = 0;
  for (const auto& device : candidates) {
    if (!all_of(device, expr.placement)) continue;
    if (!expr.creatives.empty() &&
        std::none_of(expr.creatives.begin(), expr.creatives.end(),
                     [&](const Creative& cr) { return all_of(device, cr.targetings); })) {
      continue;
    }
    ++count;
  }
  return count;
}

double relative_error(std::uint64_t true_value, double observed) {
  if (true_value == 0) throw ContractError("relative error is undefined for a true value of 0");
  const double t = static_cast<double>(true_value);
  return std::abs(t - observed) / t * 100.0;
}

}  // namespace reach::oracle
