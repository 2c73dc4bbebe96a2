#include "reach/expression.hpp"

#include <initializer_list>

#include "reach/errors.hpp"

namespace reach {
namespace {

using nlohmann::json;

std::string child(const std::string& path, std::string_view key) { return path + "/" + std::string(key); }
std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

// Unknown members are rejected so that a misspelt key fails loudly instead of
// being ignored.
void only_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const auto a : allowed) known = known || key == a;
    if (!known) throw SchemaError(child(path, key), "unexpected member");
  }
}

const json& require(const json& obj, std::string_view key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(child(path, key), "required member is missing");
  return *it;
}

void expect_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw SchemaError(path, "expected an object");
}

void expect_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array");
}

TargetingClause parse_clause(const json& v, const std::string& path) {
  expect_object(v, path);
  only_keys(v, path, {"dimension", "filters", "mode"});
  TargetingClause clause;

  const auto& dim = require(v, "dimension", path);
  if (!dim.is_string() || dim.get_ref<const std::string&>().empty()) {
    throw SchemaError(child(path, "dimension"), "expected a non-empty string");
  }
  clause.dimension = dim.get<std::string>();

  const auto& mode = require(v, "mode", path);
  if (!mode.is_string()) throw SchemaError(child(path, "mode"), "expected \"include\" or \"exclude\"");
  const auto& m = mode.get_ref<const std::string&>();
  if (m == "include") {
    clause.mode = Mode::include;
  } else if (m == "exclude") {
    clause.mode = Mode::exclude;
  } else {
    throw SchemaError(child(path, "mode"), "unknown mode \"" + m + "\" (expected \"include\" or \"exclude\")");
  }

  const std::string fpath = child(path, "filters");
  const auto& filters = require(v, "filters", path);
  expect_object(filters, fpath);
  if (filters.empty()) throw SchemaError(fpath, "at least one filter is required");
  for (const auto& [column, values] : filters.items()) {
    const std::string cpath = child(fpath, column);
    expect_array(values, cpath);
    if (values.empty()) throw SchemaError(cpath, "at least one value is required");
    auto& out = clause.filters[column];
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!values[i].is_string()) throw SchemaError(child(cpath, i), "expected a string");
      out.push_back(values[i].get<std::string>());
    }
  }
  return clause;
}

std::vector<TargetingClause> parse_targetings(const json& parent, const std::string& path) {
  const std::string tpath = child(path, "targetings");
  const auto& list = require(parent, "targetings", path);
  expect_array(list, tpath);
  if (list.empty()) throw SchemaError(tpath, "at least one targeting is required");
  std::vector<TargetingClause> out;
  out.reserve(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) out.push_back(parse_clause(list[i], child(tpath, i)));
  return out;
}

}  // namespace

std::string_view to_string(Mode mode) noexcept { return mode == Mode::include ? "include" : "exclude"; }

std::size_t TargetingExpression::clause_count() const noexcept {
  std::size_t n = placement.size();
  for (const auto& c : creatives) n += c.targetings.size();
  return n;
}

TargetingExpression parse_expression(const json& document) {
  expect_object(document, "");
  only_keys(document, "", {"placement", "creatives"});
  TargetingExpression expr;

  const auto& placement = require(document, "placement", "");
  expect_object(placement, "/placement");
  only_keys(placement, "/placement", {"targetings", "creatives"});
  expr.placement = parse_targetings(placement, "/placement");

  // Creatives nest under the placement in the canonical form; a top-level
  // list is accepted too, but not both.
  const bool nested = placement.contains("creatives");
  const bool top = document.contains("creatives");
  if (nested && top) throw SchemaError("/creatives", "creatives given both at top level and under placement");
  if (nested || top) {
    const std::string path = nested ? "/placement/creatives" : "/creatives";
    const auto& list = nested ? placement["creatives"] : document["creatives"];
    expect_array(list, path);
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string cpath = child(path, i);
      expect_object(list[i], cpath);
      only_keys(list[i], cpath, {"targetings"});
      expr.creatives.push_back(Creative{parse_targetings(list[i], cpath)});
    }
  }
  return expr;
}

TargetingExpression parse_expression(std::string_view text) { return parse_expression(json::parse(text)); }

json to_json(const TargetingClause& clause) {
  json filters = json::object();
  for (const auto& [column, values] : clause.filters) filters[column] = values;
  return json{{"dimension", clause.dimension}, {"filters", filters}, {"mode", std::string(to_string(clause.mode))}};
}

json to_json(const TargetingExpression& expr) {
  json targetings = json::array();
  for (const auto& c : expr.placement) targetings.push_back(to_json(c));
  json creatives = json::array();
  for (const auto& cr : expr.creatives) {
    json ts = json::array();
    for (const auto& c : cr.targetings) ts.push_back(to_json(c));
    creatives.push_back(json{{"targetings", ts}});
  }
  return json{{"placement", {{"targetings", targetings}, {"creatives", creatives}}}};
}

}  // namespace reach
