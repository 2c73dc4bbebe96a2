#include "reach/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <set>

#include "reach/errors.hpp"
#include "reach/expression.hpp"

namespace reach::service {
namespace {

using nlohmann::json;

Response error(int status, std::string code, json context = json::object()) {
  context["error"] = std::move(code);
  return {status, std::move(context)};
}

json describe_cube(const cube::Hypercube& cube) {
  json columns = json::array();
  for (std::size_t c = 0; c < cube.group_by.size(); ++c) {
    std::set<std::string> distinct;
    for (const auto& cell : cube.cells) distinct.insert(cell.key.values[c]);
    json values = json::array();
    for (const auto& v : distinct) {
      if (values.size() == kMaxListedValues) break;
      values.push_back(v);
    }
    columns.push_back({{"name", cube.group_by[c]},
                       {"values", std::move(values)},
                       {"truncated", distinct.size() > kMaxListedValues}});
  }
  return {{"name", cube.dimension},
          {"groupBy", cube.group_by},
          {"columns", std::move(columns)},
          {"cellCount", cube.cells.size()},
          {"config", {{"seed", cube.config.global_seed}, {"precision", cube.config.precision}, {"bins", cube.config.bins}}}};
}

}  // namespace

std::shared_ptr<const CubeCatalog> load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("'" + dir.string() + "' is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".hcub") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  auto catalog = std::make_shared<CubeCatalog>();
  for (const auto& f : files) {
    try {
      catalog->add(cube::read_hypercube(f));
    } catch (const Error& e) {
      throw Error(f.filename().string() + ": " + e.what());
    }
  }
  return catalog;
}

ReachService::ReachService(std::shared_ptr<const CubeCatalog> catalog, std::string cors_origin)
    : catalog_(std::move(catalog)), cors_origin_(std::move(cors_origin)), started_(std::chrono::steady_clock::now()) {
  if (!catalog_) catalog_ = std::make_shared<CubeCatalog>();
}

std::shared_ptr<const CubeCatalog> ReachService::snapshot() const {
  std::lock_guard lock(mutex_);
  return catalog_;
}

void ReachService::replace_snapshot(std::shared_ptr<const CubeCatalog> catalog) {
  if (!catalog) catalog = std::make_shared<CubeCatalog>();
  std::lock_guard lock(mutex_);
  catalog_ = std::move(catalog);
}

Response ReachService::estimate(std::string_view body) const {
  const auto start = std::chrono::steady_clock::now();
  const auto catalog = snapshot();
  try {
    json document;
    try {
      document = json::parse(body);
    } catch (const json::parse_error& e) {
      return error(400, "malformed_json", {{"message", e.what()}});
    }
    const auto expr = parse_expression(document);
    auto result = eval_expression(*catalog, expr);
    result.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return {200, result.to_json()};
  } catch (const SchemaError& e) {
    return error(400, "schema_violation", {{"path", e.path()}, {"message", e.what()}});
  } catch (const ResolutionError& e) {
    if (e.kind() == ResolutionError::Kind::unknown_dimension) {
      return error(404, "unknown_dimension", {{"dimension", e.dimension()}});
    }
    return error(400, "unknown_column", {{"dimension", e.dimension()}, {"column", e.column()}});
  } catch (const EmptySelectionError& e) {
    return error(422, "empty_selection", {{"dimension", e.dimension()}, {"message", e.what()}});
  } catch (const IncompatibleSketchError& e) {
    return error(422, "incompatible_sketches", {{"message", e.what()}});
  } catch (const std::exception& e) {
    return error(500, "internal", {{"message", e.what()}});
  }
}

Response ReachService::dimensions() const {
  const auto catalog = snapshot();
  json out = json::array();
  for (const auto& [name, cube] : catalog->cubes()) out.push_back(describe_cube(cube));
  return {200, std::move(out)};
}

Response ReachService::health() const {
  const auto catalog = snapshot();
  const double uptime = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  return {200, {{"status", "ok"}, {"cubes_loaded", catalog->size()}, {"uptime_s", uptime}}};
}

void ReachService::install(httplib::Server& server) const {
  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Post("/estimate", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, estimate(req.body));
  });
  server.Get("/dimensions", [this, send](const httplib::Request&, httplib::Response& res) { send(res, dimensions()); });
  server.Get("/health", [this, send](const httplib::Request&, httplib::Response& res) { send(res, health()); });
  server.set_error_handler([send](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    send(res, error(res.status, res.status == 404 ? "not_found" : "http_" + std::to_string(res.status)));
  });
  server.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    send(res, error(500, "internal"));
  });

  if (cors_origin_.empty()) return;
  const std::string origin = cors_origin_;
  server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Vary", "Origin");
  });
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Max-Age", "600");
  });
}

}  // namespace reach::service
