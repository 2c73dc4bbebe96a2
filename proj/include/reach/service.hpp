#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <json.hpp>

#include "reach/query.hpp"

namespace httplib {
class Server;
}

namespace reach::service {

// Per-column listing cap for GET /dimensions.
inline constexpr std::size_t kMaxListedValues = 1000;

struct Response {
  int status = 200;
  nlohmann::json body;
};

// Loads every *.hcub file of a directory (sorted by file name). Throws on the
// first unreadable file, naming it.
[[nodiscard]] std::shared_ptr<const CubeCatalog> load_directory(const std::filesystem::path& dir);

// Request handlers over an immutable catalog snapshot. A request keeps the
// snapshot it started with even if another is installed meanwhile.
class ReachService {
 public:
  explicit ReachService(std::shared_ptr<const CubeCatalog> catalog, std::string cors_origin = {});

  // POST /estimate. 400 malformed_json / schema_violation / unknown_column,
  // 404 unknown_dimension, 422 empty_selection / incompatible_sketches,
  // 500 internal.
  [[nodiscard]] Response estimate(std::string_view body) const;
  // GET /dimensions: sorted listing of cubes, columns and distinct values.
  [[nodiscard]] Response dimensions() const;
  // GET /health
  [[nodiscard]] Response health() const;

  [[nodiscard]] std::shared_ptr<const CubeCatalog> snapshot() const;
  void replace_snapshot(std::shared_ptr<const CubeCatalog> catalog);

  // Registers the routes (and CORS handling when an origin is configured).
  void install(httplib::Server& server) const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const CubeCatalog> catalog_;
  std::string cors_origin_;
  std::chrono::steady_clock::time_point started_;
};

}  // namespace reach::service
