// HTTP reach service over a directory of hypercube files.
#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <cstdio>

#include "reach/errors.hpp"
#include "reach/service.hpp"

namespace {

httplib::Server* g_server = nullptr;

void stop(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serve real-time reach estimates from hypercube files"};
  std::string cubes;
  int port = 8080;
  std::string bind = "127.0.0.1";
  std::string cors_origin;
  int threads = 8;
  app.add_option("--cubes", cubes, "Directory of .hcub files")->required()->check(CLI::ExistingDirectory);
  app.add_option("--port", port, "Listen port")->check(CLI::Range(0, 65535));
  app.add_option("--bind", bind, "Listen address");
  app.add_option("--cors-origin", cors_origin, "Origin allowed to call the service from a browser");
  app.add_option("--threads", threads, "Request worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::shared_ptr<const reach::CubeCatalog> catalog;
  try {
    catalog = reach::service::load_directory(cubes);
  } catch (const reach::Error& e) {
    std::fprintf(stderr, "reachd: %s\n", e.what());
    return 1;
  }
  for (const auto& [name, cube] : catalog->cubes()) {
    std::fprintf(stderr, "loaded %s: %zu cells, %s\n", name.c_str(), cube.cells.size(), cube.config.describe().c_str());
  }

  reach::service::ReachService service(catalog, cors_origin);
  httplib::Server server;
  server.new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<std::size_t>(threads)); };
  server.set_payload_max_length(1U << 20);
  service.install(server);

  g_server = &server;
  std::signal(SIGINT, stop);
  std::signal(SIGTERM, stop);
  // Port 0 picks a free port; the chosen one is printed below.
  if (port == 0) {
    port = server.bind_to_any_port(bind);
  } else if (!server.bind_to_port(bind, port)) {
    port = -1;
  }
  if (port < 0) {
    std::fprintf(stderr, "reachd: cannot bind %s\n", bind.c_str());
    return 1;
  }
  std::fprintf(stderr, "listening on %s:%d with %zu cubes\n", bind.c_str(), port, catalog->size());
  server.listen_after_bind();
  return 0;
}
