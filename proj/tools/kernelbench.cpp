// Scalar versus lane-parallel signature kernel timing.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "reach/errors.hpp"
#include "reach/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Time the signature kernels on the scalar and lane-parallel paths"};
  std::size_t k = 65536;
  std::size_t iterations = 2000;
  std::uint64_t seed = 1;
  bool text = false;
  app.add_option("--k", k, "Signature length (multiple of 16)")->capture_default_str();
  app.add_option("--iterations", iterations, "Repetitions per path")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Input seed")->capture_default_str();
  app.add_flag("--text", text, "Print key=value lines instead of JSON");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto r = reach::kernels::benchmark_kernels(k, iterations, seed);
    if (text) {
      std::printf("k=%zu\niterations=%zu\nscalar_ns=%.0f\nvector_ns=%.0f\nspeedup=%.3f\nisa=%s\nidentical=%s\n", r.k,
                  r.iterations, r.scalar_ns, r.vector_ns, r.speedup, r.isa.c_str(),
                  r.outputs_identical ? "true" : "false");
    } else {
      std::cout << r.to_json() << "\n";
    }
    return r.outputs_identical ? 0 : 3;
  } catch (const reach::Error& e) {
    std::fprintf(stderr, "kernelbench: %s\n", e.what());
    return 1;
  }
}
