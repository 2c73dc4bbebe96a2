// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion ids
// (A1 ... A7) as arguments to run a subset.
#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "reach/accuracy.hpp"
#include "reach/errors.hpp"
#include "reach/hash.hpp"
#include "reach/hll.hpp"
#include "reach/hypercube.hpp"
#include "reach/kernels.hpp"
#include "reach/minhash.hpp"
#include "reach/oracle.hpp"
#include "reach/serialize.hpp"
#include "reach/service.hpp"
#include "reach/synthetic.hpp"
#include "test_support.hpp"

using namespace reach;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::max<std::size_t>(rank, 1) - 1];
}

// mix64 is a bijection, so consecutive inputs give distinct items.
std::uint64_t item(std::uint64_t stream, std::uint64_t i) { return mix64((stream << 32) + i); }

// ---------------------------------------------------------------------------

Outcome a1_hll_accuracy() {
  const HashConfig config{0, 14, 16};
  std::string detail;
  bool pass = true;
  for (const std::uint64_t n : {1000ULL, 100000ULL, 1000000ULL}) {
    std::vector<double> errors;
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
      HllSketch h(config);
      const std::uint64_t stream = n * 100 + trial;
      for (std::uint64_t i = 0; i < n; ++i) h.insert(item(stream, i));
      errors.push_back(std::abs(h.estimate() - static_cast<double>(n)) / static_cast<double>(n) * 100.0);
    }
    const double med = median(errors);
    pass = pass && med <= 2.0;
    detail += fmt("n=%llu median %.3f%% max %.3f%%; ", static_cast<unsigned long long>(n), med,
                  *std::max_element(errors.begin(), errors.end()));
  }
  return {pass, detail + "bound 2%"};
}

Outcome a2_minhash_bound() {
  const HashConfig config{0, 4, 4096};
  const double k = config.bins;
  std::mt19937_64 rng(2);
  std::size_t within_total = 0;
  std::size_t trials = 0;
  std::string detail;
  for (const double j : {0.1, 0.33, 0.5, 0.9}) {
    std::size_t within = 0;
    for (int t = 0; t < 100; ++t) {
      const auto pair = testing::planted_pair(10000, j, rng);
      MinHashSignature a(config);
      MinHashSignature b(config);
      a.insert(pair.a);
      b.insert(pair.b);
      const double est = jaccard_ratio(mh_intersect(mh_to_intermediate(a), b)).value;
      const double bound = 3.0 * std::sqrt(pair.exact * (1.0 - pair.exact) / k);
      within += std::abs(est - pair.exact) <= bound ? 1 : 0;
    }
    within_total += within;
    trials += 100;
    detail += fmt("J=%.2f %zu/100; ", j, within);
  }
  const double rate = static_cast<double>(within_total) / static_cast<double>(trials);
  return {rate >= 0.99, detail + fmt("overall %.2f%% within 3 sigma (need >= 99%%)", rate * 100.0)};
}

Outcome a3_end_to_end() {
  // Reference rows: (true, predicted) -> error percent, rounded as reported.
  struct Row {
    std::uint64_t truth;
    double predicted;
    double printed;
    double scale;
  };
  bool formula_ok = true;
  for (const Row& r : {Row{5803033, 5809483, 0.111, 1000}, Row{6650830, 6389770, 3.925, 1000},
                       Row{16850470, 17221260, 2.2, 10}}) {
    const double e = std::round(oracle::relative_error(r.truth, r.predicted) * r.scale) / r.scale;
    formula_ok = formula_ok && std::abs(e - r.printed) < 1e-9;
  }

  oracle::AccuracyOptions opt;
  opt.devices = 100000;
  opt.scenarios = 50;
  opt.seed = 1;
  opt.config = HashConfig{0, 14, 4096};
  const auto report = oracle::run_accuracy_suite(opt);
  std::size_t absolute = 0;
  for (const auto& s : report.scenarios) absolute += s.absolute_rule ? 1 : 0;
  const bool pass = formula_ok && report.pass_rate() >= 0.9;
  return {pass, fmt("%zu/%zu scenarios within budget (%zu judged on absolute error), max %.3f%%, p90 %.3f%%, "
                    "reference error rows %s",
                    report.pass_count, report.scenarios.size(), absolute, report.max_error, report.p90_error,
                    formula_ok ? "reproduced" : "NOT reproduced")};
}

Outcome a4_algebra() {
  const HashConfig config{9, 14, 4096};
  std::mt19937_64 rng(4);
  std::size_t order_cases = 0;
  std::size_t order_failures = 0;
  std::size_t nontrivial = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t ops = 2 + trial % 3;
    std::vector<MinHashSignature> sigs;
    for (std::size_t o = 0; o < ops; ++o) {
      // Subsets of one 1000-element pool so the intersections are non-empty.
      MinHashSignature s(config);
      const auto keep = 70 + rng() % 28;
      for (std::uint64_t i = 0; i < 1000; ++i) {
        if (rng() % 100 < keep) s.insert(item(7000 + trial, i));
      }
      sigs.push_back(std::move(s));
    }
    std::vector<std::size_t> order(ops);
    std::iota(order.begin(), order.end(), 0);
    std::optional<IntermediateSignature> reference;
    do {
      auto acc = mh_to_intermediate(sigs[order[0]]);
      for (std::size_t i = 1; i < ops; ++i) acc = mh_intersect(std::move(acc), sigs[order[i]]);
      ++order_cases;
      if (!reference) {
        reference = acc;
        nontrivial += acc.valid_count() > 0 && acc.valid_count() < config.bins ? 1 : 0;
      } else if (!(acc == *reference)) {
        ++order_failures;
      }
    } while (std::next_permutation(order.begin(), order.end()));
  }

  std::size_t union_failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    MinHashSignature a(config);
    MinHashSignature b(config);
    MinHashSignature both(config);
    const std::size_t na = rng() % 1001;
    const std::size_t nb = rng() % 1001;
    for (std::size_t i = 0; i < na; ++i) {
      a.insert(item(90000 + trial, i));
      both.insert(item(90000 + trial, i));
    }
    // B overlaps A on a random prefix.
    const std::size_t shift = rng() % (na + 1);
    for (std::size_t i = 0; i < nb; ++i) {
      b.insert(item(90000 + trial, shift + i));
      both.insert(item(90000 + trial, shift + i));
    }
    union_failures += mh_merge_union(a, b) == both ? 0 : 1;
  }

  const auto world = oracle::make_world(5000, 44);
  std::size_t cells = 0;
  std::size_t partition_failures = 0;
  const auto universe = cube::device_hashes(world.universe);
  for (const auto& d : world.dimensions) {
    const auto cube = cube::build_exclude(cube::build_cells(d.records, d.group_by, config, d.name), universe);
    for (const auto& cell : cube.cells) {
      ++cells;
      const bool ok = mh_merge_union(cell.minhash, cell.exminhash) == cube.universe_minhash &&
                      hll_merge(cell.hll, cell.exhll) == cube.universe_hll;
      partition_failures += ok ? 0 : 1;
    }
  }

  const bool pass = order_failures == 0 && nontrivial > 0 && union_failures == 0 && partition_failures == 0 &&
                    cells > 0;
  return {pass, fmt("order invariance %zu/%zu permutations agree (%zu/60 trials with partial masks); "
                    "merge_union == sig(A u B) in %zu/200; partition identity on %zu/%zu cells",
                    order_cases - order_failures, order_cases, nontrivial, 200 - union_failures,
                    cells - partition_failures, cells)};
}

// Every kernel on one lane table against the scalar reference.
std::size_t fuzz_table(const kernels::detail::KernelTable& t, std::size_t cases, std::mt19937_64& rng) {
  const auto& ref = kernels::detail::scalar_table();
  auto values = [&](std::size_t n) {
    std::vector<std::uint32_t> v(n);
    for (auto& x : v) {
      const auto r = rng() % 4;
      x = r == 0 ? kEmptyBin : r == 1 ? static_cast<std::uint32_t>(rng() % 3) : static_cast<std::uint32_t>(rng());
    }
    return v;
  };
  auto mask = [&](std::size_t n) {
    std::vector<std::uint64_t> m(kernels::mask_words(n));
    for (auto& w : m) w = rng();
    if (n % 64 != 0) m.back() &= (std::uint64_t{1} << (n % 64)) - 1;
    return m;
  };
  auto canonical = [](std::vector<std::uint32_t> v, const std::vector<std::uint64_t>& m) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (((m[i / 64] >> (i % 64)) & 1U) == 0) v[i] = 0;
    }
    return v;
  };

  std::size_t mismatches = 0;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = 16 * (1 + rng() % 32);
    const std::size_t w = kernels::mask_words(n);
    const auto a = values(n);
    auto b = values(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() % 3 == 0) b[i] = a[i];
    }
    bool same = true;

    std::vector<std::uint64_t> m1(w);
    std::vector<std::uint64_t> m2(w);
    ref.equal_mask(a.data(), b.data(), m1.data(), n);
    t.equal_mask(a.data(), b.data(), m2.data(), n);
    same = same && m1 == m2 && ref.popcount(m1.data(), w) == t.popcount(m1.data(), w);

    std::vector<std::uint32_t> o1(n);
    std::vector<std::uint32_t> o2(n);
    ref.min(a.data(), b.data(), o1.data(), n);
    t.min(a.data(), b.data(), o2.data(), n);
    same = same && o1 == o2;

    std::vector<std::uint8_t> r1(n);
    std::vector<std::uint8_t> rb(n);
    for (std::size_t i = 0; i < n; ++i) {
      r1[i] = static_cast<std::uint8_t>(rng());
      rb[i] = static_cast<std::uint8_t>(rng());
    }
    auto r2 = r1;
    ref.max_u8(r1.data(), rb.data(), n);
    t.max_u8(r2.data(), rb.data(), n);
    same = same && r1 == r2;

    std::vector<std::uint64_t> seeds(n);
    for (auto& s : seeds) s = rng();
    const std::uint64_t x = rng();
    ref.hash_bins(o1.data(), seeds.data(), x, n);
    t.hash_bins(o2.data(), seeds.data(), x, n);
    same = same && o1 == o2;
    o1 = a;
    o2 = a;
    ref.hash_min_update(o1.data(), seeds.data(), x, n);
    t.hash_min_update(o2.data(), seeds.data(), x, n);
    same = same && o1 == o2;

    ref.lift(a.data(), o1.data(), m1.data(), n);
    t.lift(a.data(), o2.data(), m2.data(), n);
    same = same && o1 == o2 && m1 == m2;

    const auto acc_mask = mask(n);
    const auto acc_vals = canonical(a, acc_mask);
    const auto other_mask = mask(n);
    const auto other_vals = canonical(b, other_mask);
    using Step = std::function<void(const kernels::detail::KernelTable&, std::uint32_t*, std::uint64_t*)>;
    const Step steps[] = {
        [&](const auto& k, std::uint32_t* v, std::uint64_t* m) { k.intersect_sig(v, m, b.data(), n); },
        [&](const auto& k, std::uint32_t* v, std::uint64_t* m) {
          k.intersect_inter(v, m, other_vals.data(), other_mask.data(), n);
        },
        [&](const auto& k, std::uint32_t* v, std::uint64_t* m) {
          k.unite_inter(v, m, other_vals.data(), other_mask.data(), n);
        },
    };
    for (const auto& step : steps) {
      auto v1 = acc_vals;
      auto v2 = acc_vals;
      auto k1 = acc_mask;
      auto k2 = acc_mask;
      step(ref, v1.data(), k1.data());
      step(t, v2.data(), k2.data());
      same = same && v1 == v2 && k1 == k2;
    }
    mismatches += same ? 0 : 1;
  }
  return mismatches;
}

Outcome a5_kernels() {
  std::vector<const kernels::detail::KernelTable*> tables;
  if (kernels::detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2")) {
    tables.push_back(kernels::detail::avx2_table());
  }
  if (kernels::detail::avx512_table() != nullptr && __builtin_cpu_supports("avx512f") &&
      __builtin_cpu_supports("avx512bw") && __builtin_cpu_supports("avx512dq") && __builtin_cpu_supports("avx512vl")) {
    tables.push_back(kernels::detail::avx512_table());
  }
  if (tables.empty()) {
    return {false, "no lane-parallel instruction set on this host; equivalence and speedup cannot be measured"};
  }
  std::mt19937_64 rng(5);
  std::string detail;
  bool pass = true;
  for (const auto* t : tables) {
    const std::size_t bad = fuzz_table(*t, 10000, rng);
    pass = pass && bad == 0;
    detail += fmt("%s: %zu/10000 fuzz cases identical; ", std::string(t->isa).c_str(), 10000 - bad);
  }
  const auto bench = kernels::benchmark_kernels(65536, 2000, 1);
  pass = pass && bench.outputs_identical && bench.speedup >= 2.0;
  return {pass, detail + fmt("speedup %.2fx at k=65536 on %s (need >= 2.0x)", bench.speedup, bench.isa.c_str())};
}

Outcome a6_latency() {
  // 50 x 50 x 40 = 100,000 cells, two devices per cell. Sketch sizes are
  // reduced (p=10, k=256) so the cube fits in desk memory.
  const HashConfig config{6, 10, 256};
  const std::size_t na = 50;
  const std::size_t nb = 50;
  const std::size_t nc = 40;
  const std::size_t cells = na * nb * nc;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::vector<std::string>> uni;
  rows.reserve(cells * 2);
  for (std::size_t d = 0; d < cells * 2; ++d) {
    const std::size_t cell = d % cells;
    const std::string psid = "tv" + std::to_string(d);
    rows.push_back({psid, "a" + std::to_string(cell / (nb * nc)), "b" + std::to_string(cell / nc % nb),
                    "c" + std::to_string(cell % nc)});
    uni.push_back({psid});
  }
  const std::vector<std::string> group{"a", "b", "c"};
  const auto batch = cube::make_batch({"PSID", "a", "b", "c"}, rows, "PSID");
  const auto ubatch = cube::make_batch({"PSID"}, uni, "PSID");
  rows.clear();
  uni.clear();
  auto catalog = std::make_shared<CubeCatalog>();
  catalog->add(cube::build_exclude(cube::build_cells(batch, group, config, "Audience"), ubatch));
  const std::size_t built_cells = catalog->find("Audience")->cells.size();

  service::ReachService svc(catalog);
  httplib::Server server;
  svc.install(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  if (port <= 0) return {false, "could not bind a local port"};
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(30, 0);

  std::mt19937_64 rng(6);
  auto pick = [&](const char* prefix, std::size_t range, std::size_t count) {
    std::vector<std::string> v;
    while (v.size() < count) {
      auto s = prefix + std::to_string(rng() % range);
      if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(std::move(s));
    }
    return v;
  };
  auto make_clause = [&](bool exclude) {
    TargetingClause c{"Audience", {}, exclude ? Mode::exclude : Mode::include};
    const int which = static_cast<int>(rng() % 3);
    const std::size_t width = 1 + rng() % 8;
    if (which == 0) c.filters["a"] = pick("a", na, width);
    if (which == 1) c.filters["b"] = pick("b", nb, width);
    if (which == 2) c.filters["c"] = pick("c", nc, width);
    if (rng() % 3 == 0) c.filters["c"] = pick("c", nc, 1 + rng() % 20);
    return c;
  };

  std::vector<double> latencies;
  std::size_t failures = 0;
  for (int r = 0; r < 100; ++r) {
    TargetingExpression expr;
    for (int i = 0; i < 10; ++i) expr.placement.push_back(make_clause(i % 5 == 4));
    for (int cr = 0; cr < 4; ++cr) {
      Creative c;
      for (int i = 0; i < 5; ++i) c.targetings.push_back(make_clause(i == 4));
      expr.creatives.push_back(std::move(c));
    }
    const auto body = to_json(expr).dump();
    const auto start = std::chrono::steady_clock::now();
    const auto res = client.Post("/estimate", body, "application/json");
    latencies.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    if (!res || res->status != 200) ++failures;
  }
  server.stop();
  worker.join();

  const double p95 = percentile(latencies, 0.95);
  return {failures == 0 && p95 < 1000.0 && built_cells == cells,
          fmt("%zu cells, 100 sequential 30-clause requests: p50 %.1f ms, p95 %.1f ms, max %.1f ms, %zu non-200 "
              "(need p95 < 1000 ms)",
              built_cells, percentile(latencies, 0.5), p95, *std::max_element(latencies.begin(), latencies.end()),
              failures)};
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome a7_determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "reach_acceptance_a7";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto world = oracle::make_world(20000, 77);
  std::ofstream(dir / "profile.csv") << cube::format_records(world.dimensions[0].records);
  std::ofstream(dir / "universe.csv") << cube::format_records(world.universe);

  auto run = [&](const std::string& out) {
    const std::string cmd = std::string("\"") + REACH_CUBEBUILD_PATH + "\" --input \"" + (dir / "profile.csv").string() +
                            "\" --psid-col PSID --group-by year,chipset,screen --universe \"" +
                            (dir / "universe.csv").string() + "\" --out \"" + (dir / out).string() +
                            "\" --precision 12 --bins 1024 --seed 42 --keep-exact-counts 2>/dev/null";
    return std::system(cmd.c_str());
  };
  const int rc1 = run("first.hcub");
  const int rc2 = run("second.hcub");
  if (rc1 != 0 || rc2 != 0) return {false, fmt("cubebuild exited with %d / %d", rc1, rc2)};
  const auto first = slurp(dir / "first.hcub");
  const auto second = slurp(dir / "second.hcub");
  const bool identical = !first.empty() && first == second;
  const auto decoded = cube::decode_hypercube(first);
  const bool cube_round_trip = cube::encode_hypercube(decoded) == first;

  std::mt19937_64 rng(7);
  std::size_t sketch_ok = 0;
  const int sketches = 300;
  for (int i = 0; i < sketches; ++i) {
    const HashConfig config{rng(), static_cast<int>(4 + rng() % 15), static_cast<std::uint32_t>(16 * (1 + rng() % 64))};
    HllSketch h(config);
    MinHashSignature m(config);
    const std::size_t n = rng() % 3000;
    for (std::size_t j = 0; j < n; ++j) {
      const auto x = rng();
      h.insert(x);
      m.insert(x);
    }
    MinHashSignature m2(config);
    for (std::size_t j = 0; j < n / 2; ++j) m2.insert(rng());
    const auto inter = inter_union(mh_intersect(mh_to_intermediate(m), m2), mh_to_intermediate(m2));
    const AnySketch all[] = {h, m, inter};
    bool ok = true;
    for (const auto& s : all) {
      const auto bytes = serialize_sketch(s);
      ok = ok && deserialize_sketch(bytes) == s && serialize_sketch(deserialize_sketch(bytes)) == bytes;
    }
    sketch_ok += ok ? 1 : 0;
  }
  std::filesystem::remove_all(dir);
  return {identical && cube_round_trip && sketch_ok == static_cast<std::size_t>(sketches),
          fmt("two cubebuild runs %s (%zu bytes); hypercube decode/encode %s; %zu/%d sketch triples round-trip",
              identical ? "byte-identical" : "DIFFER", first.size(), cube_round_trip ? "identity" : "NOT identity",
              sketch_ok, sketches)};
}

struct Criterion {
  const char* id;
  const char* title;
  double limit_s;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion criteria[] = {
      {"A1", "HLL accuracy", 60, a1_hll_accuracy},
      {"A2", "MinHash statistical bound", 120, a2_minhash_bound},
      {"A3", "End-to-end accuracy", 300, a3_end_to_end},
      {"A4", "Multilevel algebra exactness", 60, a4_algebra},
      {"A5", "Kernel equivalence and speedup", 120, a5_kernels},
      {"A6", "Estimate latency", 180, a6_latency},
      {"A7", "Determinism", 60, a7_determinism},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    std::printf("%s %s %s (%.1f s, limit %.0f s%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.title, secs, c.limit_s,
                in_time ? "" : ", EXCEEDED", o.detail.c_str());
    std::fflush(stdout);
    failed += pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
