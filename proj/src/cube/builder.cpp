#include <algorithm>
#include <map>
#include <unordered_map>

#include "reach/errors.hpp"
#include "reach/hash.hpp"
#include "reach/hypercube.hpp"
#include "reach/kernels.hpp"

namespace reach::cube {
namespace {

// Candidates kept per MinHash bin for the complement search. A cell only
// falls back to a complement scan for a bin when it contains all of them.
constexpr std::size_t kCandidatesPerBin = 64;

// (value << 32 | device index), ordered by value first.
using Candidate = std::uint64_t;

constexpr Candidate make_candidate(std::uint32_t value, std::uint32_t device) noexcept {
  return (static_cast<std::uint64_t>(value) << 32) | device;
}
constexpr std::uint32_t candidate_value(Candidate c) noexcept { return static_cast<std::uint32_t>(c >> 32); }
constexpr std::uint32_t candidate_device(Candidate c) noexcept { return static_cast<std::uint32_t>(c); }

// Universe-side state shared read-only by every cell's complement.
struct UniverseIndex {
  std::vector<std::uint64_t> items;  // sorted device hashes
  std::unordered_map<std::uint64_t, std::uint32_t> position;
  // HLL: devices bucketed per register, highest rank first.
  std::vector<std::uint32_t> register_offsets;
  std::vector<std::uint32_t> register_devices;
  std::vector<std::uint8_t> device_rank;
  // MinHash: per bin, the smallest candidates in ascending order.
  std::size_t per_bin = 0;
  std::vector<Candidate> candidates;  // bins x per_bin
};

UniverseIndex index_universe(std::span<const std::uint64_t> universe, const HashConfig& config, HllSketch& uni_hll,
                             MinHashSignature& uni_mh) {
  UniverseIndex idx;
  idx.items.assign(universe.begin(), universe.end());
  std::sort(idx.items.begin(), idx.items.end());
  idx.items.erase(std::unique(idx.items.begin(), idx.items.end()), idx.items.end());
  const auto n = static_cast<std::uint32_t>(idx.items.size());
  idx.position.reserve(n * 2);

  const std::uint32_t m = config.registers();
  const std::uint32_t k = config.bins;
  std::vector<std::uint32_t> device_register(n);
  idx.device_rank.resize(n);
  std::vector<std::uint32_t> counts(m + 1, 0);

  idx.per_bin = std::min<std::size_t>(kCandidatesPerBin, n);
  idx.candidates.assign(static_cast<std::size_t>(k) * idx.per_bin, 0);
  std::vector<std::size_t> heap_size(k, 0);
  std::vector<std::uint32_t> scratch(k);
  const auto seeds = seed_table(config.global_seed, k);

  for (std::uint32_t d = 0; d < n; ++d) {
    const std::uint64_t item = idx.items[d];
    idx.position.emplace(item, d);
    const auto slot = HllSketch::locate(item, config);
    uni_hll.raise(slot);
    device_register[d] = slot.index;
    idx.device_rank[d] = slot.rank;
    ++counts[slot.index + 1];

    kernels::hash_bins(scratch, *seeds, item);
    kernels::min_inplace(uni_mh.mutable_bins(), scratch);
    for (std::uint32_t b = 0; b < k; ++b) {
      Candidate* heap = idx.candidates.data() + static_cast<std::size_t>(b) * idx.per_bin;
      std::size_t& size = heap_size[b];
      const Candidate c = make_candidate(scratch[b], d);
      if (size < idx.per_bin) {
        heap[size++] = c;
        std::push_heap(heap, heap + size);
      } else if (c < heap[0]) {
        std::pop_heap(heap, heap + size);
        heap[size - 1] = c;
        std::push_heap(heap, heap + size);
      }
    }
  }
  for (std::uint32_t b = 0; b < k; ++b) {
    Candidate* heap = idx.candidates.data() + static_cast<std::size_t>(b) * idx.per_bin;
    std::sort_heap(heap, heap + idx.per_bin);
  }

  for (std::uint32_t r = 0; r < m; ++r) counts[r + 1] += counts[r];
  idx.register_offsets = counts;
  idx.register_devices.resize(n);
  std::vector<std::uint32_t> fill(counts.begin(), counts.end() - 1);
  for (std::uint32_t d = 0; d < n; ++d) idx.register_devices[fill[device_register[d]]++] = d;
  for (std::uint32_t r = 0; r < m; ++r) {
    auto first = idx.register_devices.begin() + idx.register_offsets[r];
    auto last = idx.register_devices.begin() + idx.register_offsets[r + 1];
    std::stable_sort(first, last, [&](std::uint32_t a, std::uint32_t b) {
      return idx.device_rank[a] > idx.device_rank[b];
    });
  }
  return idx;
}

std::string key_component(const std::string& v) { return v.empty() ? std::string(kEmptyAttribute) : v; }

}  // namespace

const Cuboid* Hypercube::find(const CellKey& key) const noexcept {
  const auto it = std::lower_bound(cells.begin(), cells.end(), key,
                                   [](const Cuboid& c, const CellKey& k) { return c.key < k; });
  return it != cells.end() && it->key == key ? &*it : nullptr;
}

bool Hypercube::has_exact_counts() const noexcept {
  return !cells.empty() && std::all_of(cells.begin(), cells.end(), [](const Cuboid& c) { return c.exact_count; });
}

int Hypercube::column_position(std::string_view column) const noexcept {
  const auto it = std::find(group_by.begin(), group_by.end(), column);
  return it == group_by.end() ? -1 : static_cast<int>(it - group_by.begin());
}

std::vector<std::uint64_t> device_hashes(const RecordBatch& batch) {
  std::vector<std::uint64_t> out;
  out.reserve(batch.row_count);
  for (const auto& psid : batch.psids()) out.push_back(fnv1a64(psid));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PartialHypercube build_cells(const RecordBatch& batch, std::span<const std::string> group_by,
                             const HashConfig& config, std::string dimension) {
  if (group_by.empty()) throw ConfigError("group-by column list is empty");
  config.validate();

  std::vector<const std::vector<std::string>*> key_columns;
  for (const auto& col : group_by) {
    if (!batch.has_column(col)) throw IngestError(0, "group-by column '" + col + "' not in input");
    key_columns.push_back(&batch.column(col));
  }
  const auto& psids = batch.psids();

  std::map<CellKey, std::vector<std::uint64_t>> groups;
  CellKey key;
  for (std::size_t r = 0; r < batch.row_count; ++r) {
    key.values.clear();
    for (const auto* col : key_columns) key.values.push_back(key_component((*col)[r]));
    groups[key].push_back(fnv1a64(psids[r]));
  }

  PartialHypercube out{std::move(dimension), {group_by.begin(), group_by.end()}, config, {}};
  out.cells.reserve(groups.size());
  for (auto& [k, members] : groups) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    PartialCell cell{k, std::move(members), HllSketch(config), MinHashSignature(config)};
    for (const auto item : cell.members) cell.hll.insert(item);
    cell.minhash.insert(cell.members);
    out.cells.push_back(std::move(cell));
  }
  return out;
}

Hypercube build_exclude(PartialHypercube partial, std::span<const std::uint64_t> universe,
                        const ExcludeOptions& options, BuildStats* stats) {
  if (universe.empty()) throw ConfigError("device universe is empty");
  const HashConfig config = partial.config;
  Hypercube cube{std::move(partial.dimension), std::move(partial.group_by), config, {}, HllSketch(config),
                 MinHashSignature(config)};

  const UniverseIndex idx = index_universe(universe, config, cube.universe_hll, cube.universe_minhash);
  const auto n = static_cast<std::uint32_t>(idx.items.size());
  const std::uint32_t m = config.registers();
  const std::uint32_t k = config.bins;
  const auto seeds = seed_table(config.global_seed, k);

  BuildStats local;
  local.universe_size = n;
  std::vector<std::uint32_t> stamp(n, 0);
  std::vector<std::uint32_t> unresolved;

  cube.cells.reserve(partial.cells.size());
  std::uint32_t generation = 0;
  for (auto& cell : partial.cells) {
    ++generation;
    for (const auto item : cell.members) {
      const auto it = idx.position.find(item);
      if (it == idx.position.end()) {
        ++local.universe_violations;
        continue;
      }
      stamp[it->second] = generation;
    }
    auto is_member = [&](std::uint32_t d) { return stamp[d] == generation; };

    HllSketch exhll(config);
    auto regs = exhll.mutable_registers();
    for (std::uint32_t r = 0; r < m; ++r) {
      for (std::uint32_t i = idx.register_offsets[r]; i < idx.register_offsets[r + 1]; ++i) {
        const std::uint32_t d = idx.register_devices[i];
        if (!is_member(d)) {
          regs[r] = idx.device_rank[d];
          break;
        }
      }
    }

    MinHashSignature exmh(config);
    auto bins = exmh.mutable_bins();
    unresolved.clear();
    for (std::uint32_t b = 0; b < k; ++b) {
      const Candidate* list = idx.candidates.data() + static_cast<std::size_t>(b) * idx.per_bin;
      bool found = false;
      for (std::size_t i = 0; i < idx.per_bin; ++i) {
        if (!is_member(candidate_device(list[i]))) {
          bins[b] = candidate_value(list[i]);
          found = true;
          break;
        }
      }
      // Candidates exhausted while the universe holds more devices: the
      // complement minimum lies further down and needs a scan.
      if (!found && idx.per_bin < n) unresolved.push_back(b);
    }
    if (!unresolved.empty()) {
      local.fallback_bins += unresolved.size();
      for (std::uint32_t d = 0; d < n; ++d) {
        if (is_member(d)) continue;
        const std::uint64_t item = idx.items[d];
        for (const auto b : unresolved) {
          const std::uint32_t v = bin_hash(item, (*seeds)[b]);
          if (v < bins[b]) bins[b] = v;
        }
      }
    }

    std::optional<std::uint64_t> exact;
    if (options.keep_exact_counts) exact = cell.members.size();
    cube.cells.push_back(Cuboid{std::move(cell.key), std::move(cell.hll), std::move(exhll), std::move(cell.minhash),
                                std::move(exmh), exact});
  }
  if (stats != nullptr) *stats = local;
  return cube;
}

Hypercube build_exclude(PartialHypercube partial, const RecordBatch& universe, const ExcludeOptions& options,
                        BuildStats* stats) {
  const auto items = device_hashes(universe);
  return build_exclude(std::move(partial), items, options, stats);
}

}  // namespace reach::cube
