#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reach/config.hpp"
#include "reach/hll.hpp"
#include "reach/minhash.hpp"
#include "reach/records.hpp"

namespace reach::cube {

// Attribute values aligned with the hypercube's group-by columns. Ordering is
// lexicographic over the tuple, bytewise within each value.
struct CellKey {
  std::vector<std::string> values;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
  friend bool operator==(const CellKey&, const CellKey&) = default;
};

// Key component used for NULL / empty attribute values.
inline constexpr std::string_view kEmptyAttribute = "(empty)";

// Base cuboid: include and exclude sketches for one attribute combination.
struct Cuboid {
  CellKey key;
  HllSketch hll;
  HllSketch exhll;
  MinHashSignature minhash;
  MinHashSignature exminhash;
  std::optional<std::uint64_t> exact_count;

  friend bool operator==(const Cuboid&, const Cuboid&) = default;
};

struct Hypercube {
  std::string dimension;
  std::vector<std::string> group_by;
  HashConfig config;
  std::vector<Cuboid> cells;  // sorted by key, keys unique
  HllSketch universe_hll;
  MinHashSignature universe_minhash;

  [[nodiscard]] const Cuboid* find(const CellKey& key) const noexcept;
  [[nodiscard]] bool has_exact_counts() const noexcept;
  // Position of a group-by column, or -1.
  [[nodiscard]] int column_position(std::string_view column) const noexcept;

  friend bool operator==(const Hypercube&, const Hypercube&) = default;
};

// Include-only cell, still carrying its member device hashes so the exclude
// pass can test membership.
struct PartialCell {
  CellKey key;
  std::vector<std::uint64_t> members;  // sorted, distinct device hashes
  HllSketch hll;
  MinHashSignature minhash;
};

struct PartialHypercube {
  std::string dimension;
  std::vector<std::string> group_by;
  HashConfig config;
  std::vector<PartialCell> cells;  // sorted by key
};

struct BuildStats {
  std::size_t universe_size = 0;
  // Cell members absent from the universe (counted per cell membership).
  std::size_t universe_violations = 0;
  // Exclude bins resolved by the fallback complement scan.
  std::size_t fallback_bins = 0;
};

struct ExcludeOptions {
  bool keep_exact_counts = false;
};

// Groups rows by the group-by columns and builds include sketches per cell
// from the distinct PSIDs of each cell. Throws ConfigError on an empty
// group-by list and IngestError on an unknown column.
[[nodiscard]] PartialHypercube build_cells(const RecordBatch& batch, std::span<const std::string> group_by,
                                           const HashConfig& config, std::string dimension);

// Builds exclude sketches (universe minus cell) for every cell and the
// universe sketches. Throws ConfigError when the universe is empty.
[[nodiscard]] Hypercube build_exclude(PartialHypercube partial, std::span<const std::uint64_t> universe,
                                      const ExcludeOptions& options = {}, BuildStats* stats = nullptr);
[[nodiscard]] Hypercube build_exclude(PartialHypercube partial, const RecordBatch& universe,
                                      const ExcludeOptions& options = {}, BuildStats* stats = nullptr);

// Distinct device hashes of a batch's PSID column, sorted.
[[nodiscard]] std::vector<std::uint64_t> device_hashes(const RecordBatch& batch);

// Hypercube file, little-endian:
//   "HCUB" | version u16 = 1 | global_seed u64 | p u8 | k u32 | flags u8
//   | dimension (u16 len + UTF-8) | group-by count u16, names (u16 len + UTF-8)
//   | universe HLL registers | universe MinHash bins | cell count u32
//   | cells sorted by key: key values (u16 len + UTF-8 each),
//     [exact count u64 when flags bit 0], hll, exhll, minhash, exminhash
//   | CRC32 of all preceding bytes
inline constexpr std::uint16_t kHypercubeVersion = 1;
inline constexpr std::uint8_t kFlagExactCounts = 0x01;

[[nodiscard]] std::vector<std::uint8_t> encode_hypercube(const Hypercube& cube);
// Throws FormatError on bad magic, version mismatch, truncation or checksum
// failure.
[[nodiscard]] Hypercube decode_hypercube(std::span<const std::uint8_t> bytes);

void write_hypercube(const Hypercube& cube, const std::filesystem::path& path);
[[nodiscard]] Hypercube read_hypercube(const std::filesystem::path& path);

}  // namespace reach::cube
