#include <zlib.h>

#include <cstring>
#include <fstream>
#include <sstream>

#include "reach/bytes.hpp"
#include "reach/errors.hpp"
#include "reach/hypercube.hpp"
#include "reach/serialize.hpp"

namespace reach::cube {
namespace {

constexpr char kMagic[4] = {'H', 'C', 'U', 'B'};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large inputs in chunks.
  constexpr std::size_t kChunk = 1U << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const std::size_t len = std::min(kChunk, bytes.size() - off);
    crc = crc32(crc, bytes.data() + off, static_cast<uInt>(len));
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<std::uint8_t> encode_hypercube(const Hypercube& cube) {
  const bool exact = cube.has_exact_counts();

  ByteWriter out;
  out.raw(std::string_view(kMagic, 4));
  out.u16(kHypercubeVersion);
  out.u64(cube.config.global_seed);
  out.u8(static_cast<std::uint8_t>(cube.config.precision));
  out.u32(cube.config.bins);
  out.u8(exact ? kFlagExactCounts : 0);
  out.short_string(cube.dimension);
  if (cube.group_by.size() > 0xFFFF) throw ContractError("too many group-by columns");
  out.u16(static_cast<std::uint16_t>(cube.group_by.size()));
  for (const auto& col : cube.group_by) out.short_string(col);
  write_payload(out, cube.universe_hll);
  write_payload(out, cube.universe_minhash);
  out.u32(static_cast<std::uint32_t>(cube.cells.size()));

  for (std::size_t i = 0; i < cube.cells.size(); ++i) {
    const auto& cell = cube.cells[i];
    if (i > 0 && !(cube.cells[i - 1].key < cell.key)) {
      throw ContractError("hypercube cells are not sorted by key or contain duplicates");
    }
    if (cell.key.values.size() != cube.group_by.size()) {
      throw ContractError("cell key arity does not match group-by arity");
    }
    for (const auto& v : cell.key.values) out.short_string(v);
    if (exact) out.u64(*cell.exact_count);
    write_payload(out, cell.hll);
    write_payload(out, cell.exhll);
    write_payload(out, cell.minhash);
    write_payload(out, cell.exminhash);
  }
  const std::uint32_t crc = crc32_of(out.bytes());
  out.u32(crc);
  return std::move(out).take();
}

Hypercube decode_hypercube(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  const auto magic = in.raw(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) in.fail_at(0, "bad hypercube magic");
  const std::uint16_t version = in.u16();
  if (version != kHypercubeVersion) {
    in.fail_at(4, "unsupported hypercube version " + std::to_string(version));
  }
  if (bytes.size() < 4 + 2 + 4) in.fail_at(bytes.size(), "truncated hypercube file");
  const std::size_t body = bytes.size() - 4;
  ByteReader trailer(bytes.subspan(body));
  const std::uint32_t stored_crc = trailer.u32();
  if (crc32_of(bytes.first(body)) != stored_crc) in.fail_at(body, "hypercube checksum mismatch");

  // Parse only the checksummed body from here on.
  ByteReader rd(bytes.first(body));
  (void)rd.raw(6, "header");
  HashConfig config;
  config.global_seed = rd.u64();
  const std::size_t config_offset = rd.offset();
  config.precision = rd.u8();
  config.bins = rd.u32();
  try {
    config.validate();
  } catch (const ConfigError& e) {
    rd.fail_at(config_offset, e.what());
  }
  const std::uint8_t flags = rd.u8();
  if ((flags & ~kFlagExactCounts) != 0) rd.fail_at(rd.offset() - 1, "unknown hypercube flags");
  const bool exact = (flags & kFlagExactCounts) != 0;

  Hypercube cube{rd.short_string("dimension name"), {}, config, {}, HllSketch(config), MinHashSignature(config)};
  const std::uint16_t columns = rd.u16();
  for (std::uint16_t i = 0; i < columns; ++i) cube.group_by.push_back(rd.short_string("group-by column"));
  cube.universe_hll = read_hll_payload(rd, config);
  cube.universe_minhash = read_minhash_payload(rd, config);

  const std::uint32_t count = rd.u32();
  cube.cells.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t cell_offset = rd.offset();
    CellKey key;
    for (std::uint16_t c = 0; c < columns; ++c) key.values.push_back(rd.short_string("cell key"));
    std::optional<std::uint64_t> exact_count;
    if (exact) exact_count = rd.u64();
    auto hll = read_hll_payload(rd, config);
    auto exhll = read_hll_payload(rd, config);
    auto mh = read_minhash_payload(rd, config);
    auto exmh = read_minhash_payload(rd, config);
    if (!cube.cells.empty() && !(cube.cells.back().key < key)) {
      rd.fail_at(cell_offset, "cell keys out of order");
    }
    cube.cells.push_back(
        Cuboid{std::move(key), std::move(hll), std::move(exhll), std::move(mh), std::move(exmh), exact_count});
  }
  if (!rd.at_end()) rd.fail(std::to_string(rd.remaining()) + " unexpected bytes before checksum");
  return cube;
}

void write_hypercube(const Hypercube& cube, const std::filesystem::path& path) {
  const auto bytes = encode_hypercube(cube);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

Hypercube read_hypercube(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_hypercube(bytes);
}

}  // namespace reach::cube
