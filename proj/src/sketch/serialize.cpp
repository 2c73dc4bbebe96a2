#include "reach/serialize.hpp"

#include <cstring>
#include <optional>

#include "reach/errors.hpp"
#include "reach/kernels.hpp"

namespace reach {
namespace {

constexpr char kMagic[4] = {'S', 'K', 'T', '1'};

void write_header(ByteWriter& out, SketchKind kind, const HashConfig& config) {
  out.raw(std::string_view(kMagic, 4));
  out.u8(static_cast<std::uint8_t>(kind));
  out.u64(config.global_seed);
  out.u8(static_cast<std::uint8_t>(config.precision));
  out.u32(config.bins);
}

// Mask words -> ceil(k/8) bytes, bin 0 in the LSB of byte 0.
void write_mask(ByteWriter& out, std::span<const std::uint64_t> mask, std::uint32_t bins) {
  const std::size_t nbytes = (bins + 7) / 8;
  for (std::size_t b = 0; b < nbytes; ++b) out.u8(static_cast<std::uint8_t>(mask[b / 8] >> (8 * (b % 8))));
}

std::vector<std::uint64_t> read_mask(ByteReader& in, std::uint32_t bins) {
  const std::size_t nbytes = (bins + 7) / 8;
  const auto bytes = in.raw(nbytes, "intermediate mask");
  std::vector<std::uint64_t> mask(kernels::mask_words(bins), 0);
  for (std::size_t b = 0; b < nbytes; ++b) mask[b / 8] |= static_cast<std::uint64_t>(bytes[b]) << (8 * (b % 8));
  return mask;
}

}  // namespace

void write_payload(ByteWriter& out, const HllSketch& sketch) { out.raw(sketch.registers()); }

void write_payload(ByteWriter& out, const MinHashSignature& sig) { out.u32_array(sig.bins()); }

HllSketch read_hll_payload(ByteReader& in, const HashConfig& config) {
  const std::size_t start = in.offset();
  const auto regs = in.raw(config.registers(), "HLL registers");
  try {
    return HllSketch::from_registers(config, std::vector<std::uint8_t>(regs.begin(), regs.end()));
  } catch (const FormatError& e) {
    throw FormatError(start + e.offset(), "HLL payload invalid");
  }
}

MinHashSignature read_minhash_payload(ByteReader& in, const HashConfig& config) {
  return MinHashSignature::from_bins(config, in.u32_array(config.bins, "MinHash bins"));
}

std::vector<std::uint8_t> serialize_sketch(const HllSketch& sketch) {
  ByteWriter out;
  write_header(out, SketchKind::hll, sketch.config());
  write_payload(out, sketch);
  return std::move(out).take();
}

std::vector<std::uint8_t> serialize_sketch(const MinHashSignature& sig) {
  ByteWriter out;
  write_header(out, SketchKind::minhash, sig.config());
  write_payload(out, sig);
  return std::move(out).take();
}

std::vector<std::uint8_t> serialize_sketch(const IntermediateSignature& sig) {
  ByteWriter out;
  write_header(out, SketchKind::intermediate, sig.config());
  out.u32_array(sig.values());
  write_mask(out, sig.mask(), sig.config().bins);
  return std::move(out).take();
}

std::vector<std::uint8_t> serialize_sketch(const AnySketch& sketch) {
  return std::visit([](const auto& s) { return serialize_sketch(s); }, sketch);
}

AnySketch deserialize_sketch(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  const auto magic = in.raw(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) in.fail_at(0, "bad sketch magic");

  const std::size_t kind_offset = in.offset();
  const std::uint8_t kind = in.u8();
  HashConfig config;
  config.global_seed = in.u64();
  const std::size_t config_offset = in.offset();
  config.precision = in.u8();
  config.bins = in.u32();
  try {
    config.validate();
  } catch (const ConfigError& e) {
    in.fail_at(config_offset, e.what());
  }

  auto finish = [&](AnySketch s) {
    if (!in.at_end()) in.fail(std::to_string(in.remaining()) + " trailing bytes");
    return s;
  };

  switch (static_cast<SketchKind>(kind)) {
    case SketchKind::hll:
      return finish(read_hll_payload(in, config));
    case SketchKind::minhash:
      return finish(read_minhash_payload(in, config));
    case SketchKind::intermediate: {
      const std::size_t start = in.offset();
      auto values = in.u32_array(config.bins, "intermediate values");
      auto mask = read_mask(in, config.bins);
      std::optional<IntermediateSignature> sig;
      try {
        sig = IntermediateSignature::from_parts(config, std::move(values), std::move(mask));
      } catch (const FormatError& e) {
        throw FormatError(start, e.what());
      }
      return finish(std::move(*sig));
    }
  }
  in.fail_at(kind_offset, "unknown sketch kind " + std::to_string(kind));
}

}  // namespace reach
