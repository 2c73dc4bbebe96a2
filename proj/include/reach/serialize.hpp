#pragma once

// Sketch wire format, little-endian:
//   magic "SKT1" | kind u8 (1 HLL, 2 MinHash, 3 Intermediate) | global_seed u64
//   | p u8 | k u32 | payload
// Payloads: HLL 2^p register bytes; MinHash k x u32; Intermediate k x u32
// values followed by ceil(k/8) mask bytes, bin 0 in the LSB of the first byte.

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "reach/bytes.hpp"
#include "reach/hll.hpp"
#include "reach/minhash.hpp"

namespace reach {

enum class SketchKind : std::uint8_t { hll = 1, minhash = 2, intermediate = 3 };

inline constexpr std::size_t kSketchHeaderSize = 4 + 1 + 8 + 1 + 4;

using AnySketch = std::variant<HllSketch, MinHashSignature, IntermediateSignature>;

[[nodiscard]] std::vector<std::uint8_t> serialize_sketch(const HllSketch& sketch);
[[nodiscard]] std::vector<std::uint8_t> serialize_sketch(const MinHashSignature& sig);
[[nodiscard]] std::vector<std::uint8_t> serialize_sketch(const IntermediateSignature& sig);
[[nodiscard]] std::vector<std::uint8_t> serialize_sketch(const AnySketch& sketch);

// Throws FormatError on bad magic, unknown kind, invalid config, truncation,
// trailing bytes or payload invariant violations.
[[nodiscard]] AnySketch deserialize_sketch(std::span<const std::uint8_t> bytes);

// Payload-only encoders used inside larger containers that carry the config
// once (the hypercube file).
void write_payload(ByteWriter& out, const HllSketch& sketch);
void write_payload(ByteWriter& out, const MinHashSignature& sig);
[[nodiscard]] HllSketch read_hll_payload(ByteReader& in, const HashConfig& config);
[[nodiscard]] MinHashSignature read_minhash_payload(ByteReader& in, const HashConfig& config);

}  // namespace reach
