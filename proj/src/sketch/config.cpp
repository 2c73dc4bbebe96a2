#include <map>
#include <mutex>
#include <utility>

#include "reach/config.hpp"
#include "reach/errors.hpp"
#include "reach/hash.hpp"

namespace reach {

void HashConfig::validate() const {
  if (precision < kMinPrecision || precision > kMaxPrecision) {
    throw ConfigError("precision " + std::to_string(precision) + " outside [" + std::to_string(kMinPrecision) + ", " +
                      std::to_string(kMaxPrecision) + "]");
  }
  if (bins < kBinAlignment || bins % kBinAlignment != 0) {
    throw ConfigError("bin count " + std::to_string(bins) + " must be a positive multiple of " +
                      std::to_string(kBinAlignment));
  }
}

std::string HashConfig::describe() const {
  return "seed=" + std::to_string(global_seed) + " p=" + std::to_string(precision) + " k=" + std::to_string(bins);
}

void require_same_config(const HashConfig& a, const HashConfig& b) {
  if (a != b) {
    throw IncompatibleSketchError("sketch configs differ: {" + a.describe() + "} vs {" + b.describe() + "}");
  }
}

std::shared_ptr<const SeedTable> seed_table(std::uint64_t global_seed, std::uint32_t bins) {
  static std::mutex mu;
  static std::map<std::pair<std::uint64_t, std::uint32_t>, std::shared_ptr<const SeedTable>> cache;

  const std::lock_guard lock(mu);
  auto& slot = cache[{global_seed, bins}];
  if (!slot) {
    auto table = std::make_shared<SeedTable>(bins);
    for (std::uint32_t i = 0; i < bins; ++i) (*table)[i] = bin_seed(global_seed, i);
    slot = std::move(table);
  }
  return slot;
}

}  // namespace reach
