#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace brenier {

/// Per-stream seed: splitmix64(master ⊕ fnv1a64(label)). Labels name the
/// operation and the scenario, e.g. "concentration/" + descriptor.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

inline std::mt19937_64 stream(std::uint64_t master, std::string_view label) {
  return std::mt19937_64(derive_seed(master, label));
}

}  // namespace brenier
