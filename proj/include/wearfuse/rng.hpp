#pragma once

#include <cstdint>
#include <string_view>

namespace wearfuse {

/// Seed of a named sub-stream of the root seed (FNV-1a of the name mixed with
/// SplitMix64), so every consumer of randomness is independent and stable.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream) noexcept;

}  // namespace wearfuse
