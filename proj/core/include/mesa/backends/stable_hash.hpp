#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mesa {

/// FNV-1a over the bytes of `data`, folded with `seed`. Stable across
/// platforms and runs; used wherever a deterministic pseudo-random choice
/// must depend only on content.
std::uint64_t stable_hash(std::string_view data, std::uint64_t seed = 0) noexcept;

/// One step of the splitmix64 generator.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Uniform double in [0, 1) from the top 53 bits.
double unit_interval(std::uint64_t bits) noexcept;

std::string hex64(std::uint64_t value);

}  // namespace mesa
