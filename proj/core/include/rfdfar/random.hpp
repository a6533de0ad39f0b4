#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace rfdfar {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for one stage of a run.
///
/// `splitmix64(master ^ fnv1a64(stage) ^ splitmix64(index))`, so every
/// (stage, index) pair gets an independent, documented stream from a single
/// master seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage,
                          std::uint64_t index) noexcept;

/// Uniform integer in [0, n) by rejection; identical on every standard library.
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Uniform double in [0, 1) from the top 53 bits.
double uniform01(Rng& rng) noexcept;

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace rfdfar
