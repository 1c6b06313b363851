#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace coe {

// Seeded generator whose draws are identical on every standard library:
// mt19937_64 output is fixed by the standard, and the bounded draw and
// shuffle below avoid the implementation-defined distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Sub-seed for one pipeline stage and one item: SHA-256 of
// "<root>/<stage>/<item>", first 8 bytes.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stage, std::string_view item);

}  // namespace coe
