#include "coe/random.hpp"

#include <limits>
#include <string>

#include "coe/digest.hpp"

namespace coe {

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % bound;
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view stage, std::string_view item) {
  std::string key = std::to_string(root);
  key.push_back('/');
  key.append(stage);
  key.push_back('/');
  key.append(item);
  return sha256_u64(key);
}

}  // namespace coe
