#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace coe {

struct MannWhitneyResult {
  double u = 0.0;  // statistic of the first sample
  double p = 1.0;  // two-sided
  std::string method;  // "exact" or "normal"
  std::string note;    // set when the variance is zero
};

inline constexpr std::size_t kExactLimit = 16;

// U from rank sums with midranks for ties. When the pooled size is at most
// kExactLimit, p is exact: the share of all splits of the pooled ranks into
// groups of the same sizes whose U is at least as far from n_a*n_b/2 as the
// observed one. Otherwise the normal approximation with tie-corrected
// variance and continuity correction. All observations equal gives p = 1.
// Throws PreconditionError on an empty sample.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Describes the method for report footers.
std::string mann_whitney_method_note();

}  // namespace coe
