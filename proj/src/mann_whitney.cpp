#include "coe/mann_whitney.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <numeric>
#include <vector>

#include "coe/errors.hpp"

namespace coe {
namespace {

// Midranks (1-based) of the pooled values, plus sum over tie groups of t^3 - t.
std::vector<double> midranks(const std::vector<double>& pooled, double& tie_term) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
  std::vector<double> ranks(n);
  tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw PreconditionError("mann_whitney_u needs two non-empty samples");
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t n = na + nb;

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  double tie_term = 0.0;
  const std::vector<double> ranks = midranks(pooled, tie_term);

  const double base = static_cast<double>(na) * static_cast<double>(na + 1) / 2.0;
  double ra = 0.0;
  for (std::size_t i = 0; i < na; ++i) ra += ranks[i];

  MannWhitneyResult out;
  out.u = ra - base;
  const double mu = static_cast<double>(na) * static_cast<double>(nb) / 2.0;
  const double deviation = std::abs(out.u - mu);

  const bool all_tied = std::all_of(pooled.begin(), pooled.end(),
                                    [&](double v) { return v == pooled.front(); });

  if (n <= kExactLimit) {
    out.method = "exact";
    // Midranks are multiples of 1/2, so these sums are exact in double.
    std::size_t hits = 0;
    std::size_t total = 0;
    const std::uint32_t limit = 1u << n;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != na) continue;
      double r = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) r += ranks[i];
      }
      ++total;
      if (std::abs(r - base - mu) >= deviation - 1e-9) ++hits;
    }
    out.p = static_cast<double>(hits) / static_cast<double>(total);
  } else {
    out.method = "normal";
    const double nd = static_cast<double>(n);
    const double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                       ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
    if (var <= 0.0) {
      out.p = 1.0;
    } else {
      const double z = std::max(0.0, deviation - 0.5) / std::sqrt(var);
      out.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    }
  }
  if (all_tied) {
    out.p = 1.0;
    out.note = "all observations tied; p = 1 by convention";
  }
  return out;
}

std::string mann_whitney_method_note() {
  return "Mann-Whitney U, two-sided; midranks for ties; exact permutation p-value when n_a + n_b <= " +
         std::to_string(kExactLimit) +
         ", otherwise normal approximation with tie-corrected variance and continuity correction";
}

}  // namespace coe
