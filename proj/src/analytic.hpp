#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pasim {

/// [p^(i-1)(1-p) for i = 1..N] followed by the fallback share p^N.
std::vector<double> expected_tier_distribution(double p, unsigned tiers);

enum class McMode {
  // Each trial sees a freshly drawn uniform occupancy (the model's i.i.d. setting).
  FreshOccupancy,
  // One pool at the starting occupancy; trials allocate into it and never release.
  SequentialPool,
  // One injected pool; each trial runs tiered_allocate and releases the frame again.
  InjectedPool,
};

struct McOptions {
  std::uint64_t total_frames = 1ull << 20;
  double p = 0.0;
  unsigned tiers = 1;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  McMode mode = McMode::FreshOccupancy;
  unsigned threads = 1;
};

/// Tiered allocation of fresh random VPNs with the production mixer. Returns
/// counts per outcome, tiers 1..N then fallback (N+1 entries).
std::vector<std::uint64_t> monte_carlo_tier_counts(const McOptions& opts);
/// Counts normalized by the trial count.
std::vector<double> monte_carlo_tier_distribution(const McOptions& opts);

struct ChiSquareResult {
  double statistic = 0.0;
  unsigned dof = 0;
  double p_value = 1.0;
  bool pass = true;  // not rejected at alpha
};

/// Pearson goodness of fit of `counts` against `expected` probabilities.
/// Cells with expected count < 5 are pooled into their neighbour; an observed
/// count in a zero-probability cell rejects outright.
ChiSquareResult chi_square_fit(std::span<const std::uint64_t> counts, std::span<const double> expected,
                               double alpha = 0.001);
/// Same, with `empirical` given as frequencies over `trials`.
ChiSquareResult chi_square_fit(std::span<const double> empirical, std::span<const double> expected,
                               std::uint64_t trials, double alpha = 0.001);

/// Half-width of a k-sigma binomial interval around probability q.
double binomial_bound(double q, std::uint64_t trials, double sigmas = 3.0);

}  // namespace pasim
