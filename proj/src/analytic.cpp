#include "analytic.hpp"

#include <cmath>
#include <limits>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>

#include "hash_policy.hpp"
#include "mem_model.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace pasim {

std::vector<double> expected_tier_distribution(double p, unsigned tiers) {
  const AnalyticModel model{p, tiers};
  model.validate();
  std::vector<double> out;
  out.reserve(tiers + 1);
  for (unsigned i = 1; i <= tiers; ++i) out.push_back(model.tier_probability(i));
  out.push_back(model.fallback_probability());
  return out;
}

namespace {

void validate(const McOptions& opts) {
  AnalyticModel{opts.p, opts.tiers}.validate();
  if (opts.total_frames == 0) throw Error(ErrorCode::InvalidConfig, "Monte-Carlo needs at least one frame");
}

// Trials [begin, end) against lazily sampled uniform occupancy: the status of
// each distinct probed frame is drawn from what remains of the M-of-P subset.
void fresh_trials(const McOptions& opts, const HashPolicy& policy, std::uint64_t begin, std::uint64_t end,
                  std::vector<std::uint64_t>& counts) {
  const auto occupied_total = static_cast<std::uint64_t>(std::llround(opts.p * static_cast<double>(opts.total_frames)));
  std::vector<std::uint64_t> probed;
  probed.reserve(opts.tiers);
  for (std::uint64_t trial = begin; trial < end; ++trial) {
    Rng rng(derive_seed(opts.seed, trial));
    const Vpn vpn{uniform_below(rng, 1ull << kVpnBits)};
    probed.clear();
    unsigned outcome = opts.tiers + 1;  // fallback slot
    for (unsigned tier = 1; tier <= opts.tiers; ++tier) {
      const std::uint64_t frame = policy.hash(tier, vpn).index;
      bool seen = false;
      for (const auto f : probed) seen |= f == frame;
      if (seen) continue;  // an earlier tier already found it occupied
      const std::uint64_t occupied_left = occupied_total - probed.size();
      const std::uint64_t frames_left = opts.total_frames - probed.size();
      const bool occupied = unit_double(rng) * static_cast<double>(frames_left) < static_cast<double>(occupied_left);
      if (!occupied) {
        outcome = tier;
        break;
      }
      probed.push_back(frame);
    }
    ++counts[outcome - 1];
  }
}

}  // namespace

std::vector<std::uint64_t> monte_carlo_tier_counts(const McOptions& opts) {
  validate(opts);
  const HashPolicy policy(opts.tiers, opts.seed, opts.total_frames);
  std::vector<std::uint64_t> counts(opts.tiers + 1, 0);

  if (opts.mode == McMode::SequentialPool) {
    PhysMem mem(opts.total_frames);
    mem.inject_pressure(opts.p, opts.seed);
    if (opts.trials > mem.free_count()) {
      throw Error(ErrorCode::InvalidConfig, "sequential-pool trials exceed the free frames");
    }
    for (std::uint64_t trial = 0; trial < opts.trials; ++trial) {
      Rng rng(derive_seed(opts.seed, trial));
      const AllocationOutcome o = tiered_allocate(policy, mem, Vpn{uniform_below(rng, 1ull << kVpnBits)});
      ++counts[o.hashed() ? o.tier - 1 : opts.tiers];
    }
    return counts;
  }
  if (opts.mode == McMode::InjectedPool) {
    PhysMem mem(opts.total_frames);
    mem.inject_pressure(opts.p, opts.seed);
    if (mem.free_count() == 0) throw Error(ErrorCode::InvalidConfig, "injected pool has no free frame");
    for (std::uint64_t trial = 0; trial < opts.trials; ++trial) {
      Rng rng(derive_seed(opts.seed, trial));
      const AllocationOutcome o = tiered_allocate(policy, mem, Vpn{uniform_below(rng, 1ull << kVpnBits)});
      ++counts[o.hashed() ? o.tier - 1 : opts.tiers];
      mem.release(o.ppn);
    }
    return counts;
  }

  const unsigned threads = std::max(1u, opts.threads);
  if (threads == 1) {
    fresh_trials(opts, policy, 0, opts.trials, counts);
    return counts;
  }
  std::vector<std::vector<std::uint64_t>> partial(threads, std::vector<std::uint64_t>(opts.tiers + 1, 0));
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (opts.trials + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t begin = std::min(opts.trials, t * chunk);
    const std::uint64_t end = std::min(opts.trials, begin + chunk);
    pool.emplace_back([&, t, begin, end] { fresh_trials(opts, policy, begin, end, partial[t]); });
  }
  for (auto& th : pool) th.join();
  for (const auto& part : partial) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += part[i];
  }
  return counts;
}

std::vector<double> monte_carlo_tier_distribution(const McOptions& opts) {
  const auto counts = monte_carlo_tier_counts(opts);
  std::vector<double> out;
  out.reserve(counts.size());
  for (const auto c : counts) out.push_back(static_cast<double>(c) / static_cast<double>(opts.trials));
  return out;
}

namespace {

ChiSquareResult chi_square_core(std::span<const double> observed, std::span<const double> expected, double total,
                                double alpha) {
  if (observed.size() != expected.size()) throw Error(ErrorCode::InvalidConfig, "chi-square cell counts differ");
  ChiSquareResult r;
  struct Cell {
    double obs;
    double exp;
  };
  std::vector<Cell> cells;
  Cell bucket{0.0, 0.0};
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) {
      if (observed[i] > 0.0) {
        r.statistic = std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
        r.pass = false;
        return r;
      }
      continue;
    }
    bucket.obs += observed[i];
    bucket.exp += expected[i] * total;
    if (bucket.exp >= 5.0) {
      cells.push_back(bucket);
      bucket = {0.0, 0.0};
    }
  }
  if (bucket.exp > 0.0) {
    if (cells.empty()) {
      cells.push_back(bucket);
    } else {
      cells.back().obs += bucket.obs;
      cells.back().exp += bucket.exp;
    }
  }
  if (cells.size() < 2) return r;
  for (const auto& c : cells) r.statistic += (c.obs - c.exp) * (c.obs - c.exp) / c.exp;
  r.dof = static_cast<unsigned>(cells.size() - 1);
  const boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  r.pass = r.p_value >= alpha;
  return r;
}

}  // namespace

ChiSquareResult chi_square_fit(std::span<const std::uint64_t> counts, std::span<const double> expected, double alpha) {
  std::vector<double> obs(counts.begin(), counts.end());
  double total = 0.0;
  for (const auto c : obs) total += c;
  return chi_square_core(obs, expected, total, alpha);
}

ChiSquareResult chi_square_fit(std::span<const double> empirical, std::span<const double> expected,
                               std::uint64_t trials, double alpha) {
  std::vector<double> obs;
  obs.reserve(empirical.size());
  for (const auto f : empirical) obs.push_back(f * static_cast<double>(trials));
  return chi_square_core(obs, expected, static_cast<double>(trials), alpha);
}

double binomial_bound(double q, std::uint64_t trials, double sigmas) {
  return sigmas * std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
}

}  // namespace pasim
