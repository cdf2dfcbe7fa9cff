#include "hash_policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rng.hpp"

namespace pasim {

std::vector<std::uint64_t> HashPolicy::derive_seeds(unsigned tier_count, std::uint64_t master_seed) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(tier_count);
  std::uint64_t counter = 1;
  while (seeds.size() < tier_count) {
    const std::uint64_t s = splitmix64(master_seed + counter++);
    if (std::find(seeds.begin(), seeds.end(), s) == seeds.end()) seeds.push_back(s);
  }
  return seeds;
}

HashPolicy::HashPolicy(unsigned tier_count, std::uint64_t master_seed, std::uint64_t total_frames)
    : HashPolicy(derive_seeds(tier_count, master_seed), total_frames) {}

HashPolicy::HashPolicy(std::vector<std::uint64_t> seeds, std::uint64_t total_frames)
    : mode_(Mode::Mixer), seeds_(std::move(seeds)), total_frames_(total_frames) {
  if (seeds_.empty()) throw Error(ErrorCode::InvalidConfig, "hash policy needs at least one tier");
  if (total_frames_ == 0) throw Error(ErrorCode::InvalidConfig, "hash policy needs at least one frame");
  for (std::size_t i = 0; i < seeds_.size(); ++i) {
    for (std::size_t j = i + 1; j < seeds_.size(); ++j) {
      if (seeds_[i] == seeds_[j]) throw Error(ErrorCode::InvalidConfig, "hash seeds must be pairwise distinct");
    }
  }
}

HashPolicy HashPolicy::stub(unsigned tier_count, std::uint64_t total_frames,
                            std::map<std::pair<unsigned, std::uint64_t>, std::uint64_t> table) {
  if (tier_count == 0) throw Error(ErrorCode::InvalidConfig, "hash policy needs at least one tier");
  if (total_frames == 0) throw Error(ErrorCode::InvalidConfig, "hash policy needs at least one frame");
  HashPolicy policy;
  policy.mode_ = Mode::StubTable;
  policy.total_frames_ = total_frames;
  // Stub seeds are placeholders; only their count matters.
  for (unsigned i = 1; i <= tier_count; ++i) policy.seeds_.push_back(i);
  for (const auto& [k, ppn] : table) {
    if (k.first == 0 || k.first > tier_count || ppn >= total_frames) {
      throw Error(ErrorCode::InvalidConfig, "stub entry out of range");
    }
  }
  policy.stub_ = std::move(table);
  return policy;
}

Ppn HashPolicy::hash(unsigned tier, std::uint64_t key) const {
  if (tier == 0 || tier > seeds_.size()) {
    throw Error(ErrorCode::OutOfRange, "hash tier " + std::to_string(tier) + " outside [1," +
                                           std::to_string(seeds_.size()) + "]");
  }
  if (mode_ == Mode::StubTable) {
    const auto it = stub_.find({tier, key});
    if (it == stub_.end()) {
      throw Error(ErrorCode::OutOfRange,
                  "stub table has no entry for tier " + std::to_string(tier) + " key " + std::to_string(key));
    }
    return Ppn{it->second};
  }
  // Plain modulo reduction; the bias is ~P/2^64 and ignored.
  return Ppn{mix64(key ^ seeds_[tier - 1]) % total_frames_};
}

AllocationOutcome tiered_allocate_key(const HashPolicy& policy, PhysMem& mem, std::uint64_t key) {
  for (unsigned tier = 1; tier <= policy.tier_count(); ++tier) {
    const Ppn target = policy.hash(tier, key);
    if (mem.is_free(target)) {
      mem.claim(target);
      return {target, tier};
    }
  }
  return {mem.fallback_alloc(), AllocationOutcome::kFallback};
}

void AnalyticModel::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidConfig, "occupancy ratio must lie in [0,1]");
  if (tiers == 0) throw Error(ErrorCode::InvalidConfig, "tier count must be >= 1");
}

double AnalyticModel::success_probability() const {
  validate();
  return 1.0 - std::pow(p, static_cast<double>(tiers));
}

double AnalyticModel::tier_probability(unsigned i) const {
  validate();
  if (i == 0 || i > tiers) {
    throw Error(ErrorCode::OutOfRange, "tier " + std::to_string(i) + " outside [1," + std::to_string(tiers) + "]");
  }
  return std::pow(p, static_cast<double>(i - 1)) * (1.0 - p);
}

double AnalyticModel::fallback_probability() const {
  validate();
  return std::pow(p, static_cast<double>(tiers));
}

}  // namespace pasim
