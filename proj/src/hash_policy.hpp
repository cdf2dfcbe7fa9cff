#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "mem_model.hpp"
#include "types.hpp"

namespace pasim {

/// Tier index of a successful hash allocation, or kFallback.
struct AllocationOutcome {
  static constexpr unsigned kFallback = 0;

  Ppn ppn;
  unsigned tier = kFallback;

  bool hashed() const { return tier != kFallback; }
  friend bool operator==(const AllocationOutcome&, const AllocationOutcome&) = default;
};

/// The hash family shared by the allocator and the speculation engine: one
/// base mixer, N per-tier seeds derived from a master seed.
///
/// Stub-table mode replaces the mixer with an explicit (tier, key) -> frame
/// table so hand-built scenarios can be replayed exactly. Everything above
/// hash() is identical in both modes.
class HashPolicy {
 public:
  enum class Mode { Mixer, StubTable };

  /// Production mixer with seeds derived from `master_seed`.
  HashPolicy(unsigned tier_count, std::uint64_t master_seed, std::uint64_t total_frames);
  /// Production mixer with explicit seeds (must be pairwise distinct).
  HashPolicy(std::vector<std::uint64_t> seeds, std::uint64_t total_frames);
  /// Stub table; lookups of missing (tier, key) pairs throw.
  static HashPolicy stub(unsigned tier_count, std::uint64_t total_frames,
                         std::map<std::pair<unsigned, std::uint64_t>, std::uint64_t> table);

  unsigned tier_count() const { return static_cast<unsigned>(seeds_.size()); }
  std::uint64_t total_frames() const { return total_frames_; }
  Mode mode() const { return mode_; }
  const std::vector<std::uint64_t>& seeds() const { return seeds_; }

  /// Frame targeted by tier `tier` (1-based) for `key`.
  Ppn hash(unsigned tier, std::uint64_t key) const;
  Ppn hash(unsigned tier, Vpn vpn) const { return hash(tier, vpn.value); }

  /// Seeds are splitmix64(master + i) for i = 1..N, bumped on the (unlikely) duplicate.
  static std::vector<std::uint64_t> derive_seeds(unsigned tier_count, std::uint64_t master_seed);

 private:
  HashPolicy() = default;

  Mode mode_ = Mode::Mixer;
  std::vector<std::uint64_t> seeds_;
  std::uint64_t total_frames_ = 0;
  std::map<std::pair<unsigned, std::uint64_t>, std::uint64_t> stub_;
};

/// Probe tiers 1..N in order for `key`; claim the first free target, else fall back.
AllocationOutcome tiered_allocate_key(const HashPolicy& policy, PhysMem& mem, std::uint64_t key);

inline AllocationOutcome tiered_allocate(const HashPolicy& policy, PhysMem& mem, Vpn vpn) {
  return tiered_allocate_key(policy, mem, vpn.value);
}

/// Leaf page-table frame placement: the same procedure keyed by vpn >> 9, so
/// all 512 VPNs covered by one leaf frame share its hash targets.
inline AllocationOutcome allocate_pt_frame(const HashPolicy& policy, PhysMem& mem, Vpn vpn) {
  return tiered_allocate_key(policy, mem, vpn.value >> 9);
}

/// Closed-form allocation model under uniform occupancy p and N tiers.
struct AnalyticModel {
  double p = 0.0;
  unsigned tiers = 1;

  void validate() const;
  /// 1 - p^N.
  double success_probability() const;
  /// p^(i-1) (1 - p), 1 <= i <= N.
  double tier_probability(unsigned i) const;
  /// p^N.
  double fallback_probability() const;
};

}  // namespace pasim
