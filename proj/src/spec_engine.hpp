#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cache_hierarchy.hpp"
#include "hash_policy.hpp"
#include "page_table.hpp"
#include "tlb_mmu.hpp"
#include "types.hpp"

namespace pasim {

struct SpecConfig {
  unsigned n_max = 6;
  unsigned k_pt = 1;
  bool filter_enabled = true;
  double theta = 0.95;  // cumulative tier-coverage target
  double bw_hi = 0.85;
  double bw_lo = 0.50;
  bool data_enabled = true;
  bool pt_enabled = true;

  void validate(unsigned policy_tiers) const;
};

/// Per-tier confirmation counters and the current speculation degree.
struct SpecState {
  explicit SpecState(unsigned policy_tiers, unsigned n_max);

  std::vector<std::uint64_t> tier_success;  // index 0 is tier 1
  std::uint64_t fallback_count = 0;
  unsigned n_eff;
};

enum class SpecMode { Off, Hashed, Perfect };

struct IssuedFetch {
  std::uint64_t paddr;
  unsigned tier;  // 1-based; perfect-mode fetches report tier 1
  bool page_table;
  Cycle ready;
};

struct SpecOutcome {
  std::vector<IssuedFetch> issued;
  std::optional<unsigned> hit_tier;
  bool pt_hit = false;
  unsigned data_issued = 0;
  unsigned pt_issued = 0;
  unsigned wasted_fetches = 0;  // data candidates that missed
};

/// Candidate data addresses for tiers 1..n_eff, in tier order.
std::vector<std::uint64_t> generate_candidates(const HashPolicy& policy, Vpn vpn, std::uint64_t offset, unsigned n_eff);
/// Leaf-entry addresses for tiers 1..k_pt of the PT-frame hash (key vpn >> 9).
std::vector<std::uint64_t> generate_pt_candidates(const HashPolicy& policy, Vpn vpn, unsigned k_pt);

/// Smallest N whose cumulative confirmed share reaches theta (n_max if none).
unsigned pressure_target(const SpecState& state, const SpecConfig& config);
/// One filter step: pressure target, then bandwidth gating on `bw_utilization`.
unsigned choose_degree(SpecState& state, const SpecConfig& config, double bw_utilization);
/// Credits the smallest tier whose hash equals the resolved frame, else fallback.
/// Returns the credited tier (0 for fallback).
unsigned confirm(SpecState& state, const HashPolicy& policy, Vpn vpn, Ppn resolved);

struct MissRecord {
  WalkResult walk;
  std::uint32_t data_latency = 0;
  SpecOutcome spec;
  unsigned n_eff = 0;
  double utilization = 0.0;  // clamped, as used by the filter
  double bw_ewma = 0.0;      // raw meter value at the decision
};

/// Handles L2 TLB misses: issues speculative PT-entry and data fetches at
/// walk start, runs the walk, then serves the demand data access.
class SpeculationEngine {
 public:
  SpeculationEngine(const SpecConfig& config, SpecMode mode, unsigned policy_tiers);

  /// `walk_start` is the cycle the L2 TLB miss is known.
  MissRecord translate(const HashPolicy& policy, const RadixPageTable& table, MmuState& mmu, Hierarchy& hierarchy,
                       Vpn vpn, std::uint64_t offset, Cycle walk_start);
  /// Nested mode: only the final host frame is speculated (hashed on the guest VPN).
  MissRecord translate_nested(const HashPolicy& host_policy, const NestedPageTable& table, MmuState& mmu,
                              Hierarchy& hierarchy, Vpn gvpn, std::uint64_t offset, Cycle walk_start);

  const SpecState& state() const { return state_; }
  SpecState& state() { return state_; }
  const SpecConfig& config() const { return config_; }
  SpecMode mode() const { return mode_; }

 private:
  unsigned next_degree(Hierarchy& hierarchy, Cycle now, MissRecord& rec);
  void issue_data(const HashPolicy& policy, Vpn vpn, std::uint64_t offset, unsigned n_eff, std::optional<Ppn> perfect,
                  Hierarchy& hierarchy, Cycle now, SpecOutcome& out);
  std::uint32_t finish_data(const HashPolicy& policy, Vpn vpn, std::uint64_t offset, Ppn resolved,
                            Hierarchy& hierarchy, Cycle walk_end, SpecOutcome& out);

  SpecConfig config_;
  SpecMode mode_;
  SpecState state_;
};

}  // namespace pasim
