#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cache_hierarchy.hpp"
#include "config.hpp"
#include "hash_policy.hpp"
#include "mem_model.hpp"
#include "page_table.hpp"
#include "spec_engine.hpp"
#include "tlb_mmu.hpp"
#include "trace.hpp"

namespace pasim {

struct SeriesPoint {
  Cycle cycle;
  double ewma;         // raw
  double utilization;  // clamped, as seen by the filter
  unsigned n_eff;
};

struct RunStats {
  // Configuration echo.
  SimMode mode = SimMode::Native;
  double pressure = 0.0;
  unsigned tiers = 0;
  unsigned n_max = 0;
  bool filter = false;
  std::uint64_t seed = 0;

  std::uint64_t accesses = 0;
  std::uint64_t instructions = 0;
  std::uint64_t cycles = 0;
  std::uint64_t l1_tlb_hits = 0;
  std::uint64_t l2_tlb_hits = 0;
  std::uint64_t l2_tlb_misses = 0;
  std::uint64_t walks = 0;

  std::uint64_t walk_latency_sum = 0;
  std::uint64_t translation_latency_sum = 0;
  std::uint64_t memory_latency_sum = 0;
  std::uint64_t walk_p50 = 0;
  std::uint64_t walk_p95 = 0;
  std::uint64_t walk_p99 = 0;

  std::uint64_t spec_data_issued = 0;
  std::uint64_t spec_pt_issued = 0;
  std::uint64_t spec_data_hits = 0;
  std::uint64_t spec_pt_hits = 0;
  std::uint64_t wasted_fetches = 0;
  std::uint64_t walks_on_hashed_pages = 0;
  std::vector<std::uint64_t> tier_confirmations;  // tiers 1..N
  std::uint64_t fallback_confirmations = 0;

  std::uint64_t pages_mapped = 0;
  std::vector<std::uint64_t> pages_by_tier;      // tiers 1..N, then fallback
  std::vector<std::uint64_t> pt_frames_by_tier;  // leaf PT frames, same layout

  std::uint64_t dram_bytes_demand = 0;
  std::uint64_t dram_bytes_speculative = 0;
  double final_bw_ewma = 0.0;

  std::vector<SeriesPoint> series;            // per L2 TLB miss, when recorded
  std::vector<std::uint64_t> resolved_ppns;   // per access, when recorded

  double l2_tlb_mpki() const;
  double avg_walk_latency() const;
  double avg_translation_latency() const;
  double avg_memory_access_latency() const;
  double spec_data_hit_rate() const;
  double hash_allocated_walk_fraction() const;
  double model_alloc_success() const;
  double measured_alloc_success() const;
};

/// One simulated core: allocator, page table, MMU, caches and the speculation engine.
/// First touch of a page maps it at zero cycles; every access then translates
/// through the TLBs and, on an L2 TLB miss, the engine. Time advances by one
/// cycle per instruction plus each access's full latency.
class Simulator {
 public:
  explicit Simulator(const SimConfig& config);

  void step(const TraceEvent& event);
  RunStats finish();

  const SimConfig& config() const { return config_; }
  const PhysMem& mem() const { return mem_; }
  const HashPolicy& policy() const { return policy_; }
  const RadixPageTable& table() const { return table_; }
  const NestedPageTable* nested() const { return nested_.get(); }
  const SpeculationEngine& engine() const { return engine_; }
  const MmuState& mmu() const { return mmu_; }
  const Hierarchy& hierarchy() const { return hierarchy_; }
  Cycle now() const { return now_; }

 private:
  void access(std::uint64_t va);
  bool measuring() const { return seen_accesses_ > config_.warmup_accesses; }
  void start_measuring();

  SimConfig config_;
  PhysMem mem_;
  HashPolicy policy_;
  RadixPageTable table_;
  std::unique_ptr<NestedPageTable> nested_;
  MmuState mmu_;
  Hierarchy hierarchy_;
  SpeculationEngine engine_;

  Cycle now_ = 0;
  std::uint64_t seen_accesses_ = 0;
  std::uint64_t demand_fills_at_start_ = 0;
  std::uint64_t spec_fills_at_start_ = 0;
  std::vector<std::uint32_t> walk_latencies_;
  RunStats stats_;
};

/// Builds the configured trace (file or generator) and runs it to completion.
RunStats run(const SimConfig& config);
RunStats run(const SimConfig& config, const std::vector<TraceEvent>& trace);
/// The synthetic trace described by the config's trace.* keys.
std::vector<TraceEvent> generate_trace(const SimConfig& config);

enum class SweepAxis { Pressure, NMax, Bandwidth };
SweepAxis parse_axis(std::string_view text);
const char* to_string(SweepAxis axis);
/// Applies one axis value to a copy of `base`.
SimConfig apply_axis(const SimConfig& base, SweepAxis axis, double value);
/// One run per value, in parallel when `threads` > 1; results keep `values` order.
std::vector<RunStats> sweep(const SimConfig& base, SweepAxis axis, const std::vector<double>& values,
                            unsigned threads = 1);

}  // namespace pasim
