#pragma once

#include <cstdint>
#include <unordered_map>

#include "set_assoc_cache.hpp"
#include "tlb_mmu.hpp"
#include "types.hpp"

namespace pasim {

enum class AccessKind { Demand, Walk, Speculative };

/// Where an access was served from.
enum class HitLevel { L1, L2, Llc, Dram };

const char* to_string(HitLevel level);

struct HierarchyConfig {
  CacheGeometry l1d{512, 8, 4};     // 32 KB / 64 B lines
  CacheGeometry l2{16384, 16, 12};  // 1 MB
  CacheGeometry llc{32768, 16, 35}; // 2 MB
  std::uint32_t dram_latency = 120;
  // DDR4-2400 single channel (19.2 GB/s) at a 2.9 GHz core clock. 0 = unlimited.
  double peak_bytes_per_cycle = 19.2 / 2.9;
  std::uint64_t window_cycles = 1024;
  double ewma_alpha = 1.0 / 16.0;

  void validate() const;
};

/// Windowed DRAM traffic meter with an exponentially weighted utilization.
class BandwidthMeter {
 public:
  BandwidthMeter(std::uint64_t window_cycles, double peak_bytes_per_cycle, double alpha);

  void charge(std::uint64_t bytes, Cycle now);
  /// Folds every window that closed before `now` into the EWMA and returns it (unclamped).
  double record_utilization(Cycle now);
  double ewma() const { return ewma_; }
  /// EWMA clamped to [0,1], the value the speculation filter acts on.
  double utilization() const { return ewma_ < 0.0 ? 0.0 : (ewma_ > 1.0 ? 1.0 : ewma_); }
  std::uint64_t window_cycles() const { return window_; }

 private:
  void advance(Cycle now);

  std::uint64_t window_;
  double peak_;
  double alpha_;
  std::uint64_t current_window_ = 0;
  std::uint64_t bytes_in_window_ = 0;
  double ewma_ = 0.0;
};

struct AccessResult {
  std::uint32_t latency;
  HitLevel level;
};

struct HierarchyCounters {
  std::uint64_t accesses[3][4] = {};  // [kind][level]
  std::uint64_t dram_fills_demand = 0;  // demand + walk
  std::uint64_t dram_fills_speculative = 0;
  std::uint64_t bytes_demand() const { return dram_fills_demand * kLineSize; }
  std::uint64_t bytes_speculative() const { return dram_fills_speculative * kLineSize; }
};

/// L1D -> L2 -> LLC -> DRAM, probed serially. Fills are inclusive above the
/// hit level; speculative fills start at L2 so they never touch L1. DRAM is a
/// fixed latency plus queueing on a single channel that serves one line per
/// 64/peak cycles. A line still in flight from an earlier fill costs at least
/// its remaining time.
class Hierarchy {
 public:
  explicit Hierarchy(const HierarchyConfig& config = {});

  AccessResult access(std::uint64_t paddr, Cycle now, AccessKind kind);
  /// Issues the access at `issue_cycle` and returns when its data is available.
  Cycle completes_at(std::uint64_t paddr, Cycle issue_cycle, AccessKind kind) {
    return issue_cycle + access(paddr, issue_cycle, kind).latency;
  }

  /// Latency of an unqueued hit at each level (serial probe sums).
  std::uint32_t hit_latency(HitLevel level) const;

  BandwidthMeter& meter() { return meter_; }
  const BandwidthMeter& meter() const { return meter_; }
  const HierarchyCounters& counters() const { return counters_; }
  const SetAssocCache& l1() const { return l1_; }
  const SetAssocCache& l2() const { return l2_; }
  const SetAssocCache& llc() const { return llc_; }
  const HierarchyConfig& config() const { return config_; }

 private:
  std::uint32_t dram_access(Cycle now);

  HierarchyConfig config_;
  SetAssocCache l1_;
  SetAssocCache l2_;
  SetAssocCache llc_;
  BandwidthMeter meter_;
  double channel_free_at_ = 0.0;
  double service_cycles_ = 0.0;
  std::unordered_map<std::uint64_t, Cycle> in_flight_;
  std::size_t prune_threshold_ = 4096;
  HierarchyCounters counters_;
};

}  // namespace pasim
