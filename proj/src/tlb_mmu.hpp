#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "set_assoc_cache.hpp"
#include "types.hpp"

namespace pasim {

struct CacheGeometry {
  std::size_t entries;
  std::size_t ways;
  std::uint32_t latency;
};

struct MmuConfig {
  CacheGeometry l1_dtlb{64, 4, 1};
  CacheGeometry l2_tlb{2048, 16, 12};
  CacheGeometry pwc{32, 4, 2};
  // Nested TLB (gPPN -> hPPN) for guest page-table frames; fully associative.
  CacheGeometry ntlb{64, 64, 1};
};

struct TlbLookup {
  enum class Level { L1, L2, Miss };
  Level level;
  std::optional<Ppn> ppn;
  std::uint32_t latency;

  bool hit() const { return level != Level::Miss; }
};

struct TlbCounters {
  std::uint64_t l1_hits = 0;
  std::uint64_t l2_hits = 0;
  std::uint64_t misses = 0;
  friend bool operator==(const TlbCounters&, const TlbCounters&) = default;
};

/// L1 DTLB, L2 TLB, one page-walk cache per non-leaf level, and the nested TLB.
/// Fill policy between TLB levels is inclusive-on-fill; inclusion is not enforced afterwards.
class MmuState {
 public:
  explicit MmuState(const MmuConfig& config = {});

  /// L1 then L2. Latency: 1 on L1 hit, 1+12 on L2 hit or miss. L2 hits are promoted into L1.
  TlbLookup tlb_lookup(Vpn vpn);
  void tlb_insert(Vpn vpn, Ppn ppn);

  /// Levels 4 (root), 3 and 2 have a PWC; the leaf level (1) has none.
  static bool has_pwc(unsigned level) { return level >= 2 && level <= 4; }
  std::optional<Ppn> pwc_lookup(unsigned level, std::uint64_t path);
  void pwc_insert(unsigned level, std::uint64_t path, Ppn next_frame);
  std::uint32_t pwc_latency() const { return pwcs_[0].latency(); }

  std::optional<Ppn> ntlb_lookup(std::uint64_t gppn);
  void ntlb_insert(std::uint64_t gppn, Ppn hppn);
  std::uint32_t ntlb_latency() const { return ntlb_.latency(); }

  const TlbCounters& counters() const { return counters_; }
  const SetAssocCache& l1_dtlb() const { return l1_; }
  const SetAssocCache& l2_tlb() const { return l2_; }

 private:
  SetAssocCache& pwc(unsigned level);

  SetAssocCache l1_;
  SetAssocCache l2_;
  std::array<SetAssocCache, 3> pwcs_;
  SetAssocCache ntlb_;
  TlbCounters counters_;
};

/// Misses per thousand instructions; 0 when there were no misses.
double mpki(std::uint64_t misses, std::uint64_t instructions);

}  // namespace pasim
