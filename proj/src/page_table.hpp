#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "cache_hierarchy.hpp"
#include "hash_policy.hpp"
#include "mem_model.hpp"
#include "tlb_mmu.hpp"
#include "types.hpp"

namespace pasim {

constexpr unsigned kLevels = 4;

/// 9-bit slice of `vpn` used to index the table at `level` (4 = root, 1 = leaf).
std::uint64_t level_index(Vpn vpn, unsigned level);

/// Byte address of the leaf entry for `vpn` inside leaf frame `pt_frame`.
constexpr std::uint64_t pt_entry_address(Ppn pt_frame, Vpn vpn) {
  return pt_frame.base_address() + (vpn.value % kEntriesPerTable) * kPteSize;
}

enum class WalkSource { Pwc, L1, L2, Llc, Dram, Speculated, Ntlb };

const char* to_string(WalkSource source);

/// One page-table-entry read performed by a walk.
struct WalkStep {
  unsigned level;           // 4..1 within its table
  bool host_dimension;      // nested walks: true for reads of the host (nested) table
  std::uint64_t entry_paddr;
  WalkSource source;
  std::uint32_t latency;
};

struct WalkResult {
  Ppn ppn;
  Ppn pt_frame;                    // leaf PT frame (host frame in nested mode)
  std::uint32_t latency = 0;
  std::uint32_t upper_latency = 0; // levels 4..2 (native walks)
  std::vector<WalkStep> steps;
  unsigned ntlb_hits = 0;
};

/// Frames of the leaf PT frame that were fetched speculatively, with their arrival cycle.
struct LeafSpeculation {
  struct Candidate {
    Ppn frame;
    Cycle ready;
  };
  std::vector<Candidate> candidates;
};

struct MapResult {
  AllocationOutcome data;
  std::optional<AllocationOutcome> leaf_pt;  // set when the leaf frame was created by this call
  std::vector<Ppn> new_table_frames;         // every PT frame claimed by this call
};

/// 4-level radix page table whose table frames are claimed from a PhysMem.
/// Entries hold only the next frame number (8 bytes each).
class RadixPageTable {
 public:
  /// Allocates missing table frames and the data page: the leaf PT frame via
  /// allocate_pt_frame, the data page via tiered_allocate, then any missing
  /// upper-level frames via fallback. Hashed placements are made first so the
  /// deterministic fallback frames never land on a frame the hashes target.
  MapResult map_page(PhysMem& mem, const HashPolicy& policy, Vpn vpn);

  /// Same as map_page but the data frame is chosen by `data_alloc`.
  MapResult map_page_with(PhysMem& mem, const HashPolicy& policy, Vpn vpn,
                          const std::function<AllocationOutcome()>& data_alloc);

  bool mapped(Vpn vpn) const { return mappings_.contains(vpn.value); }
  /// Throws PageFault for unmapped VPNs.
  const AllocationOutcome& mapping(Vpn vpn) const;
  std::optional<Ppn> table_frame(unsigned level, Vpn vpn) const;
  std::optional<AllocationOutcome> leaf_outcome(Vpn vpn) const;
  /// Physical byte address of the entry read at `level` when translating `vpn`.
  std::uint64_t entry_address(unsigned level, Vpn vpn) const;

  std::size_t mapped_pages() const { return mappings_.size(); }
  std::size_t table_frame_count() const;
  const std::unordered_map<std::uint64_t, AllocationOutcome>& mappings() const { return mappings_; }

  friend bool operator==(const RadixPageTable&, const RadixPageTable&) = default;

 private:
  std::optional<Ppn> root_;
  std::unordered_map<std::uint64_t, Ppn> l3_frames_;    // by vpn >> 27
  std::unordered_map<std::uint64_t, Ppn> l2_frames_;    // by vpn >> 18
  std::unordered_map<std::uint64_t, AllocationOutcome> leaf_frames_;  // by vpn >> 9
  std::unordered_map<std::uint64_t, AllocationOutcome> mappings_;     // by vpn
};

/// Native walk: four dependent entry reads from `start`. Levels 4..2 consult
/// their PWC first (2 cycles on a hit, nothing extra on a miss); the rest go
/// through the cache hierarchy as walk accesses. If `leaf_spec` holds the leaf
/// frame, the leaf read is replaced by waiting for that speculative fetch.
WalkResult walk(const RadixPageTable& table, Vpn vpn, MmuState& mmu, Hierarchy& hierarchy, Cycle start,
                const LeafSpeculation* leaf_spec = nullptr);

/// Guest table in guest-physical space plus the host (nested) table that maps
/// guest frames to host frames. Guest data pages receive host frames from the
/// host's tiered policy keyed by the guest VPN, so speculation can predict the
/// final host address directly from the gVPN.
class NestedPageTable {
 public:
  NestedPageTable(std::uint64_t guest_frames, HashPolicy guest_policy);

  MapResult map_page(PhysMem& host_mem, const HashPolicy& host_policy, Vpn gvpn);
  bool mapped(Vpn gvpn) const { return outcomes_.contains(gvpn.value); }
  const AllocationOutcome& mapping(Vpn gvpn) const;

  const RadixPageTable& guest() const { return guest_; }
  const RadixPageTable& host() const { return host_; }
  /// Host frame backing guest frame `gppn`.
  Ppn host_frame(std::uint64_t gppn) const { return host_.mapping(Vpn{gppn}).ppn; }

  friend bool operator==(const NestedPageTable& a, const NestedPageTable& b) {
    return a.guest_ == b.guest_ && a.host_ == b.host_ && a.outcomes_ == b.outcomes_;
  }

 private:
  PhysMem guest_mem_;
  HashPolicy guest_policy_;
  RadixPageTable guest_;
  RadixPageTable host_;
  std::unordered_map<std::uint64_t, AllocationOutcome> outcomes_;  // gvpn -> host data frame
};

/// Two-dimensional walk: for each guest level, translate the guest table
/// frame through the nTLB (a miss costs 4 host-table reads), then read the
/// guest entry; finally 4 host-table reads translate the data frame.
/// Produces between 8 and 24 entry reads. PWCs are not consulted.
WalkResult nested_walk(const NestedPageTable& table, Vpn gvpn, MmuState& mmu, Hierarchy& hierarchy, Cycle start);

}  // namespace pasim
