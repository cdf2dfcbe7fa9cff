#include "page_table.hpp"

#include <string>

namespace pasim {

std::uint64_t level_index(Vpn vpn, unsigned level) {
  if (level == 0 || level > kLevels) throw Error(ErrorCode::OutOfRange, "page-table level must lie in [1,4]");
  return (vpn.value >> (9 * (level - 1))) & (kEntriesPerTable - 1);
}

const char* to_string(WalkSource source) {
  switch (source) {
    case WalkSource::Pwc: return "PWC";
    case WalkSource::L1: return "L1";
    case WalkSource::L2: return "L2";
    case WalkSource::Llc: return "LLC";
    case WalkSource::Dram: return "DRAM";
    case WalkSource::Speculated: return "SPEC";
    case WalkSource::Ntlb: return "NTLB";
  }
  return "?";
}

namespace {

WalkSource source_of(HitLevel level) {
  switch (level) {
    case HitLevel::L1: return WalkSource::L1;
    case HitLevel::L2: return WalkSource::L2;
    case HitLevel::Llc: return WalkSource::Llc;
    case HitLevel::Dram: return WalkSource::Dram;
  }
  return WalkSource::Dram;
}

// Key identifying the table at `level` (the table the level's entries live in).
std::uint64_t table_key(unsigned level, Vpn vpn) { return vpn.value >> (9 * level); }

}  // namespace

MapResult RadixPageTable::map_page(PhysMem& mem, const HashPolicy& policy, Vpn vpn) {
  return map_page_with(mem, policy, vpn, [&] { return tiered_allocate(policy, mem, vpn); });
}

MapResult RadixPageTable::map_page_with(PhysMem& mem, const HashPolicy& policy, Vpn vpn,
                                        const std::function<AllocationOutcome()>& data_alloc) {
  if (vpn.value >> kVpnBits) throw Error(ErrorCode::OutOfRange, "VPN exceeds 36 bits");
  if (mapped(vpn)) throw Error(ErrorCode::AlreadyMapped, "VPN " + std::to_string(vpn.value) + " already mapped");

  MapResult result;
  const std::uint64_t leaf_key = table_key(1, vpn);
  if (!leaf_frames_.contains(leaf_key)) {
    const AllocationOutcome leaf = allocate_pt_frame(policy, mem, vpn);
    leaf_frames_.emplace(leaf_key, leaf);
    result.leaf_pt = leaf;
    result.new_table_frames.push_back(leaf.ppn);
  }
  result.data = data_alloc();

  if (!root_) {
    root_ = mem.fallback_alloc();
    result.new_table_frames.push_back(*root_);
  }
  if (!l3_frames_.contains(table_key(3, vpn))) {
    const Ppn f = mem.fallback_alloc();
    l3_frames_.emplace(table_key(3, vpn), f);
    result.new_table_frames.push_back(f);
  }
  if (!l2_frames_.contains(table_key(2, vpn))) {
    const Ppn f = mem.fallback_alloc();
    l2_frames_.emplace(table_key(2, vpn), f);
    result.new_table_frames.push_back(f);
  }
  mappings_.emplace(vpn.value, result.data);
  return result;
}

const AllocationOutcome& RadixPageTable::mapping(Vpn vpn) const {
  const auto it = mappings_.find(vpn.value);
  if (it == mappings_.end()) throw Error(ErrorCode::PageFault, "page fault on VPN " + std::to_string(vpn.value));
  return it->second;
}

std::optional<Ppn> RadixPageTable::table_frame(unsigned level, Vpn vpn) const {
  auto find = [&](const auto& m) -> std::optional<Ppn> {
    const auto it = m.find(table_key(level, vpn));
    if (it == m.end()) return std::nullopt;
    if constexpr (std::is_same_v<std::decay_t<decltype(it->second)>, Ppn>) {
      return it->second;
    } else {
      return it->second.ppn;
    }
  };
  switch (level) {
    case 4: return root_;
    case 3: return find(l3_frames_);
    case 2: return find(l2_frames_);
    case 1: return find(leaf_frames_);
    default: throw Error(ErrorCode::OutOfRange, "page-table level must lie in [1,4]");
  }
}

std::optional<AllocationOutcome> RadixPageTable::leaf_outcome(Vpn vpn) const {
  const auto it = leaf_frames_.find(table_key(1, vpn));
  if (it == leaf_frames_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t RadixPageTable::entry_address(unsigned level, Vpn vpn) const {
  const auto frame = table_frame(level, vpn);
  if (!frame) throw Error(ErrorCode::PageFault, "missing level-" + std::to_string(level) + " table");
  return frame->base_address() + level_index(vpn, level) * kPteSize;
}

std::size_t RadixPageTable::table_frame_count() const {
  return (root_ ? 1 : 0) + l3_frames_.size() + l2_frames_.size() + leaf_frames_.size();
}

WalkResult walk(const RadixPageTable& table, Vpn vpn, MmuState& mmu, Hierarchy& hierarchy, Cycle start,
                const LeafSpeculation* leaf_spec) {
  const AllocationOutcome& target = table.mapping(vpn);
  WalkResult result;
  result.ppn = target.ppn;
  result.pt_frame = *table.table_frame(1, vpn);
  result.steps.reserve(kLevels);

  Cycle t = start;
  for (unsigned level = kLevels; level >= 2; --level) {
    const std::uint64_t addr = table.entry_address(level, vpn);
    const std::uint64_t path = vpn.value >> (9 * (level - 1));
    WalkStep step{level, false, addr, WalkSource::Pwc, mmu.pwc_latency()};
    if (!mmu.pwc_lookup(level, path)) {
      const AccessResult r = hierarchy.access(addr, t, AccessKind::Walk);
      step.source = source_of(r.level);
      step.latency = r.latency;
      mmu.pwc_insert(level, path, *table.table_frame(level - 1, vpn));
    }
    t += step.latency;
    result.steps.push_back(step);
  }
  result.upper_latency = static_cast<std::uint32_t>(t - start);

  const std::uint64_t leaf_addr = pt_entry_address(result.pt_frame, vpn);
  WalkStep leaf{1, false, leaf_addr, WalkSource::Speculated, 0};
  bool overlapped = false;
  if (leaf_spec) {
    for (const auto& c : leaf_spec->candidates) {
      if (c.frame == result.pt_frame) {
        leaf.latency = c.ready > t ? static_cast<std::uint32_t>(c.ready - t) : 0;
        overlapped = true;
        break;
      }
    }
  }
  if (!overlapped) {
    const AccessResult r = hierarchy.access(leaf_addr, t, AccessKind::Walk);
    leaf.source = source_of(r.level);
    leaf.latency = r.latency;
  }
  t += leaf.latency;
  result.steps.push_back(leaf);
  result.latency = static_cast<std::uint32_t>(t - start);
  return result;
}

NestedPageTable::NestedPageTable(std::uint64_t guest_frames, HashPolicy guest_policy)
    : guest_mem_(guest_frames), guest_policy_(std::move(guest_policy)) {}

MapResult NestedPageTable::map_page(PhysMem& host_mem, const HashPolicy& host_policy, Vpn gvpn) {
  if (mapped(gvpn)) throw Error(ErrorCode::AlreadyMapped, "guest VPN " + std::to_string(gvpn.value) + " already mapped");
  MapResult guest = guest_.map_page(guest_mem_, guest_policy_, gvpn);

  // Back every new guest table frame with an ordinary host frame.
  for (const Ppn g : guest.new_table_frames) {
    host_.map_page_with(host_mem, host_policy, Vpn{g.index},
                        [&] { return AllocationOutcome{host_mem.fallback_alloc(), AllocationOutcome::kFallback}; });
  }
  // The data frame's host placement is hashed on the guest VPN.
  MapResult host = host_.map_page_with(host_mem, host_policy, Vpn{guest.data.ppn.index},
                                       [&] { return tiered_allocate(host_policy, host_mem, gvpn); });
  outcomes_.emplace(gvpn.value, host.data);

  MapResult result;
  result.data = host.data;
  result.leaf_pt = guest.leaf_pt;
  result.new_table_frames = std::move(guest.new_table_frames);
  return result;
}

const AllocationOutcome& NestedPageTable::mapping(Vpn gvpn) const {
  const auto it = outcomes_.find(gvpn.value);
  if (it == outcomes_.end()) throw Error(ErrorCode::PageFault, "page fault on guest VPN " + std::to_string(gvpn.value));
  return it->second;
}

namespace {

// Four host-table reads translating guest frame `gppn`; returns the host frame.
Ppn host_walk(const RadixPageTable& host, std::uint64_t gppn, Hierarchy& hierarchy, Cycle& t, WalkResult& out) {
  const Vpn key{gppn};
  for (unsigned level = kLevels; level >= 1; --level) {
    const std::uint64_t addr = host.entry_address(level, key);
    const AccessResult r = hierarchy.access(addr, t, AccessKind::Walk);
    out.steps.push_back({level, true, addr, source_of(r.level), r.latency});
    t += r.latency;
  }
  return host.mapping(key).ppn;
}

}  // namespace

WalkResult nested_walk(const NestedPageTable& table, Vpn gvpn, MmuState& mmu, Hierarchy& hierarchy, Cycle start) {
  const AllocationOutcome& target = table.mapping(gvpn);
  const RadixPageTable& guest = table.guest();
  const RadixPageTable& host = table.host();

  WalkResult result;
  result.steps.reserve(24);
  Cycle t = start;
  for (unsigned level = kLevels; level >= 1; --level) {
    const std::uint64_t gframe = guest.table_frame(level, gvpn)->index;
    Ppn hframe;
    if (auto hit = mmu.ntlb_lookup(gframe)) {
      hframe = *hit;
      t += mmu.ntlb_latency();
      ++result.ntlb_hits;
    } else {
      hframe = host_walk(host, gframe, hierarchy, t, result);
      mmu.ntlb_insert(gframe, hframe);
    }
    if (level == 1) result.pt_frame = hframe;
    const std::uint64_t addr = hframe.base_address() + level_index(gvpn, level) * kPteSize;
    const AccessResult r = hierarchy.access(addr, t, AccessKind::Walk);
    result.steps.push_back({level, false, addr, source_of(r.level), r.latency});
    t += r.latency;
  }
  const std::uint64_t gdata = guest.mapping(gvpn).ppn.index;
  result.ppn = host_walk(host, gdata, hierarchy, t, result);
  if (result.ppn != target.ppn) throw Error(ErrorCode::PageFault, "nested translation disagrees with host mapping");
  result.latency = static_cast<std::uint32_t>(t - start);
  return result;
}

}  // namespace pasim
