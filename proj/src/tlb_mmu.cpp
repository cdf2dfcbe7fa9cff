#include "tlb_mmu.hpp"

#include <string>

namespace pasim {

namespace {
SetAssocCache make(const CacheGeometry& g) { return SetAssocCache(g.entries, g.ways, g.latency); }
}  // namespace

MmuState::MmuState(const MmuConfig& config)
    : l1_(make(config.l1_dtlb)),
      l2_(make(config.l2_tlb)),
      pwcs_{make(config.pwc), make(config.pwc), make(config.pwc)},
      ntlb_(make(config.ntlb)) {}

TlbLookup MmuState::tlb_lookup(Vpn vpn) {
  if (auto hit = l1_.lookup(vpn.value)) {
    ++counters_.l1_hits;
    return {TlbLookup::Level::L1, Ppn{*hit}, l1_.latency()};
  }
  const std::uint32_t both = l1_.latency() + l2_.latency();
  if (auto hit = l2_.lookup(vpn.value)) {
    ++counters_.l2_hits;
    l1_.insert(vpn.value, *hit);
    return {TlbLookup::Level::L2, Ppn{*hit}, both};
  }
  ++counters_.misses;
  return {TlbLookup::Level::Miss, std::nullopt, both};
}

void MmuState::tlb_insert(Vpn vpn, Ppn ppn) {
  l2_.insert(vpn.value, ppn.index);
  l1_.insert(vpn.value, ppn.index);
}

SetAssocCache& MmuState::pwc(unsigned level) {
  if (!has_pwc(level)) throw Error(ErrorCode::OutOfRange, "no page-walk cache for level " + std::to_string(level));
  return pwcs_[level - 2];
}

std::optional<Ppn> MmuState::pwc_lookup(unsigned level, std::uint64_t path) {
  if (auto hit = pwc(level).lookup(path)) return Ppn{*hit};
  return std::nullopt;
}

void MmuState::pwc_insert(unsigned level, std::uint64_t path, Ppn next_frame) {
  pwc(level).insert(path, next_frame.index);
}

std::optional<Ppn> MmuState::ntlb_lookup(std::uint64_t gppn) {
  if (auto hit = ntlb_.lookup(gppn)) return Ppn{*hit};
  return std::nullopt;
}

void MmuState::ntlb_insert(std::uint64_t gppn, Ppn hppn) { ntlb_.insert(gppn, hppn.index); }

double mpki(std::uint64_t misses, std::uint64_t instructions) {
  if (instructions == 0) {
    if (misses == 0) return 0.0;
    throw Error(ErrorCode::InvalidConfig, "MPKI needs a non-zero instruction count");
  }
  return 1000.0 * static_cast<double>(misses) / static_cast<double>(instructions);
}

}  // namespace pasim
