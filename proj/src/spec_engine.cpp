#include "spec_engine.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace pasim {

void SpecConfig::validate(unsigned policy_tiers) const {
  if (n_max == 0 || n_max > policy_tiers) {
    throw Error(ErrorCode::InvalidConfig, "spec.n_max must lie in [1, policy.n]");
  }
  if (k_pt == 0 || k_pt > n_max) throw Error(ErrorCode::InvalidConfig, "spec.k_pt must lie in [1, spec.n_max]");
  if (!(theta > 0.0 && theta <= 1.0)) throw Error(ErrorCode::InvalidConfig, "spec.theta must lie in (0,1]");
  if (!(bw_lo >= 0.0 && bw_lo < bw_hi && bw_hi <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "bandwidth watermarks need 0 <= spec.bw_lo < spec.bw_hi <= 1");
  }
}

SpecState::SpecState(unsigned policy_tiers, unsigned n_max) : tier_success(policy_tiers, 0), n_eff(n_max) {}

std::vector<std::uint64_t> generate_candidates(const HashPolicy& policy, Vpn vpn, std::uint64_t offset, unsigned n_eff) {
  std::vector<std::uint64_t> out;
  out.reserve(n_eff);
  for (unsigned tier = 1; tier <= n_eff; ++tier) {
    out.push_back(policy.hash(tier, vpn).base_address() + page_offset(offset));
  }
  return out;
}

std::vector<std::uint64_t> generate_pt_candidates(const HashPolicy& policy, Vpn vpn, unsigned k_pt) {
  std::vector<std::uint64_t> out;
  out.reserve(k_pt);
  for (unsigned tier = 1; tier <= k_pt; ++tier) {
    out.push_back(pt_entry_address(policy.hash(tier, vpn.value >> 9), vpn));
  }
  return out;
}

unsigned pressure_target(const SpecState& state, const SpecConfig& config) {
  const std::uint64_t total =
      std::accumulate(state.tier_success.begin(), state.tier_success.end(), state.fallback_count);
  if (total == 0) return config.n_max;
  std::uint64_t covered = 0;
  const unsigned limit = std::min<unsigned>(config.n_max, static_cast<unsigned>(state.tier_success.size()));
  for (unsigned n = 1; n <= limit; ++n) {
    covered += state.tier_success[n - 1];
    if (static_cast<double>(covered) >= config.theta * static_cast<double>(total)) return n;
  }
  return config.n_max;
}

unsigned choose_degree(SpecState& state, const SpecConfig& config, double bw_utilization) {
  if (!config.filter_enabled) {
    state.n_eff = config.n_max;
    return state.n_eff;
  }
  const unsigned target = pressure_target(state, config);
  if (bw_utilization > config.bw_hi) {
    if (state.n_eff > 0) --state.n_eff;
  } else if (bw_utilization < config.bw_lo) {
    state.n_eff = std::min(state.n_eff + 1, target);
  }
  return state.n_eff;
}

unsigned confirm(SpecState& state, const HashPolicy& policy, Vpn vpn, Ppn resolved) {
  const unsigned tiers = std::min<unsigned>(policy.tier_count(), static_cast<unsigned>(state.tier_success.size()));
  for (unsigned tier = 1; tier <= tiers; ++tier) {
    if (policy.hash(tier, vpn) == resolved) {
      ++state.tier_success[tier - 1];
      return tier;
    }
  }
  ++state.fallback_count;
  return 0;
}

SpeculationEngine::SpeculationEngine(const SpecConfig& config, SpecMode mode, unsigned policy_tiers)
    : config_(config), mode_(mode), state_(policy_tiers, config.n_max) {
  config_.validate(policy_tiers);
}

unsigned SpeculationEngine::next_degree(Hierarchy& hierarchy, Cycle now, MissRecord& rec) {
  rec.bw_ewma = hierarchy.meter().record_utilization(now);
  rec.utilization = hierarchy.meter().utilization();
  return choose_degree(state_, config_, rec.utilization);
}

void SpeculationEngine::issue_data(const HashPolicy& policy, Vpn vpn, std::uint64_t offset, unsigned n_eff,
                                   std::optional<Ppn> perfect, Hierarchy& hierarchy, Cycle now, SpecOutcome& out) {
  std::vector<std::uint64_t> addrs;
  if (perfect) {
    addrs.push_back(perfect->base_address() + page_offset(offset));
  } else {
    addrs = generate_candidates(policy, vpn, offset, n_eff);
  }
  unsigned tier = 1;
  for (const std::uint64_t a : addrs) {
    out.issued.push_back({a, tier++, false, hierarchy.completes_at(a, now, AccessKind::Speculative)});
    ++out.data_issued;
  }
}

std::uint32_t SpeculationEngine::finish_data(const HashPolicy& policy, Vpn vpn, std::uint64_t offset, Ppn resolved,
                                             Hierarchy& hierarchy, Cycle walk_end, SpecOutcome& out) {
  const std::uint64_t paddr = resolved.base_address() + page_offset(offset);
  for (const auto& f : out.issued) {
    if (!f.page_table && f.paddr == paddr) {
      out.hit_tier = f.tier;
      break;
    }
  }
  out.wasted_fetches = out.data_issued - (out.hit_tier ? 1u : 0u);
  if (mode_ == SpecMode::Hashed) confirm(state_, policy, vpn, resolved);
  // A correct candidate is still in flight or already in L2; the hierarchy's
  // in-flight tracking yields max(remaining fetch time, L2 hit latency).
  return hierarchy.access(paddr, walk_end, AccessKind::Demand).latency;
}

MissRecord SpeculationEngine::translate(const HashPolicy& policy, const RadixPageTable& table, MmuState& mmu,
                                        Hierarchy& hierarchy, Vpn vpn, std::uint64_t offset, Cycle walk_start) {
  MissRecord rec;
  if (mode_ == SpecMode::Off) {
    rec.walk = walk(table, vpn, mmu, hierarchy, walk_start);
    const std::uint64_t paddr = rec.walk.ppn.base_address() + page_offset(offset);
    rec.data_latency = hierarchy.access(paddr, walk_start + rec.walk.latency, AccessKind::Demand).latency;
    return rec;
  }

  const bool perfect = mode_ == SpecMode::Perfect;
  if (config_.data_enabled) {
    rec.n_eff = perfect ? 1 : next_degree(hierarchy, walk_start, rec);
  }

  LeafSpeculation leaf_spec;
  if (config_.pt_enabled) {
    std::vector<std::uint64_t> addrs;
    if (perfect) {
      addrs.push_back(pt_entry_address(*table.table_frame(1, vpn), vpn));
    } else {
      addrs = generate_pt_candidates(policy, vpn, config_.k_pt);
    }
    unsigned tier = 1;
    for (const std::uint64_t a : addrs) {
      const Cycle ready = hierarchy.completes_at(a, walk_start, AccessKind::Speculative);
      rec.spec.issued.push_back({a, tier++, true, ready});
      leaf_spec.candidates.push_back({Ppn{a >> kPageShift}, ready});
      ++rec.spec.pt_issued;
    }
  }
  if (config_.data_enabled) {
    std::optional<Ppn> truth;
    if (perfect) truth = table.mapping(vpn).ppn;
    issue_data(policy, vpn, offset, rec.n_eff, truth, hierarchy, walk_start, rec.spec);
  }

  rec.walk = walk(table, vpn, mmu, hierarchy, walk_start, config_.pt_enabled ? &leaf_spec : nullptr);
  rec.spec.pt_hit = rec.walk.steps.back().source == WalkSource::Speculated;
  rec.data_latency =
      finish_data(policy, vpn, offset, rec.walk.ppn, hierarchy, walk_start + rec.walk.latency, rec.spec);
  return rec;
}

MissRecord SpeculationEngine::translate_nested(const HashPolicy& host_policy, const NestedPageTable& table,
                                               MmuState& mmu, Hierarchy& hierarchy, Vpn gvpn, std::uint64_t offset,
                                               Cycle walk_start) {
  MissRecord rec;
  const bool speculate = mode_ != SpecMode::Off && config_.data_enabled;
  if (speculate) {
    const bool perfect = mode_ == SpecMode::Perfect;
    rec.n_eff = perfect ? 1 : next_degree(hierarchy, walk_start, rec);
    std::optional<Ppn> truth;
    if (perfect) truth = table.mapping(gvpn).ppn;
    issue_data(host_policy, gvpn, offset, rec.n_eff, truth, hierarchy, walk_start, rec.spec);
  }
  rec.walk = nested_walk(table, gvpn, mmu, hierarchy, walk_start);
  const Cycle walk_end = walk_start + rec.walk.latency;
  if (speculate) {
    rec.data_latency = finish_data(host_policy, gvpn, offset, rec.walk.ppn, hierarchy, walk_end, rec.spec);
  } else {
    const std::uint64_t paddr = rec.walk.ppn.base_address() + page_offset(offset);
    rec.data_latency = hierarchy.access(paddr, walk_end, AccessKind::Demand).latency;
  }
  return rec;
}

}  // namespace pasim
