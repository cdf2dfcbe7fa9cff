#include "simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>

#include "rng.hpp"

namespace pasim {

double RunStats::l2_tlb_mpki() const { return mpki(l2_tlb_misses, instructions); }

namespace {
double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

double RunStats::avg_walk_latency() const { return ratio(walk_latency_sum, walks); }
double RunStats::avg_translation_latency() const { return ratio(translation_latency_sum, accesses); }
double RunStats::avg_memory_access_latency() const { return ratio(memory_latency_sum, accesses); }
double RunStats::spec_data_hit_rate() const { return ratio(spec_data_hits, walks); }
double RunStats::hash_allocated_walk_fraction() const { return ratio(walks_on_hashed_pages, walks); }
double RunStats::model_alloc_success() const { return AnalyticModel{pressure, tiers}.success_probability(); }
double RunStats::measured_alloc_success() const {
  return pages_by_tier.empty() ? 0.0 : 1.0 - ratio(pages_by_tier.back(), pages_mapped);
}

namespace {

SpecConfig effective_spec(const SimConfig& c) {
  c.validate();
  SpecConfig s = c.spec;
  s.n_max = c.n_max();
  return s;
}

SpecMode engine_mode(SimMode mode) {
  switch (mode) {
    case SimMode::SpeculationOff: return SpecMode::Off;
    case SimMode::PerfectSpeculation: return SpecMode::Perfect;
    default: return SpecMode::Hashed;
  }
}

}  // namespace

Simulator::Simulator(const SimConfig& config)
    : config_(config),
      mem_(config.total_frames),
      policy_(config.policy_tiers, config.policy_master_seed, config.total_frames),
      mmu_(config.mmu),
      hierarchy_(config.hierarchy),
      engine_(effective_spec(config), engine_mode(config.mode), config.policy_tiers) {
  const std::uint64_t mem_seed = derive_seed(config.seed, 1);
  if (config.clustered_fragmentation) {
    mem_.inject_clustered_pressure(config.pressure, config.cluster_run, mem_seed);
  } else {
    mem_.inject_pressure(config.pressure, mem_seed);
  }
  if (config.mode == SimMode::Nested) {
    const std::uint64_t guest_frames = config.guest_frames ? config.guest_frames : config.total_frames;
    nested_ = std::make_unique<NestedPageTable>(
        guest_frames, HashPolicy(config.policy_tiers, splitmix64(config.policy_master_seed), guest_frames));
  }

  stats_.mode = config.mode;
  stats_.pressure = config.pressure;
  stats_.tiers = config.policy_tiers;
  stats_.n_max = config.n_max();
  stats_.filter = config.spec.filter_enabled;
  stats_.seed = config.seed;
  stats_.tier_confirmations.assign(config.policy_tiers, 0);
  stats_.pages_by_tier.assign(config.policy_tiers + 1, 0);
  stats_.pt_frames_by_tier.assign(config.policy_tiers + 1, 0);
}

void Simulator::step(const TraceEvent& event) {
  if (const auto* d = std::get_if<InstrDelta>(&event)) {
    now_ += d->count;
    // Instructions leading up to a measured access count toward it.
    if (seen_accesses_ >= config_.warmup_accesses) stats_.instructions += d->count;
    return;
  }
  const std::uint64_t va = std::holds_alternative<Load>(event) ? std::get<Load>(event).va : std::get<Store>(event).va;
  access(va);
}

void Simulator::start_measuring() {
  demand_fills_at_start_ = hierarchy_.counters().dram_fills_demand;
  spec_fills_at_start_ = hierarchy_.counters().dram_fills_speculative;
}

void Simulator::access(std::uint64_t va) {
  ++seen_accesses_;
  if (seen_accesses_ == config_.warmup_accesses + 1) start_measuring();
  const bool measure = measuring();

  const Vpn vpn = Vpn::from_address(va);
  const std::uint64_t offset = page_offset(va);
  const bool is_nested = nested_ != nullptr;

  // First touch: the page fault handler maps the page at zero simulated cost.
  if (is_nested ? !nested_->mapped(vpn) : !table_.mapped(vpn)) {
    const MapResult m = is_nested ? nested_->map_page(mem_, policy_, vpn) : table_.map_page(mem_, policy_, vpn);
    ++stats_.pages_mapped;
    ++stats_.pages_by_tier[m.data.hashed() ? m.data.tier - 1 : config_.policy_tiers];
    if (m.leaf_pt) ++stats_.pt_frames_by_tier[m.leaf_pt->hashed() ? m.leaf_pt->tier - 1 : config_.policy_tiers];
  }
  const AllocationOutcome& truth = is_nested ? nested_->mapping(vpn) : table_.mapping(vpn);

  const TlbLookup lookup = mmu_.tlb_lookup(vpn);
  std::uint64_t translation = lookup.latency;
  std::uint64_t data = 0;
  Ppn ppn;

  if (lookup.hit()) {
    ppn = *lookup.ppn;
    data = hierarchy_.access(ppn.base_address() + offset, now_ + translation, AccessKind::Demand).latency;
    if (measure) (lookup.level == TlbLookup::Level::L1 ? stats_.l1_tlb_hits : stats_.l2_tlb_hits) += 1;
  } else {
    const Cycle walk_start = now_ + translation;
    const MissRecord rec =
        is_nested ? engine_.translate_nested(policy_, *nested_, mmu_, hierarchy_, vpn, offset, walk_start)
                  : engine_.translate(policy_, table_, mmu_, hierarchy_, vpn, offset, walk_start);
    ppn = rec.walk.ppn;
    translation += rec.walk.latency;
    data = rec.data_latency;
    mmu_.tlb_insert(vpn, ppn);
    if (measure) {
      ++stats_.l2_tlb_misses;
      ++stats_.walks;
      stats_.walk_latency_sum += rec.walk.latency;
      walk_latencies_.push_back(rec.walk.latency);
      stats_.spec_data_issued += rec.spec.data_issued;
      stats_.spec_pt_issued += rec.spec.pt_issued;
      stats_.spec_data_hits += rec.spec.hit_tier ? 1 : 0;
      stats_.spec_pt_hits += rec.spec.pt_hit ? 1 : 0;
      stats_.wasted_fetches += rec.spec.wasted_fetches;
      stats_.walks_on_hashed_pages += truth.hashed() ? 1 : 0;
      if (config_.record_series && engine_.mode() == SpecMode::Hashed) {
        stats_.series.push_back({walk_start, rec.bw_ewma, rec.utilization, rec.n_eff});
      }
    }
  }
  if (ppn != truth.ppn) throw Error(ErrorCode::PageFault, "translation disagrees with the page table");

  if (measure) {
    ++stats_.accesses;
    stats_.translation_latency_sum += translation;
    stats_.memory_latency_sum += translation + data;
    if (config_.record_resolutions) stats_.resolved_ppns.push_back(ppn.index);
  }
  now_ += translation + data;
}

RunStats Simulator::finish() {
  RunStats out = stats_;
  out.cycles = now_;
  const SpecState& st = engine_.state();
  for (std::size_t i = 0; i < out.tier_confirmations.size() && i < st.tier_success.size(); ++i) {
    out.tier_confirmations[i] = st.tier_success[i];
  }
  out.fallback_confirmations = st.fallback_count;
  const auto& hc = hierarchy_.counters();
  if (seen_accesses_ > config_.warmup_accesses) {
    out.dram_bytes_demand = (hc.dram_fills_demand - demand_fills_at_start_) * kLineSize;
    out.dram_bytes_speculative = (hc.dram_fills_speculative - spec_fills_at_start_) * kLineSize;
  }
  out.final_bw_ewma = hierarchy_.meter().ewma();

  if (!walk_latencies_.empty()) {
    std::vector<std::uint32_t> sorted = walk_latencies_;
    std::sort(sorted.begin(), sorted.end());
    auto pct = [&](double q) {
      const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size()))) - 1;
      return static_cast<std::uint64_t>(sorted[std::min(idx, sorted.size() - 1)]);
    };
    out.walk_p50 = pct(0.50);
    out.walk_p95 = pct(0.95);
    out.walk_p99 = pct(0.99);
  }
  return out;
}

std::vector<TraceEvent> generate_trace(const SimConfig& config) {
  GeneratorOptions opts;
  opts.pages = config.trace_pages;
  opts.accesses = config.trace_accesses;
  opts.seed = config.trace_seed ? config.trace_seed : derive_seed(config.seed, 2);
  opts.instr_per_access = config.trace_instr_per_access;
  switch (config.trace_kind) {
    case TraceKind::Uniform: return gen_uniform(opts);
    case TraceKind::Zipf: return gen_zipf(opts, config.trace_zipf_s);
    case TraceKind::Sequential: return gen_sequential(opts);
    case TraceKind::PointerChase: return gen_pointer_chase(opts);
  }
  return {};
}

RunStats run(const SimConfig& config, const std::vector<TraceEvent>& trace) {
  Simulator sim(config);
  for (const auto& e : trace) sim.step(e);
  return sim.finish();
}

RunStats run(const SimConfig& config) {
  config.validate();
  if (config.trace_path.empty()) return run(config, generate_trace(config));
  std::ifstream in(config.trace_path);
  if (!in) throw Error(ErrorCode::Trace, "cannot open trace '" + config.trace_path + "'");
  Simulator sim(config);
  read_trace(in, [&](const TraceEvent& e) {
    sim.step(e);
    return true;
  });
  return sim.finish();
}

SweepAxis parse_axis(std::string_view text) {
  for (SweepAxis a : {SweepAxis::Pressure, SweepAxis::NMax, SweepAxis::Bandwidth}) {
    if (text == to_string(a)) return a;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown sweep axis '" + std::string(text) + "'");
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Pressure: return "pressure";
    case SweepAxis::NMax: return "n_max";
    case SweepAxis::Bandwidth: return "bandwidth";
  }
  return "?";
}

SimConfig apply_axis(const SimConfig& base, SweepAxis axis, double value) {
  SimConfig c = base;
  switch (axis) {
    case SweepAxis::Pressure:
      c.pressure = value;
      break;
    case SweepAxis::NMax: {
      if (!(value >= 1.0) || value != std::floor(value)) {
        throw Error(ErrorCode::InvalidConfig, "n_max sweep values must be integers >= 1");
      }
      const auto n = static_cast<unsigned>(value);
      c.policy_tiers = n;
      c.spec.n_max = n;
      c.spec.k_pt = std::min(c.spec.k_pt, n);
      break;
    }
    case SweepAxis::Bandwidth:
      c.hierarchy.peak_bytes_per_cycle = value;
      break;
  }
  c.validate();
  return c;
}

std::vector<RunStats> sweep(const SimConfig& base, SweepAxis axis, const std::vector<double>& values,
                            unsigned threads) {
  std::vector<SimConfig> configs;
  configs.reserve(values.size());
  for (const double v : values) configs.push_back(apply_axis(base, axis, v));

  std::vector<RunStats> out(values.size());
  const unsigned width = std::max(1u, threads);
  for (std::size_t begin = 0; begin < configs.size(); begin += width) {
    const std::size_t end = std::min(configs.size(), begin + width);
    std::vector<std::future<RunStats>> batch;
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred,
                                 [&configs, i] { return run(configs[i]); }));
    }
    for (std::size_t i = begin; i < end; ++i) out[i] = batch[i - begin].get();
  }
  return out;
}

}  // namespace pasim
