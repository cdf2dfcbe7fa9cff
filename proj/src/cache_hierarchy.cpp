#include "cache_hierarchy.hpp"

#include <algorithm>
#include <cmath>

namespace pasim {

const char* to_string(HitLevel level) {
  switch (level) {
    case HitLevel::L1: return "L1";
    case HitLevel::L2: return "L2";
    case HitLevel::Llc: return "LLC";
    case HitLevel::Dram: return "DRAM";
  }
  return "?";
}

void HierarchyConfig::validate() const {
  if (!(peak_bytes_per_cycle >= 0.0) || !std::isfinite(peak_bytes_per_cycle)) {
    throw Error(ErrorCode::InvalidConfig, "peak bandwidth must be finite and >= 0");
  }
  if (window_cycles == 0) throw Error(ErrorCode::InvalidConfig, "bandwidth window must be >= 1 cycle");
  if (!(ewma_alpha > 0.0 && ewma_alpha <= 1.0)) throw Error(ErrorCode::InvalidConfig, "EWMA alpha must lie in (0,1]");
}

BandwidthMeter::BandwidthMeter(std::uint64_t window_cycles, double peak_bytes_per_cycle, double alpha)
    : window_(window_cycles), peak_(peak_bytes_per_cycle), alpha_(alpha) {
  if (window_ == 0) throw Error(ErrorCode::InvalidConfig, "bandwidth window must be >= 1 cycle");
}

void BandwidthMeter::advance(Cycle now) {
  const std::uint64_t w = now / window_;
  if (w <= current_window_) return;
  const double capacity = peak_ * static_cast<double>(window_);
  const double util = capacity > 0.0 ? static_cast<double>(bytes_in_window_) / capacity : 0.0;
  ewma_ += alpha_ * (util - ewma_);
  // Windows after the first closed one saw no traffic.
  const std::uint64_t idle = w - current_window_ - 1;
  if (idle > 0) ewma_ *= std::pow(1.0 - alpha_, static_cast<double>(idle));
  bytes_in_window_ = 0;
  current_window_ = w;
}

void BandwidthMeter::charge(std::uint64_t bytes, Cycle now) {
  advance(now);
  bytes_in_window_ += bytes;
}

double BandwidthMeter::record_utilization(Cycle now) {
  advance(now);
  return ewma_;
}

namespace {
SetAssocCache make(const CacheGeometry& g) { return SetAssocCache(g.entries, g.ways, g.latency); }
constexpr std::size_t kInFlightPruneThreshold = 4096;
}  // namespace

Hierarchy::Hierarchy(const HierarchyConfig& config)
    : config_(config),
      l1_(make(config.l1d)),
      l2_(make(config.l2)),
      llc_(make(config.llc)),
      meter_(config.window_cycles, config.peak_bytes_per_cycle, config.ewma_alpha) {
  config_.validate();
  service_cycles_ = config_.peak_bytes_per_cycle > 0.0 ? static_cast<double>(kLineSize) / config_.peak_bytes_per_cycle : 0.0;
}

std::uint32_t Hierarchy::hit_latency(HitLevel level) const {
  std::uint32_t lat = l1_.latency();
  if (level == HitLevel::L1) return lat;
  lat += l2_.latency();
  if (level == HitLevel::L2) return lat;
  lat += llc_.latency();
  if (level == HitLevel::Llc) return lat;
  return lat + config_.dram_latency;
}

std::uint32_t Hierarchy::dram_access(Cycle now) {
  const double t = static_cast<double>(now);
  const double start = std::max(t, channel_free_at_);
  channel_free_at_ = start + service_cycles_;
  return config_.dram_latency + static_cast<std::uint32_t>(std::ceil(start - t));
}

AccessResult Hierarchy::access(std::uint64_t paddr, Cycle now, AccessKind kind) {
  const std::uint64_t line = line_of(paddr);
  const bool speculative = kind == AccessKind::Speculative;

  HitLevel level;
  std::uint32_t latency;
  if (l1_.lookup(line)) {
    level = HitLevel::L1;
    latency = hit_latency(level);
  } else if (l2_.lookup(line)) {
    level = HitLevel::L2;
    latency = hit_latency(level);
    if (!speculative) l1_.insert(line, 0);
  } else if (llc_.lookup(line)) {
    level = HitLevel::Llc;
    latency = hit_latency(level);
    l2_.insert(line, 0);
    if (!speculative) l1_.insert(line, 0);
  } else {
    level = HitLevel::Dram;
    latency = hit_latency(HitLevel::Llc) + dram_access(now);
    llc_.insert(line, 0);
    l2_.insert(line, 0);
    if (!speculative) l1_.insert(line, 0);
    meter_.charge(kLineSize, now);
    if (speculative) {
      ++counters_.dram_fills_speculative;
    } else {
      ++counters_.dram_fills_demand;
    }
  }

  if (level != HitLevel::Dram) {
    if (auto it = in_flight_.find(line); it != in_flight_.end() && it->second > now) {
      latency = std::max<std::uint32_t>(latency, static_cast<std::uint32_t>(it->second - now));
    }
  } else {
    in_flight_[line] = now + latency;
    if (in_flight_.size() > prune_threshold_) {
      std::erase_if(in_flight_, [now](const auto& kv) { return kv.second <= now; });
      prune_threshold_ = std::max(kInFlightPruneThreshold, 2 * in_flight_.size());
    }
  }

  ++counters_.accesses[static_cast<int>(kind)][static_cast<int>(level)];
  return {latency, level};
}

}  // namespace pasim
