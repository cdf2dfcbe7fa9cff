#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "cache_hierarchy.hpp"
#include "spec_engine.hpp"
#include "tlb_mmu.hpp"
#include "trace.hpp"

namespace pasim {

enum class SimMode { Native, Nested, SpeculationOff, PerfectSpeculation };

const char* to_string(SimMode mode);
SimMode parse_mode(std::string_view text);

enum class TraceKind { Uniform, Zipf, Sequential, PointerChase };

const char* to_string(TraceKind kind);

struct SimConfig {
  std::uint64_t seed = 1;
  SimMode mode = SimMode::Native;

  std::uint64_t total_frames = 1ull << 20;  // 4 GB of 4 KB frames
  double pressure = 0.0;
  bool clustered_fragmentation = false;
  std::uint64_t cluster_run = 64;
  std::uint64_t guest_frames = 0;  // nested mode; 0 = total_frames

  unsigned policy_tiers = 6;
  std::uint64_t policy_master_seed = 0x5eed;

  SpecConfig spec;  // spec.n_max == 0 here means "policy_tiers"
  MmuConfig mmu;
  HierarchyConfig hierarchy;

  std::string trace_path;  // empty: synthesize from the fields below
  TraceKind trace_kind = TraceKind::Uniform;
  std::uint64_t trace_pages = 16384;
  std::uint64_t trace_accesses = 100000;
  double trace_zipf_s = 0.99;
  std::uint64_t trace_instr_per_access = 10;
  std::uint64_t trace_seed = 0;  // 0 = derive from seed

  std::uint64_t warmup_accesses = 0;
  bool record_series = false;
  bool record_resolutions = false;

  SimConfig() { spec.n_max = 0; }

  /// Effective speculation degree ceiling.
  unsigned n_max() const { return spec.n_max == 0 ? policy_tiers : spec.n_max; }
  /// Throws InvalidConfig on any inconsistency.
  void validate() const;

  /// `key = value` assignment; throws InvalidConfig on unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;
  /// Applies a line-oriented `key = value` file; `#` starts a comment.
  void load(std::istream& in);
  /// Every key with its current value, one `key = value` per line.
  std::string dump() const;
  static std::vector<std::string> keys();
};

}  // namespace pasim
