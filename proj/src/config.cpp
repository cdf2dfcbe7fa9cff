#include "config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

namespace pasim {

const char* to_string(SimMode mode) {
  switch (mode) {
    case SimMode::Native: return "native";
    case SimMode::Nested: return "nested";
    case SimMode::SpeculationOff: return "speculation-off";
    case SimMode::PerfectSpeculation: return "perfect-speculation";
  }
  return "?";
}

SimMode parse_mode(std::string_view text) {
  for (SimMode m : {SimMode::Native, SimMode::Nested, SimMode::SpeculationOff, SimMode::PerfectSpeculation}) {
    if (text == to_string(m)) return m;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown mode '" + std::string(text) + "'");
}

const char* to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::Uniform: return "uniform";
    case TraceKind::Zipf: return "zipf";
    case TraceKind::Sequential: return "sequential";
    case TraceKind::PointerChase: return "pointer-chase";
  }
  return "?";
}

namespace {

TraceKind parse_trace_kind(std::string_view text) {
  for (TraceKind k : {TraceKind::Uniform, TraceKind::Zipf, TraceKind::Sequential, TraceKind::PointerChase}) {
    if (text == to_string(k)) return k;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown trace kind '" + std::string(text) + "'");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::InvalidConfig, "bad value '" + std::string(value) + "' for " + std::string(key));
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  int base = 10;
  std::string_view digits = v;
  if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
    base = 16;
    digits.remove_prefix(2);
  }
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out, base);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) bad_value(key, v);
  return out;
}

unsigned to_unsigned(std::string_view key, std::string_view v) {
  const std::uint64_t x = to_u64(key, v);
  if (x > 0xffffffffull) bad_value(key, v);
  return static_cast<unsigned>(x);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty() || !std::isfinite(out)) bad_value(key, v);
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  bad_value(key, v);
}

std::string fmt_double(double d) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
  (void)ec;
  return std::string(buf, ptr);
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

struct Field {
  const char* key;
  std::function<void(SimConfig&, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get;
};

#define U64_FIELD(name, member) \
  Field{name, [](SimConfig& c, std::string_view v) { c.member = to_u64(name, v); }, \
        [](const SimConfig& c) { return std::to_string(c.member); }}
#define UINT_FIELD(name, member) \
  Field{name, [](SimConfig& c, std::string_view v) { c.member = to_unsigned(name, v); }, \
        [](const SimConfig& c) { return std::to_string(c.member); }}
#define DOUBLE_FIELD(name, member) \
  Field{name, [](SimConfig& c, std::string_view v) { c.member = to_double(name, v); }, \
        [](const SimConfig& c) { return fmt_double(c.member); }}
#define BOOL_FIELD(name, member) \
  Field{name, [](SimConfig& c, std::string_view v) { c.member = to_bool(name, v); }, \
        [](const SimConfig& c) { return fmt_bool(c.member); }}
// Data caches are configured in bytes and stored as 64-byte lines.
#define CACHE_BYTES_FIELD(name, member) \
  Field{name, [](SimConfig& c, std::string_view v) { c.member = to_u64(name, v) / kLineSize; }, \
        [](const SimConfig& c) { return std::to_string(c.member * kLineSize); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      U64_FIELD("seed", seed),
      Field{"mode", [](SimConfig& c, std::string_view v) { c.mode = parse_mode(v); },
            [](const SimConfig& c) { return std::string(to_string(c.mode)); }},
      U64_FIELD("mem.frames", total_frames),
      DOUBLE_FIELD("mem.pressure", pressure),
      Field{"mem.fragmentation",
            [](SimConfig& c, std::string_view v) {
              if (v == "uniform") {
                c.clustered_fragmentation = false;
              } else if (v == "clustered") {
                c.clustered_fragmentation = true;
              } else {
                bad_value("mem.fragmentation", v);
              }
            },
            [](const SimConfig& c) { return std::string(c.clustered_fragmentation ? "clustered" : "uniform"); }},
      U64_FIELD("mem.cluster_run", cluster_run),
      U64_FIELD("guest.frames", guest_frames),
      UINT_FIELD("policy.n", policy_tiers),
      U64_FIELD("policy.master_seed", policy_master_seed),
      UINT_FIELD("spec.n_max", spec.n_max),
      UINT_FIELD("spec.k_pt", spec.k_pt),
      BOOL_FIELD("spec.filter", spec.filter_enabled),
      DOUBLE_FIELD("spec.theta", spec.theta),
      DOUBLE_FIELD("spec.bw_hi", spec.bw_hi),
      DOUBLE_FIELD("spec.bw_lo", spec.bw_lo),
      BOOL_FIELD("spec.data", spec.data_enabled),
      BOOL_FIELD("spec.pt", spec.pt_enabled),
      U64_FIELD("tlb.l1_entries", mmu.l1_dtlb.entries),
      U64_FIELD("tlb.l1_ways", mmu.l1_dtlb.ways),
      UINT_FIELD("tlb.l1_latency", mmu.l1_dtlb.latency),
      U64_FIELD("tlb.l2_entries", mmu.l2_tlb.entries),
      U64_FIELD("tlb.l2_ways", mmu.l2_tlb.ways),
      UINT_FIELD("tlb.l2_latency", mmu.l2_tlb.latency),
      U64_FIELD("pwc.entries", mmu.pwc.entries),
      U64_FIELD("pwc.ways", mmu.pwc.ways),
      UINT_FIELD("pwc.latency", mmu.pwc.latency),
      U64_FIELD("ntlb.entries", mmu.ntlb.entries),
      U64_FIELD("ntlb.ways", mmu.ntlb.ways),
      UINT_FIELD("ntlb.latency", mmu.ntlb.latency),
      CACHE_BYTES_FIELD("cache.l1_bytes", hierarchy.l1d.entries),
      U64_FIELD("cache.l1_ways", hierarchy.l1d.ways),
      UINT_FIELD("cache.l1_latency", hierarchy.l1d.latency),
      CACHE_BYTES_FIELD("cache.l2_bytes", hierarchy.l2.entries),
      U64_FIELD("cache.l2_ways", hierarchy.l2.ways),
      UINT_FIELD("cache.l2_latency", hierarchy.l2.latency),
      CACHE_BYTES_FIELD("cache.llc_bytes", hierarchy.llc.entries),
      U64_FIELD("cache.llc_ways", hierarchy.llc.ways),
      UINT_FIELD("cache.llc_latency", hierarchy.llc.latency),
      UINT_FIELD("dram.latency", hierarchy.dram_latency),
      DOUBLE_FIELD("dram.peak_bytes_per_cycle", hierarchy.peak_bytes_per_cycle),
      U64_FIELD("bw.window_cycles", hierarchy.window_cycles),
      DOUBLE_FIELD("bw.alpha", hierarchy.ewma_alpha),
      Field{"trace.path", [](SimConfig& c, std::string_view v) { c.trace_path = std::string(v); },
            [](const SimConfig& c) { return c.trace_path; }},
      Field{"trace.kind", [](SimConfig& c, std::string_view v) { c.trace_kind = parse_trace_kind(v); },
            [](const SimConfig& c) { return std::string(to_string(c.trace_kind)); }},
      U64_FIELD("trace.pages", trace_pages),
      U64_FIELD("trace.accesses", trace_accesses),
      DOUBLE_FIELD("trace.zipf_s", trace_zipf_s),
      U64_FIELD("trace.instr_per_access", trace_instr_per_access),
      U64_FIELD("trace.seed", trace_seed),
      U64_FIELD("sim.warmup_accesses", warmup_accesses),
      BOOL_FIELD("sim.record_series", record_series),
  };
  return table;
}

#undef U64_FIELD
#undef UINT_FIELD
#undef DOUBLE_FIELD
#undef BOOL_FIELD
#undef CACHE_BYTES_FIELD

const Field& find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (key == f.key) return f;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown configuration key '" + std::string(key) + "'");
}

}  // namespace

void SimConfig::set(std::string_view key, std::string_view value) {
  find_field(trim(key)).set(*this, trim(value));
}

std::string SimConfig::get(std::string_view key) const { return find_field(trim(key)).get(*this); }

void SimConfig::load(std::istream& in) {
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view t = line;
    if (const auto hash = t.find('#'); hash != std::string_view::npos) t = t.substr(0, hash);
    t = trim(t);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    set(t.substr(0, eq), t.substr(eq + 1));
  }
}

std::string SimConfig::dump() const {
  std::ostringstream out;
  for (const auto& f : fields()) out << f.key << " = " << f.get(*this) << '\n';
  return out.str();
}

std::vector<std::string> SimConfig::keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.emplace_back(f.key);
  return out;
}

void SimConfig::validate() const {
  if (total_frames == 0) throw Error(ErrorCode::InvalidConfig, "mem.frames must be >= 1");
  if (!(pressure >= 0.0 && pressure <= 1.0)) throw Error(ErrorCode::InvalidConfig, "mem.pressure must lie in [0,1]");
  if (cluster_run == 0) throw Error(ErrorCode::InvalidConfig, "mem.cluster_run must be >= 1");
  if (policy_tiers == 0) throw Error(ErrorCode::InvalidConfig, "policy.n must be >= 1");
  SpecConfig effective = spec;
  effective.n_max = n_max();
  effective.validate(policy_tiers);
  hierarchy.validate();
  if (trace_path.empty()) {
    if (trace_pages == 0) throw Error(ErrorCode::InvalidConfig, "trace.pages must be >= 1");
    if (trace_instr_per_access == 0) throw Error(ErrorCode::InvalidConfig, "trace.instr_per_access must be >= 1");
    if (!(trace_zipf_s >= 0.0)) throw Error(ErrorCode::InvalidConfig, "trace.zipf_s must be >= 0");
  }
}

}  // namespace pasim
