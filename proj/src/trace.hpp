#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "types.hpp"

namespace pasim {

struct InstrDelta {
  std::uint64_t count;
  friend bool operator==(const InstrDelta&, const InstrDelta&) = default;
};
struct Load {
  std::uint64_t va;
  friend bool operator==(const Load&, const Load&) = default;
};
struct Store {
  std::uint64_t va;
  friend bool operator==(const Store&, const Store&) = default;
};

using TraceEvent = std::variant<InstrDelta, Load, Store>;

/// Parses one non-comment line: `I <dec>`, `L 0x<hex>` or `S 0x<hex>`.
/// Errors carry `line_no` in the message.
TraceEvent parse_line(std::string_view text, std::uint64_t line_no = 0);
std::string format_event(const TraceEvent& event);

/// Streams events from `in`, skipping blank and `#` lines. Stops early if `sink` returns false.
void read_trace(std::istream& in, const std::function<bool(const TraceEvent&)>& sink);
void write_trace(std::ostream& out, const std::vector<TraceEvent>& events);

/// Base of the synthetic workloads' virtual region (page-table aligned at every level).
constexpr std::uint64_t kTraceBaseVa = 0x7f0000000000ull;

struct GeneratorOptions {
  std::uint64_t pages = 16384;
  std::uint64_t accesses = 100000;
  std::uint64_t seed = 1;
  std::uint64_t instr_per_access = 10;
  std::uint64_t base_va = kTraceBaseVa;
};

/// GUPS-style: uniformly random page, random line offset.
std::vector<TraceEvent> gen_uniform(const GeneratorOptions& opts);
/// Zipf(s) page popularity over a seeded permutation of the pages; s = 0 is uniform.
std::vector<TraceEvent> gen_zipf(const GeneratorOptions& opts, double s);
/// Pages in ascending order, one access per page per pass; the line advances each pass.
std::vector<TraceEvent> gen_sequential(const GeneratorOptions& opts);
/// Follows a single random cycle through all pages (Sattolo permutation).
std::vector<TraceEvent> gen_pointer_chase(const GeneratorOptions& opts);

}  // namespace pasim
