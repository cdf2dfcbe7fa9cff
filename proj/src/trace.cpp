#include "trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "rng.hpp"

namespace pasim {

namespace {

[[noreturn]] void parse_error(std::uint64_t line_no, std::string_view text, const char* why) {
  throw Error(ErrorCode::Trace,
              "trace line " + std::to_string(line_no) + ": " + why + " in '" + std::string(text) + "'");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::uint64_t parse_number(std::string_view field, int base, std::uint64_t line_no, std::string_view text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v, base);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    parse_error(line_no, text, "bad number");
  }
  return v;
}

}  // namespace

TraceEvent parse_line(std::string_view text, std::uint64_t line_no) {
  const std::string_view line = trim(text);
  if (line.size() < 3 || (line[1] != ' ' && line[1] != '\t')) parse_error(line_no, text, "malformed event");
  const char tag = line[0];
  const std::string_view field = trim(line.substr(2));
  switch (tag) {
    case 'I': {
      const std::uint64_t n = parse_number(field, 10, line_no, text);
      if (n == 0) parse_error(line_no, text, "instruction count must be >= 1");
      return InstrDelta{n};
    }
    case 'L':
    case 'S': {
      if (field.size() < 3 || field[0] != '0' || (field[1] != 'x' && field[1] != 'X')) {
        parse_error(line_no, text, "address needs a 0x prefix");
      }
      const std::uint64_t va = parse_number(field.substr(2), 16, line_no, text);
      if (va >> kVaBits) parse_error(line_no, text, "address exceeds 48 bits");
      if (tag == 'L') return Load{va};
      return Store{va};
    }
    default:
      parse_error(line_no, text, "unknown event tag");
  }
}

std::string format_event(const TraceEvent& event) {
  char buf[32];
  return std::visit(
      [&](const auto& e) -> std::string {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, InstrDelta>) {
          return "I " + std::to_string(e.count);
        } else {
          const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, e.va, 16);
          (void)ec;
          return std::string(std::is_same_v<T, Load> ? "L 0x" : "S 0x") + std::string(buf, ptr);
        }
      },
      event);
}

void read_trace(std::istream& in, const std::function<bool(const TraceEvent&)>& sink) {
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!sink(parse_line(t, line_no))) return;
  }
  if (in.bad()) throw Error(ErrorCode::Io, "trace read failed");
}

void write_trace(std::ostream& out, const std::vector<TraceEvent>& events) {
  for (const auto& e : events) out << format_event(e) << '\n';
}

namespace {

void check(const GeneratorOptions& opts) {
  if (opts.pages == 0) throw Error(ErrorCode::InvalidConfig, "trace.pages must be >= 1");
  if (opts.instr_per_access == 0) throw Error(ErrorCode::InvalidConfig, "trace.instr_per_access must be >= 1");
  if ((opts.base_va + opts.pages * kPageSize) >> kVaBits) {
    throw Error(ErrorCode::InvalidConfig, "trace region exceeds the 48-bit address space");
  }
}

void emit(std::vector<TraceEvent>& out, const GeneratorOptions& opts, std::uint64_t page, std::uint64_t offset) {
  out.push_back(InstrDelta{opts.instr_per_access});
  out.push_back(Load{opts.base_va + page * kPageSize + offset});
}

std::uint64_t random_line_offset(Rng& rng) { return uniform_below(rng, kPageSize / kLineSize) * kLineSize; }

}  // namespace

std::vector<TraceEvent> gen_uniform(const GeneratorOptions& opts) {
  check(opts);
  Rng rng(opts.seed);
  std::vector<TraceEvent> out;
  out.reserve(2 * opts.accesses);
  for (std::uint64_t i = 0; i < opts.accesses; ++i) {
    const std::uint64_t page = uniform_below(rng, opts.pages);
    emit(out, opts, page, random_line_offset(rng));
  }
  return out;
}

std::vector<TraceEvent> gen_zipf(const GeneratorOptions& opts, double s) {
  check(opts);
  if (!(s >= 0.0) || !std::isfinite(s)) throw Error(ErrorCode::InvalidConfig, "zipf exponent must be >= 0");
  Rng rng(opts.seed);
  std::vector<double> cdf(opts.pages);
  double acc = 0.0;
  for (std::uint64_t r = 0; r < opts.pages; ++r) {
    acc += std::pow(static_cast<double>(r + 1), -s);
    cdf[r] = acc;
  }
  std::vector<std::uint64_t> page_of_rank(opts.pages);
  std::iota(page_of_rank.begin(), page_of_rank.end(), 0);
  fisher_yates(std::span(page_of_rank), rng);

  std::vector<TraceEvent> out;
  out.reserve(2 * opts.accesses);
  for (std::uint64_t i = 0; i < opts.accesses; ++i) {
    const double u = unit_double(rng) * acc;
    auto rank = static_cast<std::uint64_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    rank = std::min(rank, opts.pages - 1);
    emit(out, opts, page_of_rank[rank], random_line_offset(rng));
  }
  return out;
}

std::vector<TraceEvent> gen_sequential(const GeneratorOptions& opts) {
  check(opts);
  std::vector<TraceEvent> out;
  out.reserve(2 * opts.accesses);
  for (std::uint64_t i = 0; i < opts.accesses; ++i) {
    const std::uint64_t pass = i / opts.pages;
    emit(out, opts, i % opts.pages, (pass * kLineSize) % kPageSize);
  }
  return out;
}

std::vector<TraceEvent> gen_pointer_chase(const GeneratorOptions& opts) {
  check(opts);
  Rng rng(opts.seed);
  // Sattolo's algorithm yields a single cycle covering every page.
  std::vector<std::uint64_t> next(opts.pages);
  std::iota(next.begin(), next.end(), 0);
  for (std::uint64_t i = opts.pages; i > 1; --i) {
    const std::uint64_t j = uniform_below(rng, i - 1);
    std::swap(next[i - 1], next[j]);
  }
  std::vector<TraceEvent> out;
  out.reserve(2 * opts.accesses);
  std::uint64_t page = 0;
  for (std::uint64_t i = 0; i < opts.accesses; ++i) {
    emit(out, opts, page, random_line_offset(rng));
    page = next[page];
  }
  return out;
}

}  // namespace pasim
