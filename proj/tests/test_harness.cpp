#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "report.hpp"
#include "simulator.hpp"

using namespace pasim;

namespace {

SimConfig small_config() {
  SimConfig c;
  c.total_frames = 1 << 16;
  c.trace_pages = 2048;
  c.trace_accesses = 20000;
  c.seed = 11;
  return c;
}

std::size_t count_char(const std::string& s, char ch) {
  std::size_t n = 0;
  for (char c : s) n += c == ch;
  return n;
}

}  // namespace

TEST_CASE("config set, get and dump round-trip") {
  SimConfig c;
  c.set("mem.pressure", "0.35");
  c.set(" policy.n ", " 4 ");
  c.set("mode", "nested");
  c.set("cache.l2_bytes", "524288");
  c.set("spec.filter", "off");
  CHECK(c.pressure == 0.35);
  CHECK(c.policy_tiers == 4);
  CHECK(c.mode == SimMode::Nested);
  CHECK(c.hierarchy.l2.entries == 524288 / 64);
  CHECK(c.get("cache.l2_bytes") == "524288");
  CHECK(c.get("spec.filter") == "false");
  CHECK(c.n_max() == 4);

  SimConfig back;
  std::istringstream in(c.dump());
  back.load(in);
  CHECK(back.dump() == c.dump());
  CHECK(SimConfig::keys().size() == static_cast<std::size_t>(count_char(c.dump(), '\n')));
}

TEST_CASE("config rejects bad keys and values") {
  SimConfig c;
  for (auto [k, v] : std::vector<std::pair<const char*, const char*>>{
           {"no.such.key", "1"}, {"policy.n", "x"}, {"mem.pressure", "abc"}, {"spec.filter", "maybe"},
           {"mode", "turbo"}, {"mem.fragmentation", "lumpy"}, {"trace.kind", "random"}}) {
    CAPTURE(k);
    try {
      c.set(k, v);
      FAIL("expected InvalidConfig");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidConfig);
    }
  }
  std::istringstream no_eq("seed 5\n");
  CHECK_THROWS_AS(c.load(no_eq), Error);
  std::istringstream comments("# comment\n\nseed = 5  # trailing\n");
  c.load(comments);
  CHECK(c.seed == 5);
}

TEST_CASE("config validation") {
  auto bad = [](auto mutate) {
    SimConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), Error);
  };
  SimConfig{}.validate();
  bad([](SimConfig& c) { c.pressure = 1.5; });
  bad([](SimConfig& c) { c.pressure = -0.1; });
  bad([](SimConfig& c) { c.total_frames = 0; });
  bad([](SimConfig& c) { c.policy_tiers = 0; });
  bad([](SimConfig& c) { c.spec.n_max = 9; });  // above the 6 tiers
  bad([](SimConfig& c) { c.trace_pages = 0; });
  bad([](SimConfig& c) { c.hierarchy.ewma_alpha = 2.0; });
}

TEST_CASE("runs are deterministic and counters are consistent") {
  const SimConfig c = small_config();
  const RunStats a = run(c);
  const RunStats b = run(c);
  CHECK(csv_row(a) == csv_row(b));

  CHECK(a.accesses == 20000);
  CHECK(a.instructions == 200000);
  CHECK(a.l1_tlb_hits + a.l2_tlb_hits + a.l2_tlb_misses == a.accesses);
  CHECK(a.walks == a.l2_tlb_misses);
  CHECK(a.pages_mapped <= 2048);
  std::uint64_t by_tier = 0;
  for (auto n : a.pages_by_tier) by_tier += n;
  CHECK(by_tier == a.pages_mapped);
  std::uint64_t confirmations = a.fallback_confirmations;
  for (auto n : a.tier_confirmations) confirmations += n;
  CHECK(confirmations == a.walks);
  CHECK(a.spec_data_hits <= a.walks_on_hashed_pages);
  CHECK(a.walk_p50 <= a.walk_p95);
  CHECK(a.walk_p95 <= a.walk_p99);
  CHECK(a.avg_memory_access_latency() >= a.avg_translation_latency());
  CHECK(a.l2_tlb_mpki() == doctest::Approx(1000.0 * a.l2_tlb_misses / a.instructions));

  SimConfig other = c;
  other.seed = 12;
  CHECK(csv_row(run(other)) != csv_row(a));
}

TEST_CASE("speculation never changes translations") {
  SimConfig c = small_config();
  c.pressure = 0.5;
  c.record_resolutions = true;
  SimConfig off = c;
  off.mode = SimMode::SpeculationOff;
  SimConfig perfect = c;
  perfect.mode = SimMode::PerfectSpeculation;
  const RunStats on = run(c), none = run(off), best = run(perfect);
  CHECK(on.resolved_ppns == none.resolved_ppns);
  CHECK(on.resolved_ppns == best.resolved_ppns);
  CHECK(on.l2_tlb_misses == none.l2_tlb_misses);
  CHECK(none.spec_data_issued == 0);
  CHECK(none.spec_pt_issued == 0);
  CHECK(best.spec_data_hits == best.walks);
  CHECK(best.wasted_fetches == 0);
}

TEST_CASE("perfect speculation is never slower than the walk alone") {
  SimConfig c = small_config();
  c.mode = SimMode::SpeculationOff;
  const RunStats off = run(c);
  c.mode = SimMode::PerfectSpeculation;
  const RunStats perfect = run(c);
  CHECK(perfect.avg_memory_access_latency() < off.avg_memory_access_latency());
}

TEST_CASE("warmup excludes early accesses from the counters") {
  SimConfig c = small_config();
  c.warmup_accesses = 5000;
  const RunStats s = run(c);
  CHECK(s.accesses == 15000);
  CHECK(s.l1_tlb_hits + s.l2_tlb_hits + s.l2_tlb_misses == 15000);
  CHECK(s.instructions == 150000);
}

TEST_CASE("nested mode translates the same pages") {
  SimConfig c = small_config();
  c.mode = SimMode::Nested;
  c.trace_accesses = 5000;
  const RunStats s = run(c);
  CHECK(s.accesses == 5000);
  CHECK(s.walks == s.l2_tlb_misses);
  CHECK(s.spec_pt_issued == 0);
}

TEST_CASE("uniform access over many pages misses the TLB more than a small sequential loop") {
  SimConfig gups = small_config();
  gups.trace_pages = 16384;
  SimConfig seq = small_config();
  seq.trace_kind = TraceKind::Sequential;
  seq.trace_pages = 1024;  // fits the 2048-entry L2 TLB
  CHECK(run(gups).l2_tlb_mpki() > run(seq).l2_tlb_mpki());
}

TEST_CASE("trace file errors surface as trace errors") {
  SimConfig c = small_config();
  c.trace_path = "/nonexistent/trace.txt";
  try {
    run(c);
    FAIL("expected a trace error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Trace);
  }
}

TEST_CASE("reports") {
  SimConfig c = small_config();
  c.trace_accesses = 3000;
  const RunStats s = run(c);
  const std::string header = csv_header();
  const std::string row = csv_row(s);
  CHECK(header.rfind("mode,pressure,tiers", 0) == 0);
  CHECK(count_char(header, ',') == count_char(row, ','));

  const std::vector<RunStats> runs = {s, s};
  const std::string csv = report(runs, ReportFormat::Csv);
  CHECK(csv == header + "\n" + row + "\n" + row + "\n");

  const std::string jl = report(runs, ReportFormat::JsonLines);
  std::istringstream lines(jl);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["accesses"] == 3000);
    CHECK(j["walks"] == s.walks);
    CHECK(j["mode"] == "native");
    ++n;
  }
  CHECK(n == 2);

  const std::string human = human_report(s);
  CHECK(human.find("model") != std::string::npos);
  CHECK(human.find("measured") != std::string::npos);
  CHECK_THROWS_AS(parse_format("xml"), Error);
  CHECK(parse_format("jsonl") == ReportFormat::JsonLines);
}

TEST_CASE("analytic report") {
  const std::string r = analytic_report(0.4, 3, 20000, 1 << 16, 1);
  CHECK(r.rfind("outcome,model,monte_carlo,count\n", 0) == 0);
  CHECK(r.find("tier1,0.600000,") != std::string::npos);
  CHECK(r.find("fallback,0.064000,") != std::string::npos);
  CHECK(r.find("success,0.936000,") != std::string::npos);
  CHECK(r.find("fit accepted") != std::string::npos);
}

TEST_CASE("sweeps keep value order and follow the model") {
  SimConfig c = small_config();
  c.policy_tiers = 3;
  const std::vector<double> ps = {0.0, 0.4, 0.8};
  const auto serial = sweep(c, SweepAxis::Pressure, ps, 1);
  const auto parallel = sweep(c, SweepAxis::Pressure, ps, 3);
  REQUIRE(serial.size() == 3);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(serial[i].pressure == ps[i]);
    CHECK(csv_row(serial[i]) == csv_row(parallel[i]));
  }
  for (std::size_t i = 1; i < ps.size(); ++i) {
    CHECK(serial[i].spec_data_hit_rate() <= serial[i - 1].spec_data_hit_rate());
  }

  SimConfig unfiltered = small_config();
  unfiltered.spec.filter_enabled = false;
  const auto by_n = sweep(unfiltered, SweepAxis::NMax, {1, 2, 4}, 1);
  for (std::size_t i = 1; i < by_n.size(); ++i) CHECK(by_n[i].wasted_fetches >= by_n[i - 1].wasted_fetches);
  CHECK(by_n[2].tiers == 4);

  CHECK_THROWS_AS(sweep(c, SweepAxis::NMax, {1.5}), Error);
  CHECK_THROWS_AS(sweep(c, SweepAxis::Pressure, {2.0}), Error);
  CHECK_THROWS_AS(parse_axis("colour"), Error);
  CHECK(parse_axis("bandwidth") == SweepAxis::Bandwidth);
}
