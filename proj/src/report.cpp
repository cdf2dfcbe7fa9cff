#include "report.hpp"

#include <cstdio>
#include <sstream>

#include "analytic.hpp"
#include "json.hpp"

namespace pasim {

ReportFormat parse_format(std::string_view text) {
  if (text == "human") return ReportFormat::Human;
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json-lines" || text == "jsonl") return ReportFormat::JsonLines;
  throw Error(ErrorCode::InvalidConfig, "unknown report format '" + std::string(text) + "'");
}

namespace {

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string joined(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

std::string csv_header() {
  return "mode,pressure,tiers,n_max,filter,seed,accesses,instructions,cycles,"
         "l1_tlb_hits,l2_tlb_hits,l2_tlb_misses,l2_tlb_mpki,walks,"
         "avg_walk_latency,p50_walk_latency,p95_walk_latency,p99_walk_latency,"
         "avg_translation_latency,avg_memory_access_latency,"
         "spec_data_issued,spec_pt_issued,spec_data_hits,spec_data_hit_rate,spec_pt_hits,wasted_fetches,"
         "hash_allocated_walk_fraction,tier_confirmations,fallback_confirmations,"
         "pages_mapped,pages_by_tier,pt_frames_by_tier,model_alloc_success,measured_alloc_success,"
         "dram_bytes_demand,dram_bytes_speculative,final_bw_ewma";
}

std::string csv_row(const RunStats& s) {
  std::ostringstream o;
  o << to_string(s.mode) << ',' << fixed(s.pressure, 4) << ',' << s.tiers << ',' << s.n_max << ','
    << (s.filter ? 1 : 0) << ',' << s.seed << ',' << s.accesses << ',' << s.instructions << ',' << s.cycles << ','
    << s.l1_tlb_hits << ',' << s.l2_tlb_hits << ',' << s.l2_tlb_misses << ',' << fixed(s.l2_tlb_mpki()) << ','
    << s.walks << ',' << fixed(s.avg_walk_latency()) << ',' << s.walk_p50 << ',' << s.walk_p95 << ','
    << s.walk_p99 << ',' << fixed(s.avg_translation_latency()) << ',' << fixed(s.avg_memory_access_latency())
    << ',' << s.spec_data_issued << ',' << s.spec_pt_issued << ',' << s.spec_data_hits << ','
    << fixed(s.spec_data_hit_rate()) << ',' << s.spec_pt_hits << ',' << s.wasted_fetches << ','
    << fixed(s.hash_allocated_walk_fraction()) << ',' << joined(s.tier_confirmations) << ','
    << s.fallback_confirmations << ',' << s.pages_mapped << ',' << joined(s.pages_by_tier) << ','
    << joined(s.pt_frames_by_tier) << ',' << fixed(s.model_alloc_success()) << ','
    << fixed(s.measured_alloc_success()) << ',' << s.dram_bytes_demand << ',' << s.dram_bytes_speculative << ','
    << fixed(s.final_bw_ewma);
  return o.str();
}

std::string json_line(const RunStats& s) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(s.mode);
  j["pressure"] = s.pressure;
  j["tiers"] = s.tiers;
  j["n_max"] = s.n_max;
  j["filter"] = s.filter;
  j["seed"] = s.seed;
  j["accesses"] = s.accesses;
  j["instructions"] = s.instructions;
  j["cycles"] = s.cycles;
  j["l1_tlb_hits"] = s.l1_tlb_hits;
  j["l2_tlb_hits"] = s.l2_tlb_hits;
  j["l2_tlb_misses"] = s.l2_tlb_misses;
  j["l2_tlb_mpki"] = s.l2_tlb_mpki();
  j["walks"] = s.walks;
  j["avg_walk_latency"] = s.avg_walk_latency();
  j["p50_walk_latency"] = s.walk_p50;
  j["p95_walk_latency"] = s.walk_p95;
  j["p99_walk_latency"] = s.walk_p99;
  j["avg_translation_latency"] = s.avg_translation_latency();
  j["avg_memory_access_latency"] = s.avg_memory_access_latency();
  j["spec_data_issued"] = s.spec_data_issued;
  j["spec_pt_issued"] = s.spec_pt_issued;
  j["spec_data_hits"] = s.spec_data_hits;
  j["spec_data_hit_rate"] = s.spec_data_hit_rate();
  j["spec_pt_hits"] = s.spec_pt_hits;
  j["wasted_fetches"] = s.wasted_fetches;
  j["hash_allocated_walk_fraction"] = s.hash_allocated_walk_fraction();
  j["tier_confirmations"] = s.tier_confirmations;
  j["fallback_confirmations"] = s.fallback_confirmations;
  j["pages_mapped"] = s.pages_mapped;
  j["pages_by_tier"] = s.pages_by_tier;
  j["pt_frames_by_tier"] = s.pt_frames_by_tier;
  j["model_alloc_success"] = s.model_alloc_success();
  j["measured_alloc_success"] = s.measured_alloc_success();
  j["dram_bytes_demand"] = s.dram_bytes_demand;
  j["dram_bytes_speculative"] = s.dram_bytes_speculative;
  j["final_bw_ewma"] = s.final_bw_ewma;
  return j.dump();
}

std::string human_report(const RunStats& s) {
  std::ostringstream o;
  auto line = [&o](const char* label, const std::string& value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%-32s", label);
    o << buf << value << '\n';
  };
  line("mode", to_string(s.mode));
  line("pressure / tiers / n_max", fixed(s.pressure, 2) + " / " + std::to_string(s.tiers) + " / " +
                                       std::to_string(s.n_max) + (s.filter ? " (filter on)" : " (filter off)"));
  line("accesses / instructions", std::to_string(s.accesses) + " / " + std::to_string(s.instructions));
  line("TLB L1 hits / L2 hits / misses", std::to_string(s.l1_tlb_hits) + " / " + std::to_string(s.l2_tlb_hits) +
                                             " / " + std::to_string(s.l2_tlb_misses));
  line("L2 TLB MPKI", fixed(s.l2_tlb_mpki(), 3));
  line("walk latency avg/p50/p95/p99", fixed(s.avg_walk_latency(), 2) + " / " + std::to_string(s.walk_p50) +
                                           " / " + std::to_string(s.walk_p95) + " / " + std::to_string(s.walk_p99));
  line("avg translation latency", fixed(s.avg_translation_latency(), 2));
  line("avg memory-access latency", fixed(s.avg_memory_access_latency(), 2));
  line("speculative data fetches", std::to_string(s.spec_data_issued) + " (hits " + std::to_string(s.spec_data_hits) +
                                       ", wasted " + std::to_string(s.wasted_fetches) + ", hit rate " +
                                       fixed(s.spec_data_hit_rate(), 4) + ")");
  line("speculative PTE fetches", std::to_string(s.spec_pt_issued) + " (hits " + std::to_string(s.spec_pt_hits) + ")");
  line("allocation success", "model " + fixed(s.model_alloc_success(), 4) + "  measured " +
                                 fixed(s.measured_alloc_success(), 4));
  line("pages by tier (then fallback)", joined(s.pages_by_tier));
  line("DRAM bytes demand / spec", std::to_string(s.dram_bytes_demand) + " / " +
                                       std::to_string(s.dram_bytes_speculative));
  return o.str();
}

std::string report(std::span<const RunStats> runs, ReportFormat format) {
  std::string out;
  switch (format) {
    case ReportFormat::Csv:
      out = csv_header() + "\n";
      for (const auto& r : runs) out += csv_row(r) + "\n";
      break;
    case ReportFormat::JsonLines:
      for (const auto& r : runs) out += json_line(r) + "\n";
      break;
    case ReportFormat::Human:
      for (std::size_t i = 0; i < runs.size(); ++i) {
        if (i) out += "\n";
        out += human_report(runs[i]);
      }
      break;
  }
  return out;
}

std::string analytic_report(double p, unsigned tiers, std::uint64_t trials, std::uint64_t frames,
                            std::uint64_t seed) {
  const auto expected = expected_tier_distribution(p, tiers);
  McOptions opts;
  opts.total_frames = frames;
  opts.p = p;
  opts.tiers = tiers;
  opts.trials = trials;
  opts.seed = seed;
  const auto counts = monte_carlo_tier_counts(opts);
  const auto fit = chi_square_fit(counts, expected);

  std::ostringstream o;
  o << "outcome,model,monte_carlo,count\n";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    o << (i < tiers ? "tier" + std::to_string(i + 1) : std::string("fallback")) << ',' << fixed(expected[i]) << ','
      << fixed(static_cast<double>(counts[i]) / static_cast<double>(trials)) << ',' << counts[i] << '\n';
  }
  const double success_mc = 1.0 - static_cast<double>(counts.back()) / static_cast<double>(trials);
  o << "success," << fixed(AnalyticModel{p, tiers}.success_probability()) << ',' << fixed(success_mc) << ','
    << (trials - counts.back()) << '\n';
  o << "# chi-square " << fixed(fit.statistic, 4) << " dof " << fit.dof << " p-value " << fixed(fit.p_value, 6)
    << (fit.pass ? " (fit accepted at alpha=0.001)" : " (fit rejected at alpha=0.001)") << '\n';
  return o.str();
}

}  // namespace pasim
