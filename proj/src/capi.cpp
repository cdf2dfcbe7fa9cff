#include "pasim/pasim.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <new>
#include <string>

#include "config.hpp"
#include "report.hpp"
#include "simulator.hpp"

struct pasim_config {
  pasim::SimConfig c;
};

struct pasim_stats {
  pasim::RunStats s;
};

namespace {

thread_local std::string g_last_error;

pasim_status status_of(pasim::ErrorCode code) {
  using pasim::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidConfig: return PASIM_ERR_CONFIG;
    case ErrorCode::Trace: return PASIM_ERR_TRACE;
    case ErrorCode::OutOfMemory: return PASIM_ERR_OUT_OF_MEMORY;
    case ErrorCode::Io: return PASIM_ERR_IO;
    default: return PASIM_ERR_SIMULATION;
  }
}

pasim_status fail(pasim_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename F>
pasim_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return PASIM_OK;
  } catch (const pasim::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PASIM_ERR_OUT_OF_MEMORY, "allocation failed");
  } catch (const std::exception& e) {
    return fail(PASIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PASIM_ERR_INTERNAL, "unknown failure");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

pasim::ReportFormat to_format(pasim_format f) {
  switch (f) {
    case PASIM_FORMAT_HUMAN: return pasim::ReportFormat::Human;
    case PASIM_FORMAT_CSV: return pasim::ReportFormat::Csv;
    case PASIM_FORMAT_JSON_LINES: return pasim::ReportFormat::JsonLines;
  }
  throw pasim::Error(pasim::ErrorCode::InvalidConfig, "unknown report format");
}

double as_double(std::uint64_t v) { return static_cast<double>(v); }

const std::map<std::string, std::function<double(const pasim::RunStats&)>, std::less<>>& metrics() {
  using S = pasim::RunStats;
  static const std::map<std::string, std::function<double(const S&)>, std::less<>> table = {
      {"accesses", [](const S& s) { return as_double(s.accesses); }},
      {"instructions", [](const S& s) { return as_double(s.instructions); }},
      {"cycles", [](const S& s) { return as_double(s.cycles); }},
      {"l1_tlb_hits", [](const S& s) { return as_double(s.l1_tlb_hits); }},
      {"l2_tlb_hits", [](const S& s) { return as_double(s.l2_tlb_hits); }},
      {"l2_tlb_misses", [](const S& s) { return as_double(s.l2_tlb_misses); }},
      {"l2_tlb_mpki", [](const S& s) { return s.l2_tlb_mpki(); }},
      {"walks", [](const S& s) { return as_double(s.walks); }},
      {"avg_walk_latency", [](const S& s) { return s.avg_walk_latency(); }},
      {"p50_walk_latency", [](const S& s) { return as_double(s.walk_p50); }},
      {"p95_walk_latency", [](const S& s) { return as_double(s.walk_p95); }},
      {"p99_walk_latency", [](const S& s) { return as_double(s.walk_p99); }},
      {"avg_translation_latency", [](const S& s) { return s.avg_translation_latency(); }},
      {"avg_memory_access_latency", [](const S& s) { return s.avg_memory_access_latency(); }},
      {"spec_data_issued", [](const S& s) { return as_double(s.spec_data_issued); }},
      {"spec_pt_issued", [](const S& s) { return as_double(s.spec_pt_issued); }},
      {"spec_data_hits", [](const S& s) { return as_double(s.spec_data_hits); }},
      {"spec_data_hit_rate", [](const S& s) { return s.spec_data_hit_rate(); }},
      {"spec_pt_hits", [](const S& s) { return as_double(s.spec_pt_hits); }},
      {"wasted_fetches", [](const S& s) { return as_double(s.wasted_fetches); }},
      {"hash_allocated_walk_fraction", [](const S& s) { return s.hash_allocated_walk_fraction(); }},
      {"fallback_confirmations", [](const S& s) { return as_double(s.fallback_confirmations); }},
      {"pages_mapped", [](const S& s) { return as_double(s.pages_mapped); }},
      {"model_alloc_success", [](const S& s) { return s.model_alloc_success(); }},
      {"measured_alloc_success", [](const S& s) { return s.measured_alloc_success(); }},
      {"dram_bytes_demand", [](const S& s) { return as_double(s.dram_bytes_demand); }},
      {"dram_bytes_speculative", [](const S& s) { return as_double(s.dram_bytes_speculative); }},
      {"final_bw_ewma", [](const S& s) { return s.final_bw_ewma; }},
  };
  return table;
}

}  // namespace

extern "C" {

const char* pasim_version(void) { return "0.1.0"; }

const char* pasim_last_error(void) { return g_last_error.c_str(); }

const char* pasim_status_string(pasim_status status) {
  switch (status) {
    case PASIM_OK: return "ok";
    case PASIM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PASIM_ERR_CONFIG: return "configuration error";
    case PASIM_ERR_TRACE: return "trace error";
    case PASIM_ERR_OUT_OF_MEMORY: return "out of memory";
    case PASIM_ERR_IO: return "i/o error";
    case PASIM_ERR_SIMULATION: return "simulation error";
    case PASIM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void pasim_string_free(char* str) { std::free(str); }

pasim_status pasim_config_new(pasim_config** out) {
  if (!out) return fail(PASIM_ERR_INVALID_ARGUMENT, "null output pointer");
  return guarded([&] { *out = new pasim_config{}; });
}

pasim_config* pasim_config_clone(const pasim_config* config) {
  if (!config) return nullptr;
  try {
    return new pasim_config{*config};
  } catch (...) {
    g_last_error = "allocation failed";
    return nullptr;
  }
}

void pasim_config_free(pasim_config* config) { delete config; }

pasim_status pasim_config_set(pasim_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(PASIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { config->c.set(key, value); });
}

pasim_status pasim_config_get(const pasim_config* config, const char* key, char** out) {
  if (!config || !key || !out) return fail(PASIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = dup_string(config->c.get(key)); });
}

pasim_status pasim_config_load_file(pasim_config* config, const char* path) {
  if (!config || !path) return fail(PASIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ifstream in(path);
    if (!in) throw pasim::Error(pasim::ErrorCode::InvalidConfig, std::string("cannot open config '") + path + "'");
    pasim::SimConfig next = config->c;
    next.load(in);
    config->c = next;
  });
}

pasim_status pasim_config_dump(const pasim_config* config, char** out) {
  if (!config || !out) return fail(PASIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = dup_string(config->c.dump()); });
}

pasim_status pasim_config_validate(const pasim_config* config) {
  if (!config) return fail(PASIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { config->c.validate(); });
}

pasim_status pasim_run(const pasim_config* config, pasim_stats** out) {
  if (!config || !out) return fail(PASIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new pasim_stats{pasim::run(config->c)}; });
}

void pasim_stats_free(pasim_stats* stats) { delete stats; }

pasim_status pasim_stats_get(const pasim_stats* stats, const char* metric, double* out) {
  if (!stats || !metric || !out) return fail(PASIM_ERR_INVALID_ARGUMENT, "null argument");
  const auto& table = metrics();
  const auto it = table.find(std::string_view(metric));
  if (it == table.end()) return fail(PASIM_ERR_INVALID_ARGUMENT, std::string("unknown metric '") + metric + "'");
  *out = it->second(stats->s);
  return PASIM_OK;
}

pasim_status pasim_stats_report(const pasim_stats* stats, pasim_format format, char** out) {
  if (!stats || !out) return fail(PASIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(pasim::report(std::span<const pasim::RunStats>(&stats->s, 1), to_format(format)));
  });
}

pasim_status pasim_sweep(const pasim_config* config, const char* axis, const double* values, size_t count,
                         unsigned threads, pasim_format format, char** out) {
  if (!config || !axis || !out || (count > 0 && !values)) return fail(PASIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto rows = pasim::sweep(config->c, pasim::parse_axis(axis), std::vector<double>(values, values + count),
                                   threads);
    *out = dup_string(pasim::report(rows, to_format(format)));
  });
}

pasim_status pasim_gen_trace(const pasim_config* config, const char* path) {
  if (!config || !path) return fail(PASIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    config->c.validate();
    const auto events = pasim::generate_trace(config->c);
    std::ofstream out(path);
    if (!out) throw pasim::Error(pasim::ErrorCode::Io, std::string("cannot write '") + path + "'");
    pasim::write_trace(out, events);
    if (!out) throw pasim::Error(pasim::ErrorCode::Io, std::string("write failed for '") + path + "'");
  });
}

pasim_status pasim_analytic(double pressure, unsigned tiers, uint64_t trials, uint64_t frames, uint64_t seed,
                            char** out) {
  if (!out) return fail(PASIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = dup_string(pasim::analytic_report(pressure, tiers, trials, frames, seed)); });
}

}  // extern "C"
