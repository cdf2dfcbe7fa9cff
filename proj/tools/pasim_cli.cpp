// Command-line front end over the pasim C API.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pasim/pasim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitTrace = 3;

int exit_code(pasim_status status) {
  switch (status) {
    case PASIM_OK: return kExitOk;
    case PASIM_ERR_CONFIG:
    case PASIM_ERR_INVALID_ARGUMENT: return kExitConfig;
    case PASIM_ERR_TRACE: return kExitTrace;
    default: return kExitFailure;
  }
}

struct StatusError {
  pasim_status status;
};

void check(pasim_status status) {
  if (status != PASIM_OK) throw StatusError{status};
}

struct ConfigDeleter {
  void operator()(pasim_config* c) const { pasim_config_free(c); }
};
struct StatsDeleter {
  void operator()(pasim_stats* s) const { pasim_stats_free(s); }
};
struct StringDeleter {
  void operator()(char* s) const { pasim_string_free(s); }
};
using ConfigPtr = std::unique_ptr<pasim_config, ConfigDeleter>;
using StatsPtr = std::unique_ptr<pasim_stats, StatsDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

struct Globals {
  std::string config_path;
  std::string trace_path;
  std::string mode;
  std::string format = "human";
  std::string out_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

pasim_format parse_format(const std::string& name) {
  if (name == "human") return PASIM_FORMAT_HUMAN;
  if (name == "csv") return PASIM_FORMAT_CSV;
  if (name == "json-lines" || name == "jsonl") return PASIM_FORMAT_JSON_LINES;
  std::fprintf(stderr, "error: unknown format '%s'\n", name.c_str());
  throw StatusError{PASIM_ERR_CONFIG};
}

void set(pasim_config* c, const std::string& key, const std::string& value) {
  check(pasim_config_set(c, key.c_str(), value.c_str()));
}

ConfigPtr build_config(const Globals& g) {
  pasim_config* raw = nullptr;
  check(pasim_config_new(&raw));
  ConfigPtr c(raw);
  if (!g.config_path.empty()) check(pasim_config_load_file(c.get(), g.config_path.c_str()));
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      throw StatusError{PASIM_ERR_CONFIG};
    }
    set(c.get(), kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!g.trace_path.empty()) set(c.get(), "trace.path", g.trace_path);
  if (!g.mode.empty()) set(c.get(), "mode", g.mode);
  if (g.seed_given) set(c.get(), "seed", std::to_string(g.seed));
  check(pasim_config_validate(c.get()));
  return c;
}

void emit(const Globals& g, const std::string& text) {
  if (g.out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(g.out_path);
  if (!out) {
    std::fprintf(stderr, "error: cannot write '%s'\n", g.out_path.c_str());
    throw StatusError{PASIM_ERR_IO};
  }
  out << text;
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: bad sweep value '%s'\n", item.c_str());
      throw StatusError{PASIM_ERR_CONFIG};
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pasim: trace-driven simulator of hash-guided address speculation"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.set_version_flag("--version", pasim_version());

  Globals g;
  app.add_option("--config", g.config_path, "key = value configuration file");
  app.add_option("--trace", g.trace_path, "trace file (default: synthesize from trace.* keys)");
  app.add_option("--mode", g.mode, "native | nested | speculation-off | perfect-speculation");
  app.add_option("--seed", g.seed, "master seed")->each([&](const std::string&) { g.seed_given = true; });
  app.add_option("--out", g.out_path, "write output here instead of stdout");
  app.add_option("--set", g.overrides, "override a configuration key (key=value, repeatable)");
  app.add_option("--format", g.format, "human | csv | json-lines");

  auto* gen = app.add_subcommand("gen-trace", "write the configured synthetic trace");
  auto* run = app.add_subcommand("run", "simulate one configuration");
  auto* sweep = app.add_subcommand("sweep", "simulate along one axis");
  std::string axis;
  std::string values;
  unsigned threads = 1;
  sweep->add_option("--axis", axis, "pressure | n_max | bandwidth")->required();
  sweep->add_option("--values", values, "comma separated values")->required();
  sweep->add_option("--threads", threads, "concurrent runs");

  auto* analytic = app.add_subcommand("analytic", "closed-form vs Monte-Carlo tier distribution");
  double p = 0.5;
  unsigned tiers = 6;
  std::uint64_t trials = 100000;
  std::uint64_t frames = 1ull << 20;
  analytic->add_option("--p", p, "memory pressure in [0,1]");
  analytic->add_option("--n", tiers, "hash tiers");
  analytic->add_option("--trials", trials, "Monte-Carlo trials");
  analytic->add_option("--frames", frames, "physical frames");

  auto* print_config = app.add_subcommand("print-config", "print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    ConfigPtr config = build_config(g);
    const pasim_format format = parse_format(g.format);
    char* raw = nullptr;

    if (gen->parsed()) {
      if (g.out_path.empty()) {
        std::fprintf(stderr, "error: gen-trace needs --out\n");
        return kExitConfig;
      }
      check(pasim_gen_trace(config.get(), g.out_path.c_str()));
    } else if (run->parsed()) {
      pasim_stats* stats_raw = nullptr;
      check(pasim_run(config.get(), &stats_raw));
      StatsPtr stats(stats_raw);
      check(pasim_stats_report(stats.get(), format, &raw));
      emit(g, StringPtr(raw).get());
    } else if (sweep->parsed()) {
      const std::vector<double> vals = parse_values(values);
      check(pasim_sweep(config.get(), axis.c_str(), vals.data(), vals.size(), threads, format, &raw));
      emit(g, StringPtr(raw).get());
    } else if (analytic->parsed()) {
      std::uint64_t seed = 1;
      if (g.seed_given) seed = g.seed;
      check(pasim_analytic(p, tiers, trials, frames, seed, &raw));
      emit(g, StringPtr(raw).get());
    } else if (print_config->parsed()) {
      check(pasim_config_dump(config.get(), &raw));
      emit(g, StringPtr(raw).get());
    }
  } catch (const StatusError& e) {
    const char* msg = pasim_last_error();
    if (msg && *msg) std::fprintf(stderr, "error: %s\n", msg);
    return exit_code(e.status);
  }
  return kExitOk;
}
