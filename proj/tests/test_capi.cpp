#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "doctest.h"
#include "pasim/pasim.h"

namespace {

struct ConfigDeleter {
  void operator()(pasim_config* c) const { pasim_config_free(c); }
};
struct StatsDeleter {
  void operator()(pasim_stats* s) const { pasim_stats_free(s); }
};
using Config = std::unique_ptr<pasim_config, ConfigDeleter>;
using Stats = std::unique_ptr<pasim_stats, StatsDeleter>;

Config small_config() {
  pasim_config* raw = nullptr;
  REQUIRE(pasim_config_new(&raw) == PASIM_OK);
  Config c(raw);
  REQUIRE(pasim_config_set(c.get(), "mem.frames", "65536") == PASIM_OK);
  REQUIRE(pasim_config_set(c.get(), "trace.pages", "512") == PASIM_OK);
  REQUIRE(pasim_config_set(c.get(), "trace.accesses", "2000") == PASIM_OK);
  return c;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  pasim_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::string(pasim_version()).size() > 0);
  CHECK(std::string(pasim_status_string(PASIM_OK)) == "ok");
  CHECK(std::string(pasim_status_string(PASIM_ERR_TRACE)).size() > 0);
}

TEST_CASE("config get, set and errors") {
  Config c = small_config();
  char* value = nullptr;
  REQUIRE(pasim_config_get(c.get(), "trace.pages", &value) == PASIM_OK);
  CHECK(take(value) == "512");

  CHECK(pasim_config_set(c.get(), "no.such.key", "1") == PASIM_ERR_CONFIG);
  CHECK(std::string(pasim_last_error()).find("no.such.key") != std::string::npos);
  CHECK(pasim_config_set(nullptr, "seed", "1") == PASIM_ERR_INVALID_ARGUMENT);
  CHECK(pasim_config_set(c.get(), nullptr, "1") == PASIM_ERR_INVALID_ARGUMENT);
  CHECK(pasim_config_new(nullptr) == PASIM_ERR_INVALID_ARGUMENT);

  REQUIRE(pasim_config_set(c.get(), "mem.pressure", "1.5") == PASIM_OK);
  CHECK(pasim_config_validate(c.get()) == PASIM_ERR_CONFIG);
  REQUIRE(pasim_config_set(c.get(), "mem.pressure", "0.5") == PASIM_OK);
  CHECK(pasim_config_validate(c.get()) == PASIM_OK);

  Config copy(pasim_config_clone(c.get()));
  REQUIRE(copy);
  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(pasim_config_dump(c.get(), &a) == PASIM_OK);
  REQUIRE(pasim_config_dump(copy.get(), &b) == PASIM_OK);
  CHECK(take(a) == take(b));
}

TEST_CASE("config files") {
  const std::string path = "capi_test_config.txt";
  {
    std::ofstream out(path);
    out << "# test\nseed = 42\npolicy.n = 3\n";
  }
  Config c = small_config();
  REQUIRE(pasim_config_load_file(c.get(), path.c_str()) == PASIM_OK);
  char* v = nullptr;
  REQUIRE(pasim_config_get(c.get(), "policy.n", &v) == PASIM_OK);
  CHECK(take(v) == "3");
  std::remove(path.c_str());
  CHECK(pasim_config_load_file(c.get(), "/nonexistent/cfg.txt") == PASIM_ERR_CONFIG);
}

TEST_CASE("run, metrics and reports") {
  Config c = small_config();
  pasim_stats* raw = nullptr;
  REQUIRE(pasim_run(c.get(), &raw) == PASIM_OK);
  Stats s(raw);

  double accesses = 0, walks = 0, misses = 0;
  REQUIRE(pasim_stats_get(s.get(), "accesses", &accesses) == PASIM_OK);
  REQUIRE(pasim_stats_get(s.get(), "walks", &walks) == PASIM_OK);
  REQUIRE(pasim_stats_get(s.get(), "l2_tlb_misses", &misses) == PASIM_OK);
  CHECK(accesses == 2000);
  CHECK(walks == misses);
  double x = 0;
  CHECK(pasim_stats_get(s.get(), "bogus", &x) == PASIM_ERR_INVALID_ARGUMENT);

  char* csv = nullptr;
  REQUIRE(pasim_stats_report(s.get(), PASIM_FORMAT_CSV, &csv) == PASIM_OK);
  const std::string text = take(csv);
  CHECK(text.rfind("mode,pressure,tiers", 0) == 0);

  // Same config, same bytes.
  pasim_stats* again = nullptr;
  REQUIRE(pasim_run(c.get(), &again) == PASIM_OK);
  Stats s2(again);
  char* csv2 = nullptr;
  REQUIRE(pasim_stats_report(s2.get(), PASIM_FORMAT_CSV, &csv2) == PASIM_OK);
  CHECK(take(csv2) == text);
}

TEST_CASE("trace errors") {
  Config c = small_config();
  const std::string path = "capi_bad_trace.txt";
  {
    std::ofstream out(path);
    out << "I 10\nL 0x1000\nX 5\n";
  }
  REQUIRE(pasim_config_set(c.get(), "trace.path", path.c_str()) == PASIM_OK);
  pasim_stats* s = nullptr;
  CHECK(pasim_run(c.get(), &s) == PASIM_ERR_TRACE);
  CHECK(s == nullptr);
  CHECK(std::string(pasim_last_error()).find("line 3") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("generated traces replay to the same result") {
  Config c = small_config();
  const std::string path = "capi_trace.txt";
  REQUIRE(pasim_gen_trace(c.get(), path.c_str()) == PASIM_OK);
  pasim_stats* direct = nullptr;
  REQUIRE(pasim_run(c.get(), &direct) == PASIM_OK);
  Stats d(direct);
  REQUIRE(pasim_config_set(c.get(), "trace.path", path.c_str()) == PASIM_OK);
  pasim_stats* replay = nullptr;
  REQUIRE(pasim_run(c.get(), &replay) == PASIM_OK);
  Stats r(replay);
  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(pasim_stats_report(d.get(), PASIM_FORMAT_CSV, &a) == PASIM_OK);
  REQUIRE(pasim_stats_report(r.get(), PASIM_FORMAT_CSV, &b) == PASIM_OK);
  CHECK(take(a) == take(b));
  std::remove(path.c_str());
}

TEST_CASE("sweep and analytic") {
  Config c = small_config();
  const double values[] = {0.0, 0.5};
  char* out = nullptr;
  REQUIRE(pasim_sweep(c.get(), "pressure", values, 2, 2, PASIM_FORMAT_CSV, &out) == PASIM_OK);
  const std::string csv = take(out);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 3);
  CHECK(csv.find("\nnative,0.0000,") != std::string::npos);
  CHECK(csv.find("\nnative,0.5000,") != std::string::npos);
  CHECK(csv.find("\nnative,0.0000,") < csv.find("\nnative,0.5000,"));
  CHECK(pasim_sweep(c.get(), "colour", values, 2, 1, PASIM_FORMAT_CSV, &out) == PASIM_ERR_CONFIG);
  CHECK(pasim_sweep(c.get(), "pressure", nullptr, 2, 1, PASIM_FORMAT_CSV, &out) == PASIM_ERR_INVALID_ARGUMENT);

  REQUIRE(pasim_analytic(0.4, 3, 10000, 65536, 1, &out) == PASIM_OK);
  CHECK(take(out).find("success,0.936000,") != std::string::npos);
  CHECK(pasim_analytic(1.5, 3, 100, 65536, 1, &out) == PASIM_ERR_CONFIG);
}
