#include <cmath>
#include <list>
#include <random>
#include <set>

#include "cache_hierarchy.hpp"
#include "doctest.h"

using namespace pasim;

namespace {

HierarchyConfig unlimited() {
  HierarchyConfig c;
  c.peak_bytes_per_cycle = 0.0;
  return c;
}

// One LRU level keyed by line; front = MRU.
struct OracleLevel {
  std::size_t ways;
  std::vector<std::list<std::uint64_t>> sets;
  OracleLevel(std::size_t entries, std::size_t w) : ways(w), sets(entries / w) {}
  bool lookup(std::uint64_t line) {
    auto& s = sets[line % sets.size()];
    for (auto it = s.begin(); it != s.end(); ++it) {
      if (*it == line) {
        s.splice(s.begin(), s, it);
        return true;
      }
    }
    return false;
  }
  void fill(std::uint64_t line) {
    auto& s = sets[line % sets.size()];
    s.remove(line);
    s.push_front(line);
    if (s.size() > ways) s.pop_back();
  }
};

}  // namespace

TEST_CASE("hit latencies follow the serial probe sums") {
  Hierarchy h(unlimited());
  CHECK(h.hit_latency(HitLevel::L1) == 4);
  CHECK(h.hit_latency(HitLevel::L2) == 16);
  CHECK(h.hit_latency(HitLevel::Llc) == 51);
  CHECK(h.hit_latency(HitLevel::Dram) == 171);
}

TEST_CASE("cold line, re-access, and speculative fill levels") {
  Hierarchy h(unlimited());
  const auto cold = h.access(0x1000, 0, AccessKind::Demand);
  CHECK(cold.latency == 4 + 12 + 35 + 120);
  CHECK(cold.level == HitLevel::Dram);
  const auto again = h.access(0x1000, 1000, AccessKind::Demand);
  CHECK(again.latency == 4);
  CHECK(again.level == HitLevel::L1);

  h.access(0x8000, 2000, AccessKind::Speculative);
  CHECK_FALSE(h.l1().contains(line_of(0x8000)));
  CHECK(h.l2().contains(line_of(0x8000)));
  const auto demand = h.access(0x8000, 3000, AccessKind::Demand);
  CHECK(demand.latency == 16);
  CHECK(demand.level == HitLevel::L2);
}

TEST_CASE("completes_at") {
  Hierarchy h(unlimited());
  CHECK(h.completes_at(0x40000, 100, AccessKind::Demand) == 271);
  h.access(0x50000, 1000, AccessKind::Speculative);
  Hierarchy fresh(unlimited());
  fresh.access(0x50000, 0, AccessKind::Speculative);
  CHECK(fresh.completes_at(0x50000, 1000, AccessKind::Demand) == 1016);
  // Second fetch issued after the first completed sees the filled line.
  Hierarchy order(unlimited());
  const Cycle first = order.completes_at(0x60000, 0, AccessKind::Demand);
  CHECK(order.completes_at(0x60000, first, AccessKind::Demand) == first + 4);
}

TEST_CASE("a line still in flight costs its remaining fetch time") {
  Hierarchy h(unlimited());
  const Cycle ready = h.completes_at(0x9000, 0, AccessKind::Speculative);  // 171
  CHECK(ready == 171);
  // Demand at cycle 150 waits the remaining 21 cycles (more than an L2 hit).
  CHECK(h.access(0x9000, 150, AccessKind::Demand).latency == 21);

  Hierarchy h2(unlimited());
  h2.access(0xA000, 0, AccessKind::Speculative);
  // Arrived already: plain L2 hit.
  CHECK(h2.access(0xA000, 200, AccessKind::Demand).latency == 16);
  Hierarchy h3(unlimited());
  h3.access(0xB000, 0, AccessKind::Speculative);
  // 165 cycles in: remaining 6 < 16, so the L2 path dominates.
  CHECK(h3.access(0xB000, 165, AccessKind::Demand).latency == 16);
}

TEST_CASE("DRAM channel queues back-to-back fills") {
  HierarchyConfig c;
  c.peak_bytes_per_cycle = 8.0;  // 8 cycles per line
  Hierarchy h(c);
  CHECK(h.access(0x0, 0, AccessKind::Demand).latency == 171);
  CHECK(h.access(0x40, 0, AccessKind::Speculative).latency == 179);
  CHECK(h.access(0x80, 0, AccessKind::Speculative).latency == 187);
  CHECK(h.access(0xC0, 100, AccessKind::Demand).latency == 171);
}

TEST_CASE("latency is monotone in miss depth") {
  Hierarchy h(unlimited());
  const auto dram = h.access(0x0, 0, AccessKind::Demand).latency;
  // Evict the line from L1 only: 8 ways, 64 sets -> lines 64*k share set 0.
  for (std::uint64_t k = 1; k <= 8; ++k) h.access(k * 64 * 64, 10000 * k, AccessKind::Demand);
  const auto l2 = h.access(0x0, 200000, AccessKind::Demand).latency;
  const auto l1 = h.access(0x0, 300000, AccessKind::Demand).latency;
  CHECK(l1 < l2);
  CHECK(l2 < h.hit_latency(HitLevel::Llc));
  CHECK(h.hit_latency(HitLevel::Llc) < dram);
}

TEST_CASE("contents match an oracle replay and DRAM bytes are 64 per fill") {
  HierarchyConfig c = unlimited();
  c.l1d = {16, 2, 4};
  c.l2 = {64, 4, 12};
  c.llc = {128, 8, 35};
  Hierarchy h(c);
  OracleLevel l1(16, 2), l2(64, 4), llc(128, 8);
  std::mt19937_64 rng(2024);
  std::uint64_t fills = 0, spec_fills = 0;
  Cycle now = 0;
  for (int op = 0; op < 10000; ++op) {
    now += 1000;  // never overlaps an in-flight line
    const std::uint64_t line = rng() % 400;
    const auto kind = static_cast<AccessKind>(rng() % 3);
    const bool spec = kind == AccessKind::Speculative;
    HitLevel want;
    if (l1.lookup(line)) {
      want = HitLevel::L1;
    } else if (l2.lookup(line)) {
      want = HitLevel::L2;
      if (!spec) l1.fill(line);
    } else if (llc.lookup(line)) {
      want = HitLevel::Llc;
      l2.fill(line);
      if (!spec) l1.fill(line);
    } else {
      want = HitLevel::Dram;
      llc.fill(line);
      l2.fill(line);
      if (!spec) l1.fill(line);
      (spec ? spec_fills : fills) += 1;
    }
    const auto got = h.access(line * kLineSize + rng() % kLineSize, now, kind);
    REQUIRE(got.level == want);
    CHECK(got.latency == h.hit_latency(want));
  }
  auto compare = [](const SetAssocCache& cache, const OracleLevel& o) {
    for (std::size_t s = 0; s < o.sets.size(); ++s) {
      const auto& got = cache.set_contents(s);
      REQUIRE(got.size() == o.sets[s].size());
      auto it = o.sets[s].begin();
      for (const auto& e : got) CHECK(e.key == *it++);
    }
  };
  compare(h.l1(), l1);
  compare(h.l2(), l2);
  compare(h.llc(), llc);
  CHECK(h.counters().dram_fills_demand == fills);
  CHECK(h.counters().dram_fills_speculative == spec_fills);
  CHECK(h.counters().bytes_demand() == 64 * fills);
  CHECK(h.counters().bytes_speculative() == 64 * spec_fills);
}

TEST_CASE("speculative accesses never change L1") {
  Hierarchy h(unlimited());
  for (std::uint64_t i = 0; i < 300; ++i) h.access(i * 64, i * 1000, AccessKind::Demand);
  std::vector<std::vector<std::uint64_t>> before;
  for (std::size_t s = 0; s < h.l1().set_count(); ++s) {
    std::vector<std::uint64_t> keys;
    for (const auto& e : h.l1().set_contents(s)) keys.push_back(e.key);
    before.push_back(keys);
  }
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5000; ++i) h.access((rng() % 100000) * 64, 400000 + i * 1000, AccessKind::Speculative);
  for (std::size_t s = 0; s < h.l1().set_count(); ++s) {
    std::vector<std::uint64_t> keys;
    for (const auto& e : h.l1().set_contents(s)) keys.push_back(e.key);
    // Speculative L1 hits may reorder recency but never add or remove lines.
    CHECK(std::set<std::uint64_t>(keys.begin(), keys.end()) ==
          std::set<std::uint64_t>(before[s].begin(), before[s].end()));
  }
}

TEST_CASE("bandwidth meter") {
  const double alpha = 1.0 / 16.0;

  SUBCASE("no traffic") {
    BandwidthMeter m(1024, 4.0, alpha);
    CHECK(m.record_utilization(100000) == 0.0);
    CHECK(m.utilization() == 0.0);
  }
  SUBCASE("traffic at peak converges geometrically") {
    BandwidthMeter m(1024, 4.0, alpha);
    for (int w = 0; w < 10; ++w) {
      for (int i = 0; i < 64; ++i) m.charge(64, static_cast<Cycle>(w) * 1024 + static_cast<Cycle>(i) * 16);
      const double e = m.record_utilization(static_cast<Cycle>(w + 1) * 1024);
      CHECK(e == doctest::Approx(1.0 - std::pow(1.0 - alpha, w + 1)).epsilon(1e-12));
    }
  }
  SUBCASE("oversubscribed traffic pins the clamped utilization within 10 windows") {
    BandwidthMeter m(1024, 4.0, alpha);
    for (int w = 0; w < 10; ++w) {
      for (int i = 0; i < 160; ++i) m.charge(64, static_cast<Cycle>(w) * 1024);  // 2.5x peak
      m.record_utilization(static_cast<Cycle>(w + 1) * 1024);
    }
    CHECK(m.ewma() == doctest::Approx(2.5 * (1.0 - std::pow(1.0 - alpha, 10))).epsilon(1e-12));
    CHECK(m.utilization() == 1.0);
  }
  SUBCASE("half-rate traffic settles near 0.5") {
    BandwidthMeter m(1024, 4.0, alpha);
    for (int w = 0; w < 200; ++w) {
      for (int i = 0; i < 32; ++i) m.charge(64, static_cast<Cycle>(w) * 1024 + static_cast<Cycle>(i) * 32);
      m.record_utilization(static_cast<Cycle>(w + 1) * 1024);
    }
    CHECK(std::abs(m.ewma() - 0.5) <= 0.05);
  }
  SUBCASE("idle windows decay the average") {
    BandwidthMeter m(1024, 4.0, alpha);
    for (int i = 0; i < 64; ++i) m.charge(64, 0);
    const double e1 = m.record_utilization(1024);
    CHECK(e1 == doctest::Approx(alpha));
    CHECK(m.record_utilization(1024 * 6) == doctest::Approx(alpha * std::pow(1.0 - alpha, 5)));
  }
  SUBCASE("invalid parameters") {
    CHECK_THROWS_AS(BandwidthMeter(0, 1.0, alpha), Error);
    HierarchyConfig c;
    c.ewma_alpha = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = HierarchyConfig{};
    c.peak_bytes_per_cycle = -1.0;
    CHECK_THROWS_AS(Hierarchy{c}, Error);
  }
}
