#include <cmath>
#include <numeric>

#include "analytic.hpp"
#include "types.hpp"
#include "doctest.h"

using namespace pasim;

TEST_CASE("expected tier distribution") {
  CHECK(expected_tier_distribution(0.0, 3) == std::vector<double>{1, 0, 0, 0});
  CHECK(expected_tier_distribution(1.0, 3) == std::vector<double>{0, 0, 0, 1});
  const auto d = expected_tier_distribution(0.4, 3);
  REQUIRE(d.size() == 4);
  CHECK(d[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(d[1] == doctest::Approx(0.24).epsilon(1e-14));
  CHECK(d[2] == doctest::Approx(0.096).epsilon(1e-14));
  CHECK(d[3] == doctest::Approx(0.064).epsilon(1e-14));
  CHECK_THROWS_AS(expected_tier_distribution(-0.1, 3), Error);
  CHECK_THROWS_AS(expected_tier_distribution(0.5, 0), Error);
}

TEST_CASE("expected distribution sums to one and decreases over tiers") {
  for (double p : {0.05, 0.2, 0.5, 0.8, 0.99}) {
    for (unsigned n : {1u, 2u, 6u, 12u}) {
      const auto d = expected_tier_distribution(p, n);
      CHECK(std::abs(std::accumulate(d.begin(), d.end(), 0.0) - 1.0) < 1e-12);
      for (unsigned i = 1; i < n; ++i) CHECK(d[i] < d[i - 1]);
    }
  }
}

TEST_CASE("binomial bound") {
  CHECK(binomial_bound(0.5, 10000) == doctest::Approx(3.0 * 0.005));
  CHECK(binomial_bound(0.0, 100) == 0.0);
  CHECK(binomial_bound(0.3, 100, 2.0) == doctest::Approx(2.0 * std::sqrt(0.21 / 100)));
}

TEST_CASE("chi-square statistic and p-value") {
  const std::vector<double> expected = {0.5, 0.3, 0.2};

  SUBCASE("a distribution against itself") {
    const std::vector<std::uint64_t> exact = {5000, 3000, 2000};
    const auto r = chi_square_fit(exact, expected);
    CHECK(r.statistic == 0.0);
    CHECK(r.dof == 2);
    CHECK(r.p_value == doctest::Approx(1.0));
    CHECK(r.pass);
  }
  SUBCASE("p-value matches the two-dof closed form exp(-x/2)") {
    const std::vector<std::uint64_t> counts = {5100, 2950, 1950};
    const double x = 100.0 * 100 / 5000 + 50.0 * 50 / 3000 + 50.0 * 50 / 2000;
    const auto r = chi_square_fit(counts, expected);
    CHECK(r.statistic == doctest::Approx(x).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(std::exp(-x / 2)).epsilon(1e-9));
    CHECK(r.pass);
  }
  SUBCASE("frequencies overload") {
    const std::vector<double> freq = {0.51, 0.295, 0.195};
    const auto r = chi_square_fit(freq, expected, 10000);
    CHECK(r.statistic == doctest::Approx(100.0 * 100 / 5000 + 50.0 * 50 / 3000 + 50.0 * 50 / 2000).epsilon(1e-9));
  }
  SUBCASE("uniform data against a geometric model is rejected") {
    const auto geo = expected_tier_distribution(0.6, 3);
    const std::vector<std::uint64_t> flat = {25000, 25000, 25000, 25000};
    const auto r = chi_square_fit(flat, geo);
    CHECK_FALSE(r.pass);
    CHECK(r.p_value < 0.001);
  }
  SUBCASE("observations in a zero-probability cell reject") {
    const std::vector<double> model = {1.0, 0.0};
    const std::vector<std::uint64_t> counts = {99, 1};
    CHECK_FALSE(chi_square_fit(counts, model).pass);
  }
  SUBCASE("small expected cells are pooled") {
    const std::vector<double> model = {0.9, 0.0999, 0.0001};
    const std::vector<std::uint64_t> counts = {900, 100, 0};
    const auto r = chi_square_fit(counts, model);
    CHECK(r.dof == 1);  // third cell (0.1 expected) pooled into the second
    CHECK(r.pass);
  }
}

TEST_CASE("Monte-Carlo tier distribution") {
  McOptions o;
  o.total_frames = 1 << 16;
  o.trials = 20000;
  o.seed = 3;

  SUBCASE("empty memory always takes tier 1") {
    o.p = 0.0;
    o.tiers = 3;
    const auto c = monte_carlo_tier_counts(o);
    CHECK(c == std::vector<std::uint64_t>{20000, 0, 0, 0});
  }
  SUBCASE("one tier at half pressure splits evenly") {
    o.p = 0.5;
    o.tiers = 1;
    const auto d = monte_carlo_tier_distribution(o);
    CHECK(std::abs(d[0] - 0.5) <= binomial_bound(0.5, o.trials));
    CHECK(std::abs(d[1] - 0.5) <= binomial_bound(0.5, o.trials));
  }
  SUBCASE("fit to the closed form") {
    o.p = 0.4;
    o.tiers = 3;
    const auto c = monte_carlo_tier_counts(o);
    CHECK(std::accumulate(c.begin(), c.end(), std::uint64_t{0}) == o.trials);
    CHECK(chi_square_fit(c, expected_tier_distribution(0.4, 3)).pass);
  }
  SUBCASE("deterministic and thread-count independent") {
    o.p = 0.6;
    o.tiers = 4;
    const auto a = monte_carlo_tier_counts(o);
    o.threads = 3;
    CHECK(monte_carlo_tier_counts(o) == a);
  }
  SUBCASE("sequential pool fills up and drifts from the model") {
    o.total_frames = 4096;
    o.trials = 3000;
    o.p = 0.2;
    o.tiers = 2;
    o.mode = McMode::SequentialPool;
    const auto c = monte_carlo_tier_counts(o);
    CHECK(std::accumulate(c.begin(), c.end(), std::uint64_t{0}) == 3000);
    // Pressure climbs from 0.2 to ~0.93, so fallbacks far exceed the 0.04 model share.
    CHECK(static_cast<double>(c.back()) / 3000.0 > 0.1);
    o.trials = 5000;  // more than the free frames
    CHECK_THROWS_AS(monte_carlo_tier_counts(o), Error);
  }
}

TEST_CASE("injected pool runs the real allocator and keeps the pressure fixed") {
  McOptions o;
  o.total_frames = 1 << 16;
  o.trials = 20000;
  o.seed = 9;
  o.p = 0.6;
  o.tiers = 3;
  o.mode = McMode::InjectedPool;
  const auto c = monte_carlo_tier_counts(o);
  CHECK(std::accumulate(c.begin(), c.end(), std::uint64_t{0}) == o.trials);
  CHECK(chi_square_fit(c, expected_tier_distribution(0.6, 3)).pass);
  o.p = 1.0;
  CHECK_THROWS_AS(monte_carlo_tier_counts(o), Error);
}
