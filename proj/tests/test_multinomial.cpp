#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include <catch_amalgamated.hpp>

#include "kgnotable/multinomial.hpp"
#include "kgnotable/random.hpp"

using namespace kgnotable;

namespace {

// Brute-force oracle: direct factorial arithmetic, no logs, so it shares no
// code path with the implementation under test.
double oracle_point_probability(const std::vector<double>& pi, const std::vector<std::int64_t>& x) {
  std::int64_t n = std::accumulate(x.begin(), x.end(), std::int64_t{0});
  double coeff = std::tgamma(static_cast<double>(n) + 1.0);
  double prob = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    coeff /= std::tgamma(static_cast<double>(x[i]) + 1.0);
    for (std::int64_t k = 0; k < x[i]; ++k) prob *= pi[i];
  }
  return coeff * prob;
}

void enumerate_outcomes(std::size_t i, std::int64_t remaining, std::vector<std::int64_t>& y,
                        const std::vector<double>& pi,
                        const std::function<void(const std::vector<std::int64_t>&)>& visit) {
  if (i + 1 == y.size()) {
    y[i] = remaining;
    visit(y);
    return;
  }
  for (std::int64_t v = 0; v <= remaining; ++v) {
    y[i] = v;
    enumerate_outcomes(i + 1, remaining - v, y, pi, visit);
  }
}

double oracle_significance(const std::vector<double>& pi, const std::vector<std::int64_t>& x) {
  double px = oracle_point_probability(pi, x);
  std::int64_t n = std::accumulate(x.begin(), x.end(), std::int64_t{0});
  double total = 0.0;
  std::vector<std::int64_t> y(x.size(), 0);
  enumerate_outcomes(0, n, y, pi, [&](const std::vector<std::int64_t>& outcome) {
    double py = oracle_point_probability(pi, outcome);
    if (py <= px * (1.0 + 1e-12)) total += py;
  });
  return total;
}

}  // namespace

TEST_CASE("point probability worked values") {
  CHECK(multinomial_point_probability(std::vector<double>{0.5, 0.5},
                                      std::vector<std::int64_t>{3, 0}) ==
        Catch::Approx(0.125).epsilon(1e-12));
  CHECK(multinomial_point_probability(std::vector<double>{0.0, 1.0},
                                      std::vector<std::int64_t>{1, 1}) == 0.0);
  CHECK(multinomial_point_probability(std::vector<double>{0.9, 0.1},
                                      std::vector<std::int64_t>{0, 5}) ==
        Catch::Approx(1e-5).epsilon(1e-9));
}

TEST_CASE("exact significance worked values") {
  auto p1 = exact_significance(std::vector<double>{0.5, 0.5}, std::vector<std::int64_t>{3, 0});
  REQUIRE(p1.has_value());
  CHECK(*p1 == Catch::Approx(0.25).epsilon(1e-12));

  auto p2 = exact_significance(std::vector<double>{0.9, 0.1}, std::vector<std::int64_t>{0, 5});
  REQUIRE(p2.has_value());
  CHECK(*p2 == Catch::Approx(1e-5).epsilon(1e-9));

  // N=1 under a uniform distribution: every outcome ties, so Pr_s = 1.
  auto p3 = exact_significance(std::vector<double>{0.5, 0.5}, std::vector<std::int64_t>{1, 0});
  REQUIRE(p3.has_value());
  CHECK(*p3 == Catch::Approx(1.0).epsilon(1e-12));

  // Observed outcome impossible under pi.
  auto p4 = exact_significance(std::vector<double>{0.0, 1.0}, std::vector<std::int64_t>{1, 1});
  REQUIRE(p4.has_value());
  CHECK(*p4 == 0.0);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(multinomial_point_probability(std::vector<double>{0.5, 0.5},
                                                std::vector<std::int64_t>{1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(multinomial_point_probability(std::vector<double>{0.7, 0.7},
                                                std::vector<std::int64_t>{1, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(multinomial_point_probability(std::vector<double>{0.5, 0.5},
                                                std::vector<std::int64_t>{0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(normalize(std::vector<std::int64_t>{0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(montecarlo_significance(std::vector<double>{0.5, 0.5},
                                          std::vector<std::int64_t>{1, 1}, 100, 1),
                  std::invalid_argument);
}

TEST_CASE("normalize produces a probability vector") {
  auto pi = normalize(std::vector<std::int64_t>{2, 3, 5});
  CHECK(pi[0] == Catch::Approx(0.2));
  CHECK(std::accumulate(pi.begin(), pi.end(), 0.0) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("exact significance matches the brute-force oracle on random cases") {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t k = 2 + uniform_index(rng, 3);
    std::vector<double> pi(k);
    double sum = 0.0;
    for (auto& p : pi) {
      p = 0.05 + uniform01(rng);
      sum += p;
    }
    for (auto& p : pi) p /= sum;
    const std::int64_t n = 1 + static_cast<std::int64_t>(uniform_index(rng, 7));
    std::vector<std::int64_t> x(k, 0);
    for (std::int64_t i = 0; i < n; ++i) ++x[uniform_index(rng, k)];

    auto got = exact_significance(pi, x);
    REQUIRE(got.has_value());
    CHECK(*got == Catch::Approx(oracle_significance(pi, x)).margin(1e-9));
    CHECK(*got >= multinomial_point_probability(pi, x) - 1e-12);
    CHECK(*got <= 1.0);
  }
}

TEST_CASE("monte carlo agrees with the exact test") {
  const std::vector<double> pi{0.5, 0.5};
  const std::vector<std::int64_t> x{3, 0};
  double mc = montecarlo_significance(pi, x, 100'000, 99);
  CHECK(mc == Catch::Approx(0.25).margin(0.01));

  const std::vector<double> pi3{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const std::vector<std::int64_t> x3{10, 0, 0};
  double exact = *exact_significance(pi3, x3);
  double est = montecarlo_significance(pi3, x3, 100'000, 7);
  double se = std::sqrt(exact * (1.0 - exact) / 100'000.0);
  CHECK(std::fabs(est - exact) <= 3.0 * se + 1e-5);
}

TEST_CASE("significance dispatches on the enumeration budget") {
  // 60 categories at N=40 blows any reasonable budget.
  std::vector<double> pi(60, 1.0 / 60);
  std::vector<std::int64_t> x(60, 0);
  for (int i = 0; i < 40; ++i) x[static_cast<std::size_t>(i) % 60] += 1;
  CHECK_FALSE(exact_significance(pi, x, 1'000'000).has_value());
  SignificanceOptions options;
  options.rng_seed = 5;
  auto s = significance(pi, x, options);
  CHECK(s.monte_carlo);
  CHECK(s.p_value > 0.0);
  CHECK(s.p_value <= 1.0);

  auto small = significance(std::vector<double>{0.5, 0.5}, std::vector<std::int64_t>{3, 0});
  CHECK_FALSE(small.monte_carlo);
  CHECK(small.p_value == Catch::Approx(0.25));
}

TEST_CASE("single-draw tests handle very wide supports") {
  // n = 1 admits arbitrarily many categories within the outcome budget;
  // the tail sum must not blow the stack.
  const std::size_t k = 50'000;
  std::vector<double> pi(k, 1.0 / static_cast<double>(k));
  std::vector<std::int64_t> x(k, 0);
  x[17] = 1;
  auto p = exact_significance(pi, x);
  REQUIRE(p.has_value());
  CHECK(*p == Catch::Approx(1.0).margin(1e-9));  // uniform: every outcome ties

  // Skewed: only the observed category and lighter ones count.
  std::vector<double> skewed{0.5, 0.3, 0.15, 0.05};
  std::vector<std::int64_t> one{0, 0, 1, 0};
  auto ps = exact_significance(skewed, one);
  REQUIRE(ps.has_value());
  CHECK(*ps == Catch::Approx(0.20).margin(1e-12));  // 0.15 + 0.05
}

TEST_CASE("monte carlo is deterministic per seed") {
  const std::vector<double> pi{0.2, 0.3, 0.5};
  const std::vector<std::int64_t> x{4, 1, 0};
  CHECK(montecarlo_significance(pi, x, 10'000, 11) ==
        montecarlo_significance(pi, x, 10'000, 11));
}

TEST_CASE("mt rejects only below alpha") {
  CHECK(mt(std::vector<double>{0.5, 0.5}, std::vector<std::int64_t>{3, 0}) == 0.0);
  CHECK(mt(std::vector<double>{0.9, 0.1}, std::vector<std::int64_t>{0, 5}) ==
        Catch::Approx(0.99999).epsilon(1e-9));
  CHECK(mt(std::vector<double>{0.0, 1.0}, std::vector<std::int64_t>{1, 1}) == 1.0);
}

TEST_CASE("mt output is zero or above 1 - alpha") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t k = 2 + uniform_index(rng, 3);
    std::vector<double> pi(k);
    double sum = 0.0;
    for (auto& p : pi) {
      p = uniform01(rng);
      sum += p;
    }
    for (auto& p : pi) p /= sum;
    const std::int64_t n = 1 + static_cast<std::int64_t>(uniform_index(rng, 8));
    std::vector<std::int64_t> x(k, 0);
    for (std::int64_t i = 0; i < n; ++i) ++x[uniform_index(rng, k)];
    double v = mt(pi, x, 0.05);
    CHECK((v == 0.0 || (v > 0.95 && v <= 1.0)));
  }
}

TEST_CASE("test keeps its size under the null") {
  // Draw x from pi itself; at alpha = 0.05 the exact test is conservative,
  // so false rejections should stay rare.
  const std::vector<double> pi{0.3, 0.3, 0.4};
  std::mt19937_64 rng(77);
  std::vector<double> cum{0.3, 0.6, 1.0};
  int rejections = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::int64_t> x(3, 0);
    for (int i = 0; i < 20; ++i) ++x[sample_cumulative(cum, uniform01(rng))];
    if (mt(pi, x, 0.05) > 0.0) ++rejections;
  }
  CHECK(rejections <= trials * 6 / 100);
}

TEST_CASE("jointly permuting categories leaves exact results unchanged") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t k = 2 + uniform_index(rng, 3);
    std::vector<double> pi(k);
    double sum = 0.0;
    for (auto& p : pi) {
      p = uniform01(rng) + 0.01;
      sum += p;
    }
    for (auto& p : pi) p /= sum;
    const std::int64_t n = 1 + static_cast<std::int64_t>(uniform_index(rng, 6));
    std::vector<std::int64_t> x(k, 0);
    for (std::int64_t i = 0; i < n; ++i) ++x[uniform_index(rng, k)];

    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> pi_p(k);
    std::vector<std::int64_t> x_p(k);
    for (std::size_t i = 0; i < k; ++i) {
      pi_p[i] = pi[perm[i]];
      x_p[i] = x[perm[i]];
    }
    CHECK(multinomial_point_probability(pi_p, x_p) ==
          Catch::Approx(multinomial_point_probability(pi, x)).margin(1e-12));
    CHECK(*exact_significance(pi_p, x_p) ==
          Catch::Approx(*exact_significance(pi, x)).margin(1e-12));
  }
}
