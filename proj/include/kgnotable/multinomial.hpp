#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "kgnotable/random.hpp"

namespace kgnotable {

// Relative slack when comparing outcome probabilities, so ties produced by
// different summation orders still count as "equally likely".
inline constexpr double kProbabilityCompareTolerance = 1e-12;

/// Counts -> probability vector. Zero-total input is rejected.
inline std::vector<double> normalize(std::span<const std::int64_t> counts) {
  long double total = 0;
  for (std::int64_t c : counts) {
    if (c < 0) throw std::invalid_argument("normalize: negative count");
    total += c;
  }
  if (total == 0) throw std::invalid_argument("normalize: zero-total count vector");
  std::vector<double> pi(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    pi[i] = static_cast<double>(counts[i] / total);
  }
  return pi;
}

namespace detail {

inline void check_multinomial_args(std::span<const double> pi, std::span<const std::int64_t> x) {
  if (pi.size() != x.size()) {
    throw std::invalid_argument("multinomial: probability and count vectors differ in length");
  }
  if (pi.empty()) throw std::invalid_argument("multinomial: empty vectors");
  double sum = 0.0;
  for (double p : pi) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("multinomial: probability out of [0,1]");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("multinomial: probabilities must sum to 1");
  }
  std::int64_t n = 0;
  for (std::int64_t c : x) {
    if (c < 0) throw std::invalid_argument("multinomial: negative count");
    n += c;
  }
  if (n < 1) throw std::invalid_argument("multinomial: total count must be >= 1");
}

inline std::vector<double> log_factorials(std::int64_t n) {
  std::vector<double> lf(static_cast<std::size_t>(n) + 1);
  for (std::int64_t i = 0; i <= n; ++i) lf[static_cast<std::size_t>(i)] = std::lgamma(double(i) + 1.0);
  return lf;
}

// Number of count vectors over k categories summing to n: C(n+k-1, k-1).
// Computed in doubles and capped, only used against the enumeration budget.
inline double composition_count(std::int64_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t i = 1; i < k; ++i) {
    c *= (static_cast<double>(n) + static_cast<double>(i)) / static_cast<double>(i);
    if (c > 1e18) return 1e18;
  }
  return c;
}

}  // namespace detail

/// log Pr(X = x) for X ~ Mult(N, pi), with 0^0 = 1: a zero-probability
/// category observed zero times contributes nothing, observed at all it
/// sends the whole probability to zero (-inf here).
inline double log_multinomial_point_probability(std::span<const double> pi,
                                                std::span<const std::int64_t> x) {
  detail::check_multinomial_args(pi, x);
  std::int64_t n = 0;
  for (std::int64_t c : x) n += c;
  double lp = std::lgamma(static_cast<double>(n) + 1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    if (pi[i] == 0.0) return -std::numeric_limits<double>::infinity();
    lp += static_cast<double>(x[i]) * std::log(pi[i]) -
          std::lgamma(static_cast<double>(x[i]) + 1.0);
  }
  return lp;
}

inline double multinomial_point_probability(std::span<const double> pi,
                                            std::span<const std::int64_t> x) {
  double lp = log_multinomial_point_probability(pi, x);
  return std::isinf(lp) ? 0.0 : std::exp(lp);
}

namespace detail {

struct SignificanceEnumerator {
  std::span<const double> log_pi;
  std::span<const double> lf;
  double lg_n_factorial;
  double threshold;
  double total = 0.0;

  void run(std::size_t level, std::int64_t remaining, double acc) {
    if (level + 1 == log_pi.size()) {
      double lp = lg_n_factorial + acc + static_cast<double>(remaining) * log_pi[level] -
                  lf[static_cast<std::size_t>(remaining)];
      if (lp <= threshold) total += std::exp(lp);
      return;
    }
    for (std::int64_t y = 0; y <= remaining; ++y) {
      run(level + 1, remaining - y,
          acc + static_cast<double>(y) * log_pi[level] - lf[static_cast<std::size_t>(y)]);
    }
  }
};

}  // namespace detail

/// Exact multinomial test: total probability of every outcome no more likely
/// than x under Mult(N, pi). Returns nullopt when the outcome count exceeds
/// the enumeration budget (callers then fall back to Monte Carlo).
inline std::optional<double> exact_significance(std::span<const double> pi,
                                                std::span<const std::int64_t> x,
                                                std::uint64_t budget = 1'000'000) {
  double log_px = log_multinomial_point_probability(pi, x);
  if (std::isinf(log_px)) {
    // Observed outcome is impossible under pi; only other impossible
    // outcomes are "equally or less likely", and they carry zero mass.
    return 0.0;
  }
  std::int64_t n = 0;
  for (std::int64_t c : x) n += c;

  if (n == 1) {
    // Single draw: outcomes are the categories themselves, so the tail is
    // the plain sum of category probabilities no larger than the observed
    // one. Also keeps the recursion below shallow: for n >= 2 the budget
    // caps the positive-category count at ~1400.
    double px = std::exp(log_px);
    double total = 0.0;
    for (double p : pi) {
      if (p > 0.0 && p <= px * (1.0 + kProbabilityCompareTolerance)) total += p;
    }
    return std::clamp(total, 0.0, 1.0);
  }

  std::vector<double> log_pi;
  log_pi.reserve(pi.size());
  for (double p : pi) {
    if (p > 0.0) log_pi.push_back(std::log(p));
  }
  if (detail::composition_count(n, log_pi.size()) > static_cast<double>(budget)) {
    return std::nullopt;
  }

  std::vector<double> lf = detail::log_factorials(n);
  detail::SignificanceEnumerator e{
      {log_pi.data(), log_pi.size()},
      {lf.data(), lf.size()},
      lf[static_cast<std::size_t>(n)],
      log_px + kProbabilityCompareTolerance,
  };
  e.run(0, n, 0.0);
  return std::clamp(e.total, 0.0, 1.0);
}

/// Monte Carlo estimate of the significance probability with the add-one
/// correction (1 + hits) / (samples + 1), deterministic per seed.
inline double montecarlo_significance(std::span<const double> pi,
                                      std::span<const std::int64_t> x,
                                      std::uint64_t samples, std::uint64_t seed) {
  detail::check_multinomial_args(pi, x);
  if (samples < 10'000) {
    throw std::invalid_argument("montecarlo_significance: needs at least 1e4 samples");
  }
  double log_px = log_multinomial_point_probability(pi, x);
  std::int64_t n = 0;
  for (std::int64_t c : x) n += c;

  std::vector<double> cum(pi.size());
  double run = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    run += pi[i];
    cum[i] = run;
  }
  cum.back() = 1.0;

  std::vector<double> lf = detail::log_factorials(n);
  std::vector<double> log_pi(pi.size(), 0.0);
  for (std::size_t i = 0; i < pi.size(); ++i) log_pi[i] = pi[i] > 0.0 ? std::log(pi[i]) : 0.0;
  const double lg_nf = lf[static_cast<std::size_t>(n)];
  const double threshold = log_px + kProbabilityCompareTolerance;

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> draw(static_cast<std::size_t>(n));
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (auto& d : draw) d = sample_cumulative(cum, uniform01(rng));
    std::sort(draw.begin(), draw.end());
    double lp = lg_nf;
    for (std::size_t i = 0; i < draw.size();) {
      std::size_t j = i;
      while (j < draw.size() && draw[j] == draw[i]) ++j;
      auto count = static_cast<std::int64_t>(j - i);
      lp += static_cast<double>(count) * log_pi[draw[i]] - lf[static_cast<std::size_t>(count)];
      i = j;
    }
    if (lp <= threshold) ++hits;
  }
  return (1.0 + static_cast<double>(hits)) / (static_cast<double>(samples) + 1.0);
}

struct SignificanceOptions {
  std::uint64_t exact_budget = 1'000'000;  // max outcomes for exact enumeration
  std::uint64_t mc_samples = 100'000;
  std::uint64_t rng_seed = 42;
};

struct Significance {
  double p_value;
  bool monte_carlo;  // true when the estimate came from sampling
};

/// Exact test when the outcome space fits the budget, Monte Carlo otherwise.
/// Impossible observations short-circuit to the exact value 0.
inline Significance significance(std::span<const double> pi, std::span<const std::int64_t> x,
                                 const SignificanceOptions& options = {}) {
  if (auto exact = exact_significance(pi, x, options.exact_budget)) {
    return {*exact, false};
  }
  return {montecarlo_significance(pi, x, options.mc_samples, options.rng_seed), true};
}

/// Multinomial-test score: 1 - Pr_s when the hypothesis of equality is
/// rejected at level alpha, else 0.
inline double mt(std::span<const double> pi, std::span<const std::int64_t> x,
                 double alpha = 0.05, const SignificanceOptions& options = {}) {
  double p = significance(pi, x, options).p_value;
  return p <= alpha ? 1.0 - p : 0.0;
}

}  // namespace kgnotable
