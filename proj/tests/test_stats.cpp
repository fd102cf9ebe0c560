#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "compbf/errors.hpp"
#include "compbf/rng.hpp"
#include "compbf/stats.hpp"

using Catch::Approx;

TEST_CASE("regularized incomplete gamma anchors", "[stats]") {
  // Frozen against an independent offline evaluation.
  REQUIRE(compbf::gamma_p(2.5, 1.3) == Approx(0.238634732154986).epsilon(1e-12));
  REQUIRE(compbf::gamma_p(7.0, 7.0) == Approx(0.550288944151301).epsilon(1e-12));
  REQUIRE(compbf::gamma_p(1.0, 1.0) ==
          Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
}

TEST_CASE("incomplete gamma closed forms at integer shape", "[stats]") {
  // P(3, x) = 1 - e^-x (1 + x + x^2/2)
  for (const double x : {0.1, 0.9, 2.7, 8.0, 25.0}) {
    const double closed = 1.0 - std::exp(-x) * (1.0 + x + 0.5 * x * x);
    REQUIRE(compbf::gamma_p(3.0, x) == Approx(closed).margin(1e-13));
    REQUIRE(compbf::gamma_q(3.0, x) == Approx(1.0 - closed).margin(1e-13));
  }
  REQUIRE(compbf::gamma_p(2.0, 0.0) == 0.0);
  REQUIRE(compbf::gamma_q(2.0, 0.0) == 1.0);
}

TEST_CASE("incomplete gamma complement consistency", "[stats]") {
  for (const double a : {0.4, 1.0, 3.3, 12.0})
    for (const double x : {0.2, 1.0, 4.0, 20.0})
      REQUIRE(compbf::gamma_p(a, x) + compbf::gamma_q(a, x) ==
              Approx(1.0).margin(1e-12));
}

TEST_CASE("gamma quantile inverts the CDF", "[stats]") {
  REQUIRE(compbf::gamma_quantile(3.0, 0.5) ==
          Approx(2.67406031372356).epsilon(1e-10));
  // Conditioning floor at p -> 1: pdf ~ 1e-10 here, so 1 ulp of P-space error
  // moves x by ~1e-6; 1e-7 relative is as tight as doubles allow.
  REQUIRE(compbf::gamma_quantile(2.0, 1.0 - 1e-10) ==
          Approx(26.3339815196485).epsilon(1e-7));
  for (const double p : {0.01, 0.123, 0.5, 0.97}) {
    const double x = compbf::gamma_quantile(1.7, p);
    REQUIRE(compbf::gamma_p(1.7, x) == Approx(p).margin(1e-12));
  }
  REQUIRE(compbf::gamma_quantile(4.0, 0.0) == 0.0);
}

TEST_CASE("gamma domain errors", "[stats]") {
  REQUIRE_THROWS_AS(compbf::gamma_p(0.0, 1.0), compbf::DomainError);
  REQUIRE_THROWS_AS(compbf::gamma_p(2.0, -0.1), compbf::DomainError);
  REQUIRE_THROWS_AS(compbf::gamma_quantile(2.0, 1.0), compbf::DomainError);
  REQUIRE_THROWS_AS(compbf::gamma_quantile(-1.0, 0.5), compbf::DomainError);
}

TEST_CASE("wilson interval anchors and edge cases", "[stats]") {
  const auto [lo, hi] = compbf::wilson_interval(40, 100);
  REQUIRE(lo == Approx(0.309401286432459).epsilon(1e-12));
  REQUIRE(hi == Approx(0.497997413208938).epsilon(1e-12));

  const auto [lo0, hi0] = compbf::wilson_interval(0, 50);
  REQUIRE(lo0 == Approx(0.0).margin(1e-12));
  REQUIRE(hi0 > 0.0);
  const auto [lon, hin] = compbf::wilson_interval(50, 50);
  REQUIRE(hin == Approx(1.0).margin(1e-12));
  REQUIRE(lon < 1.0);

  REQUIRE_THROWS_AS(compbf::wilson_interval(1, 0), compbf::DomainError);
  REQUIRE_THROWS_AS(compbf::wilson_interval(5, 4), compbf::DomainError);
}

TEST_CASE("KS statistic on a hand-worked example", "[stats]") {
  const std::vector<double> samples{0.1, 0.5, 0.9};
  const double d = compbf::ks_statistic(std::span<const double>(samples),
                                        [](double x) { return x; });
  // max over {1/3-0.1, 2/3-0.5, 1-0.9, 0.1, 0.5-1/3, 0.9-2/3} = 7/30
  REQUIRE(d == Approx(7.0 / 30.0).epsilon(1e-12));
}

TEST_CASE("KS critical value scaling", "[stats]") {
  REQUIRE(compbf::ks_critical(10000) == Approx(0.016276236).margin(1e-7));
  REQUIRE(compbf::ks_critical(400) ==
          Approx(2.0 * compbf::ks_critical(1600)).epsilon(1e-12));
  REQUIRE_THROWS_AS(compbf::ks_critical(0), compbf::DomainError);
  REQUIRE_THROWS_AS(compbf::ks_critical(10, 1.0), compbf::DomainError);
}

TEST_CASE("KS accepts a true exponential sample", "[stats]") {
  const std::size_t n = 5000;
  std::vector<double> samples(n);
  auto rng = compbf::make_stream(99, 0);
  std::exponential_distribution<double> exp1(1.0);
  for (auto& s : samples) s = exp1(rng);
  std::sort(samples.begin(), samples.end());
  const double d =
      compbf::ks_statistic(std::span<const double>(samples),
                           [](double x) { return 1.0 - std::exp(-x); });
  REQUIRE(d < compbf::ks_critical(n));
}

TEST_CASE("KS rejects a mis-specified distribution", "[stats]") {
  const std::size_t n = 5000;
  std::vector<double> samples(n);
  auto rng = compbf::make_stream(99, 1);
  std::exponential_distribution<double> exp1(2.0);  // wrong rate on purpose
  for (auto& s : samples) s = exp1(rng);
  std::sort(samples.begin(), samples.end());
  const double d =
      compbf::ks_statistic(std::span<const double>(samples),
                           [](double x) { return 1.0 - std::exp(-x); });
  REQUIRE(d > compbf::ks_critical(n));
}

TEST_CASE("substreams are deterministic and decorrelated", "[stats]") {
  auto a = compbf::make_stream(7, 3);
  auto b = compbf::make_stream(7, 3);
  auto c = compbf::make_stream(7, 4);
  REQUIRE(a() == b());
  bool differs = false;
  for (int i = 0; i < 4; ++i) differs = differs || (a() != c());
  REQUIRE(differs);
}
