#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "compbf/analytic.hpp"
#include "compbf/geometry.hpp"
#include "compbf/stats.hpp"

using Catch::Approx;

TEST_CASE("lattice construction", "[geometry]") {
  const compbf::GridSpec spec;
  const auto positions = compbf::build_grid(spec);
  REQUIRE(positions.size() == 36);
  REQUIRE(positions[0] == std::array<double, 2>{0.0, 0.0});
  REQUIRE(positions[1] == std::array<double, 2>{500.0, 0.0});
  REQUIRE(positions[6] == std::array<double, 2>{0.0, 500.0});
  REQUIRE(positions[35] == std::array<double, 2>{2500.0, 2500.0});

  compbf::GridSpec bad;
  bad.spacing = 0.0;
  REQUIRE_THROWS_AS(compbf::build_grid(bad), compbf::DomainError);
}

TEST_CASE("lattice realization drops the user in the central cell",
          "[geometry]") {
  const compbf::GridSpec spec;
  for (const std::uint64_t seed : {1ULL, 2ULL, 77ULL}) {
    const auto net = compbf::realize_grid(spec, 2, seed);
    REQUIRE(net.bs_positions.size() == 36);
    REQUIRE(net.user_position[0] >= 1000.0);
    REQUIRE(net.user_position[0] <= 1500.0);
    REQUIRE(net.user_position[1] >= 1000.0);
    REQUIRE(net.user_position[1] <= 1500.0);
    REQUIRE(std::is_sorted(net.sorted_distances.begin(),
                           net.sorted_distances.end()));
    const double dx = net.bs_positions[0][0] - net.user_position[0];
    const double dy = net.bs_positions[0][1] - net.user_position[1];
    REQUIRE(std::sqrt(dx * dx + dy * dy) ==
            Approx(net.sorted_distances[0]).epsilon(1e-12));
  }
  // Same seed replays the same drop.
  const auto a = compbf::realize_grid(spec, 1, 5);
  const auto b = compbf::realize_grid(spec, 1, 5);
  REQUIRE(a.user_position == b.user_position);
  REQUIRE_THROWS_AS(compbf::realize_grid(spec, 36, 1), compbf::DomainError);
}

TEST_CASE("nearest-cluster selection and tie break", "[geometry]") {
  const std::vector<std::array<double, 2>> pts{{1.0, 0.0}, {0.0, 1.0}, {2.0, 0.0}};
  const std::array<double, 2> user{0.0, 0.0};
  const auto cluster = compbf::nearest_k_cluster(pts, user, 2);
  REQUIRE(cluster == std::vector<int>{0, 1});  // tie resolved by insertion index
  REQUIRE(compbf::nearest_k_cluster(pts, user, 3) ==
          std::vector<int>{0, 1, 2});
  REQUIRE_THROWS_AS(compbf::nearest_k_cluster(pts, user, 4),
                    compbf::DomainError);
  REQUIRE_THROWS_AS(compbf::nearest_k_cluster(pts, user, 0),
                    compbf::DomainError);
}

TEST_CASE("Poisson deployment reproducibility and shape", "[geometry]") {
  const double lambda = 1.0;
  const double radius = std::sqrt(1000.0 / std::numbers::pi);  // ~1000 points
  const auto a = compbf::sample_ppp(lambda, radius, 3, 11);
  const auto b = compbf::sample_ppp(lambda, radius, 3, 11);
  const auto c = compbf::sample_ppp(lambda, radius, 3, 12);
  REQUIRE(a.sorted_distances == b.sorted_distances);
  REQUIRE(a.bs_positions == b.bs_positions);
  REQUIRE(a.sorted_distances != c.sorted_distances);

  REQUIRE(a.sorted_distances.size() > 800);
  REQUIRE(a.sorted_distances.size() < 1200);
  REQUIRE(std::is_sorted(a.sorted_distances.begin(), a.sorted_distances.end()));
  for (std::size_t i = 0; i < a.bs_positions.size(); i += 97) {
    const double r = std::hypot(a.bs_positions[i][0], a.bs_positions[i][1]);
    REQUIRE(r == Approx(a.sorted_distances[i]).epsilon(1e-12));
  }
  REQUIRE_THROWS_AS(compbf::sample_ppp(0.0, 1.0, 1, 1), compbf::DomainError);
  REQUIRE_THROWS_AS(compbf::sample_ppp(1.0, -1.0, 1, 1), compbf::DomainError);
}

TEST_CASE("scaled distances follow the Poisson arrival law", "[geometry]") {
  // pi*lambda*d_K^2 is Gamma(K, 1); delta1 = d_1/d_K has the polynomial law.
  const int k = 3;
  const double lambda = 1.5;
  const double radius = std::sqrt(50.0 / (lambda * std::numbers::pi));
  const std::size_t n = 2000;
  std::vector<double> uk(n);
  std::vector<double> delta1(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto net = compbf::sample_ppp(lambda, radius, k, 9000 + i);
    REQUIRE(net.sorted_distances.size() >= static_cast<std::size_t>(k));
    const double dk = net.sorted_distances[k - 1];
    uk[i] = lambda * std::numbers::pi * dk * dk;
    delta1[i] = net.sorted_distances[0] / dk;
  }
  std::sort(uk.begin(), uk.end());
  std::sort(delta1.begin(), delta1.end());
  const double crit = compbf::ks_critical(n);
  const double ks_u = compbf::ks_statistic(
      std::span<const double>(uk),
      [](double x) { return compbf::gamma_p(3.0, x); });
  const double ks_delta = compbf::ks_statistic(
      std::span<const double>(delta1), [k](double x) {
        return compbf::delta1_cdf(k, std::clamp(x, 0.0, 1.0));
      });
  REQUIRE(ks_u < crit);
  REQUIRE(ks_delta < crit);
}

TEST_CASE("deployment scale invariance", "[geometry]") {
  // Quadrupling the density at half the radius replays the same arrivals, so
  // every distance shrinks by exactly a factor of two.
  const auto coarse = compbf::sample_ppp(1.0, 10.0, 2, 31);
  const auto fine = compbf::sample_ppp(4.0, 5.0, 2, 31);
  REQUIRE(coarse.sorted_distances.size() == fine.sorted_distances.size());
  for (std::size_t i = 0; i < coarse.sorted_distances.size(); ++i)
    REQUIRE(coarse.sorted_distances[i] ==
            Approx(2.0 * fine.sorted_distances[i]).epsilon(1e-12));
}

TEST_CASE("interferer-free annulus area", "[geometry]") {
  compbf::NetworkRealization net;
  net.sorted_distances = {1.0, 3.0, 4.0};
  REQUIRE(compbf::protection_area(net, 2) ==
          Approx(8.0 * std::numbers::pi).epsilon(1e-13));
  REQUIRE(compbf::protection_area(net, 1) == Approx(0.0).margin(1e-13));
  REQUIRE_THROWS_AS(compbf::protection_area(net, 4), compbf::DomainError);
}
