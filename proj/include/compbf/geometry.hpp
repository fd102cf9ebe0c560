#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "compbf/errors.hpp"
#include "compbf/rng.hpp"

namespace compbf {

// One sampled deployment: base stations in ascending distance order from the
// user, plus the seed record needed to replay it exactly.
struct NetworkRealization {
  std::vector<std::array<double, 2>> bs_positions;  // ascending distance order
  std::array<double, 2> user_position{0.0, 0.0};
  std::vector<double> sorted_distances;  // strictly ascending
  int cluster_size = 1;
  double lambda = 0.0;         // 0 for deterministic deployments
  double window_radius = 0.0;  // 0 for deterministic deployments
  std::uint64_t seed = 0;
};

// Square lattice deployment; the drop region is the central cell.
struct GridSpec {
  int side_count = 6;
  double spacing = 500.0;
  std::array<double, 4> drop_region{1000.0, 1000.0, 1500.0, 1500.0};  // x0,y0,x1,y1
};

namespace detail {

// Sorted squared distances of a unit-density Poisson process: scaled squared
// distances pi*lambda*d^2 are unit-rate Poisson arrivals, so a running sum of
// Exp(1) gaps yields them already ordered -- no sort required.
inline void sample_scaled_sq_distances(std::mt19937_64& rng, double s_max,
                                       std::vector<double>& out) {
  out.clear();
  std::exponential_distribution<double> exp1(1.0);
  double s = 0.0;
  for (;;) {
    s += exp1(rng);
    if (s > s_max) break;
    out.push_back(s);
  }
}

}  // namespace detail

// Poisson deployment of density lambda in a disc of the given radius around
// the user at the origin. Draw order is fixed (all radial gaps, then all
// angles) so distance-only consumers can replay the radial stream.
inline NetworkRealization sample_ppp(double lambda, double radius,
                                     int cluster_size, std::uint64_t seed) {
  if (!(lambda > 0.0)) throw DomainError("sample_ppp requires lambda > 0");
  if (!(radius > 0.0)) throw DomainError("sample_ppp requires radius > 0");
  if (cluster_size < 1) throw DomainError("cluster size must be >= 1");

  NetworkRealization net;
  net.cluster_size = cluster_size;
  net.lambda = lambda;
  net.window_radius = radius;
  net.seed = seed;

  auto rng = make_stream(seed, 0);
  const double pilam = std::numbers::pi * lambda;
  std::vector<double> scaled;
  detail::sample_scaled_sq_distances(rng, pilam * radius * radius, scaled);

  net.sorted_distances.reserve(scaled.size());
  for (double s : scaled) net.sorted_distances.push_back(std::sqrt(s / pilam));

  std::uniform_real_distribution<double> uang(0.0, 2.0 * std::numbers::pi);
  net.bs_positions.reserve(scaled.size());
  for (double r : net.sorted_distances) {
    const double th = uang(rng);
    net.bs_positions.push_back({r * std::cos(th), r * std::sin(th)});
  }
  return net;
}

// Indices of the K nearest positions to the user; ties broken by insertion
// index (probability zero under continuous sampling, but constructible).
inline std::vector<int> nearest_k_cluster(
    const std::vector<std::array<double, 2>>& positions,
    const std::array<double, 2>& user, int k) {
  if (k < 1) throw DomainError("cluster size must be >= 1");
  if (static_cast<std::size_t>(k) > positions.size())
    throw DomainError("cluster size exceeds available points");
  std::vector<std::pair<double, int>> order;
  order.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double dx = positions[i][0] - user[0];
    const double dy = positions[i][1] - user[1];
    order.emplace_back(dx * dx + dy * dy, static_cast<int>(i));
  }
  std::sort(order.begin(), order.end());
  std::vector<int> cluster(k);
  for (int i = 0; i < k; ++i) cluster[i] = order[i].second;
  return cluster;
}

inline std::vector<int> nearest_k_cluster(const NetworkRealization& net, int k) {
  return nearest_k_cluster(net.bs_positions, net.user_position, k);
}

// Lattice positions row-major: (ix * spacing, iy * spacing).
inline std::vector<std::array<double, 2>> build_grid(const GridSpec& spec) {
  if (spec.side_count < 1 || !(spec.spacing > 0.0))
    throw DomainError("grid spec requires side_count >= 1 and spacing > 0");
  std::vector<std::array<double, 2>> positions;
  positions.reserve(static_cast<std::size_t>(spec.side_count) * spec.side_count);
  for (int iy = 0; iy < spec.side_count; ++iy)
    for (int ix = 0; ix < spec.side_count; ++ix)
      positions.push_back({ix * spec.spacing, iy * spec.spacing});
  return positions;
}

// Lattice deployment with a user dropped uniformly in the drop region.
inline NetworkRealization realize_grid(const GridSpec& spec, int cluster_size,
                                       std::uint64_t seed) {
  if (cluster_size < 1) throw DomainError("cluster size must be >= 1");
  auto positions = build_grid(spec);
  if (static_cast<std::size_t>(cluster_size) >= positions.size())
    throw DomainError("cluster size must leave at least one interferer");

  NetworkRealization net;
  net.cluster_size = cluster_size;
  net.seed = seed;
  auto rng = make_stream(seed, 0);
  std::uniform_real_distribution<double> ux(spec.drop_region[0], spec.drop_region[2]);
  std::uniform_real_distribution<double> uy(spec.drop_region[1], spec.drop_region[3]);
  net.user_position = {ux(rng), uy(rng)};

  std::vector<std::pair<double, int>> order;
  order.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double dx = positions[i][0] - net.user_position[0];
    const double dy = positions[i][1] - net.user_position[1];
    order.emplace_back(dx * dx + dy * dy, static_cast<int>(i));
  }
  std::sort(order.begin(), order.end());
  net.bs_positions.reserve(positions.size());
  net.sorted_distances.reserve(positions.size());
  for (const auto& [d2, idx] : order) {
    net.bs_positions.push_back(positions[idx]);
    net.sorted_distances.push_back(std::sqrt(d2));
  }
  return net;
}

// Annulus guaranteed free of out-of-cluster interferers:
// pi * (d_K^2 - d_1^2).
inline double protection_area(const NetworkRealization& net, int k) {
  if (k < 1) throw DomainError("cluster size must be >= 1");
  if (net.sorted_distances.size() < static_cast<std::size_t>(k))
    throw DomainError("realization has fewer than k points");
  const double d1 = net.sorted_distances.front();
  const double dk = net.sorted_distances[k - 1];
  return std::numbers::pi * (dk * dk - d1 * d1);
}

}  // namespace compbf
