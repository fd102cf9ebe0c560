#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <span>

#include "compbf/errors.hpp"

namespace compbf {

// Channel rows for one coordinating base station: row i is the channel to
// in-cluster user i (row 0 = the BS's own user), entries CN(0, 1).
struct ChannelSet {
  Eigen::MatrixXcd rows;  // k x nt
};

struct BeamformingSolution {
  Eigen::VectorXcd v;         // unit-norm beamformer
  double gain = 0.0;          // |h_0 v|^2, the desired-signal fading power
  double max_residual = 0.0;  // max |h_i v| over nulled rows i >= 1
};

inline ChannelSet draw_channel_set(int k, int nt, std::mt19937_64& rng) {
  if (k < 1 || nt < 1) throw DomainError("channel dimensions must be >= 1");
  ChannelSet cs;
  cs.rows.resize(k, nt);
  std::normal_distribution<double> n01(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < nt; ++j) {
      const double re = n01(rng);
      const double im = n01(rng);
      cs.rows(i, j) = std::complex<double>(re * scale, im * scale);
    }
  return cs;
}

// Zero-forcing beamformer: project the desired channel's conjugate onto the
// orthogonal complement of the k-1 cross-channel rows, normalize, and fix the
// phase so that h_0 v is real nonnegative. Maximizes |h_0 v|^2 subject to the
// nulling constraints.
inline BeamformingSolution solve_zf_beamformer(const Eigen::MatrixXcd& rows,
                                               double tol = 1e-12) {
  const int k = static_cast<int>(rows.rows());
  const int nt = static_cast<int>(rows.cols());
  if (k < 1) throw DomainError("at least one channel row is required");
  if (nt < k) throw DomainError("zero-forcing feasibility requires nt >= k");

  const Eigen::VectorXcd h0 = rows.row(0).adjoint();  // conjugate of desired row
  Eigen::VectorXcd v = h0;
  if (k > 1) {
    const Eigen::MatrixXcd constraints = rows.bottomRows(k - 1);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(constraints.adjoint());
    qr.setThreshold(tol);
    if (qr.rank() < k - 1)
      throw RankDeficiencyError("cross-channel rows are linearly dependent");
    const Eigen::MatrixXcd q =
        qr.householderQ() * Eigen::MatrixXcd::Identity(nt, k - 1);
    v = h0 - q * (q.adjoint() * h0);
  }
  const double nv = v.norm();
  if (!(nv > tol * h0.norm()))
    throw RankDeficiencyError("desired channel lies in the nulled subspace");
  v /= nv;

  std::complex<double> c = rows.row(0) * v;
  const double ca = std::abs(c);
  if (ca > 0.0) v *= std::conj(c) / ca;

  BeamformingSolution sol;
  sol.v = v;
  c = rows.row(0) * v;
  sol.gain = std::norm(c);
  for (int i = 1; i < k; ++i)
    sol.max_residual = std::max(sol.max_residual, std::abs((rows.row(i) * v)(0)));
  return sol;
}

// Distributional shortcut for the beamforming gains: the desired gain is
// Gamma(nt-k+1, 1) (sum of nt-k+1 unit exponentials) and each out-of-cluster
// interferer's projected power is Exp(1); identical in law to the full
// pipeline without the linear algebra.
inline double fading_shortcut_sample(int k, int nt, std::mt19937_64& rng) {
  if (k < 1) throw DomainError("cluster size must be >= 1");
  if (nt < k) throw DomainError("zero-forcing feasibility requires nt >= k");
  std::exponential_distribution<double> exp1(1.0);
  double h = 0.0;
  for (int i = 0; i < nt - k + 1; ++i) h += exp1(rng);
  return h;
}

// Instantaneous SIR: desired fading times pathloss over the aggregate
// out-of-cluster interference. Noise is excluded by design.
inline double instantaneous_sir(double desired_gain, double d1,
                                std::span<const double> interferer_gains,
                                std::span<const double> interferer_distances,
                                double beta) {
  if (!(d1 > 0.0)) throw DomainError("serving distance must be positive");
  if (!(beta > 2.0)) throw DomainError("pathloss exponent must exceed 2");
  if (interferer_gains.size() != interferer_distances.size())
    throw DomainError("interferer gain/distance lengths differ");
  double denom = 0.0;
  for (std::size_t i = 0; i < interferer_gains.size(); ++i)
    denom += interferer_gains[i] * std::pow(interferer_distances[i], -beta);
  if (!(denom > 0.0))
    throw ZeroInterferenceError("zero aggregate interference: truncation bug");
  return desired_gain * std::pow(d1, -beta) / denom;
}

}  // namespace compbf
