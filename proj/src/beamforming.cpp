#include "semnoma/beamforming.hpp"

#include <cmath>
#include <complex>

#include "semnoma/errors.hpp"

namespace semnoma {

CovariancePair build_covariances(int k, const NetworkScenario& scenario,
                                 const std::vector<std::uint8_t>& pi_row) {
  const int z = scenario.num_antennas;
  CovariancePair pair;
  pair.signal = scenario.tx_power_w[k] * scenario.channels[k] *
                scenario.channels[k].adjoint();
  pair.interference =
      scenario.noise_power_w() * Eigen::MatrixXcd::Identity(z, z);
  for (int j = 0; j < scenario.num_sus; ++j) {
    if (j == k || pi_row[j] == 0) continue;
    pair.interference += scenario.tx_power_w[j] * scenario.channels[j] *
                         scenario.channels[j].adjoint();
  }
  // Hermitian by construction up to rounding; symmetrize to hold it exactly.
  pair.signal = 0.5 * (pair.signal + pair.signal.adjoint()).eval();
  pair.interference = 0.5 * (pair.interference + pair.interference.adjoint()).eval();
  return pair;
}

namespace {

Eigen::VectorXcd canonical_phase(Eigen::VectorXcd w) {
  int arg_max = 0;
  double best = -1.0;
  for (int i = 0; i < w.size(); ++i) {
    const double m = std::abs(w(i));
    if (m > best) {
      best = m;
      arg_max = i;
    }
  }
  if (best > 0.0) w *= std::conj(w(arg_max)) / std::abs(w(arg_max));
  return w;
}

}  // namespace

Eigen::VectorXcd optimal_beamformer(const CovariancePair& pair) {
  // The signal matrix is p h h^H, so the top generalized eigenvector of
  // (signal, interference) is interference^-1 h up to scale. Recover h from
  // the dominant column of the rank-one signal matrix.
  const int z = static_cast<int>(pair.signal.rows());
  int col = 0;
  double best = -1.0;
  for (int i = 0; i < z; ++i) {
    const double d = std::abs(pair.signal(i, i).real());
    if (d > best) {
      best = d;
      col = i;
    }
  }
  const Eigen::VectorXcd h = pair.signal.col(col);
  Eigen::LLT<Eigen::MatrixXcd> llt(pair.interference);
  if (llt.info() != Eigen::Success)
    throw NumericalError("optimal_beamformer: interference matrix not PD");
  const double pivot_floor =
      1e-15 * std::abs(pair.interference.trace().real());
  const auto l_diag = llt.matrixLLT().diagonal();
  for (int i = 0; i < z; ++i)
    if (l_diag(i).real() * l_diag(i).real() < pivot_floor)
      throw NumericalError("optimal_beamformer: Cholesky pivot underflow");
  Eigen::VectorXcd w = llt.solve(h);
  const double n = w.norm();
  if (!(n > 0.0))
    throw NumericalError("optimal_beamformer: zero channel vector");
  return canonical_phase(w / n);
}

double rayleigh_quotient(const Eigen::VectorXcd& w, const CovariancePair& pair) {
  const std::complex<double> num = w.dot(pair.signal * w);
  const std::complex<double> den = w.dot(pair.interference * w);
  return num.real() / den.real();
}

std::vector<Eigen::VectorXcd> worst_case_beamformers(const NetworkScenario& scenario) {
  std::vector<std::uint8_t> all_interfering(scenario.num_sus, 1);
  std::vector<Eigen::VectorXcd> out(scenario.num_sus);
  for (int k = 0; k < scenario.num_sus; ++k)
    out[k] = optimal_beamformer(build_covariances(k, scenario, all_interfering));
  return out;
}

}  // namespace semnoma
