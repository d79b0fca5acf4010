#pragma once

#include <Eigen/Dense>
#include <vector>

#include "semnoma/channel.hpp"

namespace semnoma {

// Numerator/denominator matrices of the per-SU generalized Rayleigh quotient:
// signal = h_k h_k^H p_k (rank one), interference = sum of interferer outer
// products plus B sigma^2 I (positive definite).
struct CovariancePair {
  Eigen::MatrixXcd signal;
  Eigen::MatrixXcd interference;
};

/// pi_row[j] != 0 marks SU-j as decoded after SU-k, i.e. an interferer of k.
/// pi_row[k] is ignored.
CovariancePair build_covariances(int k, const NetworkScenario& scenario,
                                 const std::vector<std::uint8_t>& pi_row);

/// Maximizer of w^H S w / w^H I w, unit-norm, largest-magnitude entry rotated
/// real-positive. The rank-one numerator reduces the eigenproblem to one
/// Cholesky solve: w* ~ interference^-1 h. Throws NumericalError if the
/// Cholesky factorization degenerates.
Eigen::VectorXcd optimal_beamformer(const CovariancePair& pair);

double rayleigh_quotient(const Eigen::VectorXcd& w, const CovariancePair& pair);

/// Per-SU beamformers under the worst-case decoding condition: every other SU
/// treated as interference. Reused across decoding-order updates in one step.
std::vector<Eigen::VectorXcd> worst_case_beamformers(const NetworkScenario& scenario);

}  // namespace semnoma
