#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "semnoma/channel.hpp"
#include "semnoma/decoding_order.hpp"

namespace semnoma {

struct ScaOptions {
  double tol_latency = 1e-4;     // relative stop on the surrogate latency
  int max_iterations = 50;
  double binary_penalty = 2.0;   // weight on the linearized binary slack
  double kkt_tolerance = 1e-6;   // barrier duality-gap target
  bool collect_trace = false;
};

struct ScaTrace {
  std::vector<double> surrogate_latency;  // per accepted iteration
  std::vector<double> merit;              // penalized objective
  std::vector<double> kkt_residual;
};

struct ScaResult {
  DecodingOrder order;
  double latency_s = 0.0;  // exact re-evaluation of the returned order
  int iterations = 0;
  bool infeasible_fallback = false;
  ScaTrace trace;
};

struct SubproblemResult {
  Eigen::MatrixXd pi;      // relaxed precedence, pairing holds exactly
  double latency_s = 0.0;  // 1/u from the subproblem
  Eigen::VectorXd slack;   // per unordered pair
  bool feasible = false;
  double kkt_residual = 0.0;
  int newton_steps = 0;
};

/// Exact latency of a candidate order under fixed beamformers.
double order_latency(const ChannelGains& gains, const DecodingOrder& order,
                     double bandwidth_hz, double noise_power_w,
                     const std::vector<double>& demands_bits);

/// Exhaustive search over all K! orders; ties resolved toward the
/// lexicographically smallest permutation. Guarded at K <= 8.
std::pair<DecodingOrder, double> brute_force_order(
    const NetworkScenario& scenario,
    const std::vector<Eigen::VectorXcd>& beamformers,
    const std::vector<double>& demands_bits);

/// Tight auxiliary point of the quadratic transform:
/// y_k = sqrt(own_k) / (sum_j pi(k,j) cross(k,j) + noise).
Eigen::VectorXd update_y(const ChannelGains& gains, double noise_power_w,
                         const Eigen::MatrixXd& pi_relaxed);

/// Concave-in-y surrogate of the SINR; linear in pi for fixed y and equal to
/// the true SINR at the tight y.
Eigen::VectorXd surrogate_sinr(const Eigen::VectorXd& y,
                               const ChannelGains& gains, double noise_power_w,
                               const Eigen::MatrixXd& pi_relaxed);

/// One convexified subproblem: maximize u = 1/T subject to surrogate-rate,
/// box and pairing constraints, with the linearized binary-enforcement
/// constraints softened by penalized slacks (a hard version is infeasible at
/// any interior expansion point). Solved by a log-barrier Newton method.
SubproblemResult solve_convex_subproblem(const ChannelGains& gains,
                                         double noise_power_w,
                                         double bandwidth_hz,
                                         const std::vector<double>& demands_bits,
                                         const Eigen::VectorXd& y,
                                         const Eigen::MatrixXd& expansion,
                                         const ScaOptions& opts);

/// Successive convex approximation for the decoding order, followed by
/// rounding (threshold, pairing repair, row-sum ordering) and an exact
/// re-scored adjacent-swap improvement pass. Falls back to brute force for
/// K <= 8 if a subproblem loses feasibility.
ScaResult sca_decoding(const NetworkScenario& scenario,
                       const std::vector<Eigen::VectorXcd>& beamformers,
                       const std::vector<double>& demands_bits,
                       const ScaOptions& opts = {});

}  // namespace semnoma
