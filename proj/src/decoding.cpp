#include "semnoma/decoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "semnoma/errors.hpp"

namespace semnoma {

double order_latency(const ChannelGains& gains, const DecodingOrder& order,
                     double bandwidth_hz, double noise_power_w,
                     const std::vector<double>& demands_bits) {
  const int k_count = order.num_sus;
  std::vector<double> rates(k_count);
  for (int k = 0; k < k_count; ++k)
    rates[k] = capacity(k, gains, order, bandwidth_hz, noise_power_w);
  return system_latency(demands_bits, rates);
}

std::pair<DecodingOrder, double> brute_force_order(
    const NetworkScenario& scenario,
    const std::vector<Eigen::VectorXcd>& beamformers,
    const std::vector<double>& demands_bits) {
  const int k_count = scenario.num_sus;
  if (k_count > 8)
    throw ConfigError(
        "brute_force_order: factorial search capped at 8 SUs, use sca_decoding");
  const ChannelGains gains = ChannelGains::build(scenario, beamformers);

  std::vector<int> perm(k_count);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm;
  double best_latency = std::numeric_limits<double>::infinity();
  do {
    const DecodingOrder order = DecodingOrder::from_permutation(perm);
    const double t = order_latency(gains, order, scenario.bandwidth_hz,
                                   scenario.noise_power_w(), demands_bits);
    if (t < best_latency) {  // lexicographic enumeration, first win keeps ties
      best_latency = t;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {DecodingOrder::from_permutation(best_perm), best_latency};
}

Eigen::VectorXd update_y(const ChannelGains& gains, double noise_power_w,
                         const Eigen::MatrixXd& pi_relaxed) {
  const int k_count = static_cast<int>(gains.own.size());
  Eigen::VectorXd y(k_count);
  for (int k = 0; k < k_count; ++k) {
    double denom = noise_power_w;
    for (int j = 0; j < k_count; ++j)
      if (j != k) denom += pi_relaxed(k, j) * gains.cross(k, j);
    y(k) = std::sqrt(gains.own(k)) / denom;
  }
  return y;
}

Eigen::VectorXd surrogate_sinr(const Eigen::VectorXd& y,
                               const ChannelGains& gains, double noise_power_w,
                               const Eigen::MatrixXd& pi_relaxed) {
  const int k_count = static_cast<int>(gains.own.size());
  Eigen::VectorXd s(k_count);
  for (int k = 0; k < k_count; ++k) {
    double denom = noise_power_w;
    for (int j = 0; j < k_count; ++j)
      if (j != k) denom += pi_relaxed(k, j) * gains.cross(k, j);
    s(k) = 2.0 * y(k) * std::sqrt(gains.own(k)) - y(k) * y(k) * denom;
  }
  return s;
}

namespace {

// Layout of the barrier variables: [pair values | u | pair slacks].
struct PairIndex {
  std::vector<std::pair<int, int>> pairs;  // (k, j) with k < j
  int count = 0;

  explicit PairIndex(int k_count) {
    for (int k = 0; k < k_count; ++k)
      for (int j = k + 1; j < k_count; ++j) pairs.emplace_back(k, j);
    count = static_cast<int>(pairs.size());
  }
};

Eigen::MatrixXd pairs_to_matrix(const PairIndex& idx, int k_count,
                                const Eigen::VectorXd& x) {
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(k_count, k_count);
  for (int p = 0; p < idx.count; ++p) {
    const auto [k, j] = idx.pairs[p];
    pi(k, j) = x(p);
    pi(j, k) = 1.0 - x(p);
  }
  return pi;
}

// Affine surrogate SINR per SU: s_k(x) = c0[k] + coef.row(k) * x.
struct AffineSinr {
  Eigen::VectorXd c0;
  Eigen::MatrixXd coef;  // k_count x pair count
};

AffineSinr build_affine_sinr(const ChannelGains& gains, double noise_power_w,
                             const Eigen::VectorXd& y, const PairIndex& idx) {
  const int k_count = static_cast<int>(gains.own.size());
  AffineSinr a;
  a.c0 = Eigen::VectorXd::Zero(k_count);
  a.coef = Eigen::MatrixXd::Zero(k_count, idx.count);
  for (int k = 0; k < k_count; ++k)
    a.c0(k) = 2.0 * y(k) * std::sqrt(gains.own(k)) - y(k) * y(k) * noise_power_w;
  for (int p = 0; p < idx.count; ++p) {
    const auto [k, j] = idx.pairs[p];
    // pi(k, j) = x_p feeds SU-k's interference; pi(j, k) = 1 - x_p feeds SU-j's.
    a.coef(k, p) -= y(k) * y(k) * gains.cross(k, j);
    a.c0(j) -= y(j) * y(j) * gains.cross(j, k);
    a.coef(j, p) += y(j) * y(j) * gains.cross(j, k);
  }
  return a;
}

}  // namespace

SubproblemResult solve_convex_subproblem(const ChannelGains& gains,
                                         double noise_power_w,
                                         double bandwidth_hz,
                                         const std::vector<double>& demands_bits,
                                         const Eigen::VectorXd& y,
                                         const Eigen::MatrixXd& expansion,
                                         const ScaOptions& opts) {
  const int k_count = static_cast<int>(gains.own.size());
  const PairIndex idx(k_count);
  const int np = idx.count;
  const int n = 2 * np + 1;  // pairs, u, slacks
  const int iu = np;

  SubproblemResult result;
  result.pi = Eigen::MatrixXd::Zero(k_count, k_count);
  result.slack = Eigen::VectorXd::Zero(np);

  std::vector<int> active;  // SUs with demand
  for (int k = 0; k < k_count; ++k)
    if (demands_bits[k] > 0.0) active.push_back(k);
  if (active.empty()) {
    result.pi = pairs_to_matrix(idx, k_count, Eigen::VectorXd::Constant(np, 0.5));
    result.latency_s = 0.0;
    result.feasible = true;
    return result;
  }

  const AffineSinr aff = build_affine_sinr(gains, noise_power_w, y, idx);
  const double ln2 = std::log(2.0);

  // Strictly feasible start at the expansion point.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int p = 0; p < np; ++p) {
    const auto [k, j] = idx.pairs[p];
    x(p) = std::clamp(expansion(k, j), 1e-4, 1.0 - 1e-4);
  }
  double u0 = std::numeric_limits<double>::infinity();
  for (int k : active) {
    const double s = aff.c0(k) + aff.coef.row(k) * x.head(np);
    if (!(s > 0.0)) {
      result.feasible = false;
      return result;
    }
    u0 = std::min(u0, bandwidth_hz * std::log2(1.0 + s) / demands_bits[k]);
  }
  if (!(u0 > 0.0) || !std::isfinite(u0)) {
    result.feasible = false;
    return result;
  }
  x(iu) = 0.5 * u0;
  const double u_scale = x(iu);

  // Linearized binary-enforcement terms for both directions of a pair:
  //   dir a: x_p (1 - 2 alpha) + alpha^2 <= slack_p
  //   dir b: (1 - x_p)(1 - 2 beta) + beta^2 <= slack_p
  Eigen::VectorXd lin_a_slope(np), lin_a_off(np), lin_b_slope(np), lin_b_off(np);
  for (int p = 0; p < np; ++p) {
    const auto [k, j] = idx.pairs[p];
    const double alpha = expansion(k, j);
    const double beta = expansion(j, k);
    lin_a_slope(p) = 1.0 - 2.0 * alpha;
    lin_a_off(p) = alpha * alpha;
    lin_b_slope(p) = -(1.0 - 2.0 * beta);
    lin_b_off(p) = (1.0 - 2.0 * beta) + beta * beta;
  }
  for (int p = 0; p < np; ++p) {
    const double need = std::max({0.0, lin_a_slope(p) * x(p) + lin_a_off(p),
                                  lin_b_slope(p) * x(p) + lin_b_off(p)});
    x(np + 1 + p) = need + 0.05;
  }

  const int n_constraints = static_cast<int>(active.size()) + 2 * np  // rate+box
                            + 2 * np                                  // lin pairs
                            + np + 1;                                 // slacks, u
  const double rho = opts.binary_penalty;

  // phi(x) = t * (-u / u_scale + rho * sum slack) - sum log c_i
  const auto eval = [&](const Eigen::VectorXd& v, double t, double* phi,
                        Eigen::VectorXd* grad, Eigen::MatrixXd* hess) -> bool {
    double value = t * (-v(iu) / u_scale);
    if (grad) {
      grad->setZero();
      (*grad)(iu) = -t / u_scale;
    }
    if (hess) hess->setZero();
    for (int p = 0; p < np; ++p) {
      value += t * rho * v(np + 1 + p);
      if (grad) (*grad)(np + 1 + p) += t * rho;
    }
    // Rate constraints (concave).
    for (int k : active) {
      const double s = aff.c0(k) + aff.coef.row(k) * v.head(np);
      if (!(1.0 + s > 0.0)) return false;
      const double c = bandwidth_hz * std::log2(1.0 + s) -
                       demands_bits[k] * v(iu);
      if (!(c > 0.0)) return false;
      value -= std::log(c);
      if (grad || hess) {
        Eigen::VectorXd dc = Eigen::VectorXd::Zero(n);
        const double scale = bandwidth_hz / (ln2 * (1.0 + s));
        dc.head(np) = scale * aff.coef.row(k).transpose();
        dc(iu) = -demands_bits[k];
        if (grad) *grad -= dc / c;
        if (hess) {
          *hess += (dc * dc.transpose()) / (c * c);
          // -hess(c)/c with hess(c) = -B/(ln2 (1+s)^2) ds ds^T
          Eigen::VectorXd ds = Eigen::VectorXd::Zero(n);
          ds.head(np) = aff.coef.row(k).transpose();
          *hess += (bandwidth_hz / (ln2 * (1.0 + s) * (1.0 + s) * c)) *
                   (ds * ds.transpose());
        }
      }
    }
    // Box, linearized-binary, slack and u positivity (all linear).
    for (int p = 0; p < np; ++p) {
      const int is = np + 1 + p;
      const double c_lo = v(p);
      const double c_hi = 1.0 - v(p);
      const double c_la = v(is) - (lin_a_slope(p) * v(p) + lin_a_off(p));
      const double c_lb = v(is) - (lin_b_slope(p) * v(p) + lin_b_off(p));
      const double c_s = v(is);
      if (!(c_lo > 0.0) || !(c_hi > 0.0) || !(c_la > 0.0) || !(c_lb > 0.0) ||
          !(c_s > 0.0))
        return false;
      value -= std::log(c_lo) + std::log(c_hi) + std::log(c_la) +
               std::log(c_lb) + std::log(c_s);
      if (grad) {
        (*grad)(p) += -1.0 / c_lo + 1.0 / c_hi;
        (*grad)(p) += lin_a_slope(p) / c_la + lin_b_slope(p) / c_lb;
        (*grad)(is) += -1.0 / c_la - 1.0 / c_lb - 1.0 / c_s;
      }
      if (hess) {
        (*hess)(p, p) += 1.0 / (c_lo * c_lo) + 1.0 / (c_hi * c_hi);
        (*hess)(p, p) += lin_a_slope(p) * lin_a_slope(p) / (c_la * c_la) +
                         lin_b_slope(p) * lin_b_slope(p) / (c_lb * c_lb);
        (*hess)(is, is) += 1.0 / (c_la * c_la) + 1.0 / (c_lb * c_lb) +
                           1.0 / (c_s * c_s);
        (*hess)(p, is) += -lin_a_slope(p) / (c_la * c_la) -
                          lin_b_slope(p) / (c_lb * c_lb);
        (*hess)(is, p) = (*hess)(p, is);
      }
    }
    {
      const double c_u = v(iu);
      if (!(c_u > 0.0)) return false;
      value -= std::log(c_u);
      if (grad) (*grad)(iu) += -1.0 / c_u;
      if (hess) (*hess)(iu, iu) += 1.0 / (c_u * c_u);
    }
    *phi = value;
    return true;
  };

  double t_barrier = 1.0;
  const double gap_target = std::min(1e-8, opts.kkt_tolerance);
  int newton_total = 0;
  Eigen::VectorXd grad(n);
  Eigen::MatrixXd hess(n, n);
  while (n_constraints / t_barrier > gap_target) {
    for (int it = 0; it < 60; ++it) {
      double phi;
      if (!eval(x, t_barrier, &phi, &grad, &hess)) {
        result.feasible = false;  // interior lost; should not happen
        return result;
      }
      Eigen::VectorXd step =
          hess.ldlt().solve(-grad);
      double decrement = -grad.dot(step);
      if (!(decrement > 0.0)) {  // fall back to steepest descent
        step = -grad;
        decrement = grad.squaredNorm();
      }
      if (decrement * 0.5 < 1e-10) break;
      double alpha = 1.0;
      double phi_new;
      for (int ls = 0; ls < 60; ++ls) {
        const Eigen::VectorXd cand = x + alpha * step;
        if (eval(cand, t_barrier, &phi_new, nullptr, nullptr) &&
            phi_new <= phi - 0.25 * alpha * decrement) {
          x = cand;
          break;
        }
        alpha *= 0.5;
        if (ls == 59) alpha = 0.0;
      }
      ++newton_total;
      if (alpha == 0.0) break;
    }
    t_barrier *= 10.0;
  }

  result.pi = pairs_to_matrix(idx, k_count, x.head(np));
  result.latency_s = 1.0 / x(iu);
  result.slack = x.segment(np + 1, np);
  result.kkt_residual = n_constraints / t_barrier;
  result.newton_steps = newton_total;
  result.feasible = true;
  return result;
}

namespace {

std::vector<int> order_by_row_sums(const Eigen::MatrixXd& pi) {
  const int k_count = static_cast<int>(pi.rows());
  std::vector<int> sus(k_count);
  std::iota(sus.begin(), sus.end(), 0);
  std::vector<double> row(k_count, 0.0);
  for (int k = 0; k < k_count; ++k) row[k] = pi.row(k).sum();
  std::stable_sort(sus.begin(), sus.end(),
                   [&](int a, int b) { return row[a] > row[b]; });
  return sus;
}

struct ScoredOrder {
  std::vector<int> perm;
  double latency;

  bool better_than(const ScoredOrder& other) const {
    if (latency != other.latency) return latency < other.latency;
    return perm < other.perm;
  }
};

}  // namespace

ScaResult sca_decoding(const NetworkScenario& scenario,
                       const std::vector<Eigen::VectorXcd>& beamformers,
                       const std::vector<double>& demands_bits,
                       const ScaOptions& opts) {
  const int k_count = scenario.num_sus;
  const ChannelGains gains = ChannelGains::build(scenario, beamformers);
  const double noise = scenario.noise_power_w();
  ScaResult result;

  const auto score = [&](const std::vector<int>& perm) {
    const DecodingOrder order = DecodingOrder::from_permutation(perm);
    return ScoredOrder{perm, order_latency(gains, order, scenario.bandwidth_hz,
                                           noise, demands_bits)};
  };

  std::vector<int> identity(k_count);
  std::iota(identity.begin(), identity.end(), 0);
  if (k_count == 1) {
    result.order = DecodingOrder::from_permutation(identity);
    result.latency_s = score(identity).latency;
    result.iterations = 1;
    return result;
  }

  Eigen::MatrixXd pi = Eigen::MatrixXd::Constant(k_count, k_count, 0.5);
  pi.diagonal().setZero();
  Eigen::MatrixXd expansion = pi;

  double prev_latency = std::numeric_limits<double>::infinity();
  int iterations = 0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Eigen::VectorXd y = update_y(gains, noise, pi);
    const SubproblemResult sub = solve_convex_subproblem(
        gains, noise, scenario.bandwidth_hz, demands_bits, y, expansion, opts);
    if (!sub.feasible) {
      if (k_count <= 8) {
        auto [order, latency] = brute_force_order(scenario, beamformers,
                                                  demands_bits);
        result.order = std::move(order);
        result.latency_s = latency;
        result.iterations = iterations;
        result.infeasible_fallback = true;
        return result;
      }
      result.order = DecodingOrder::from_permutation(identity);
      result.latency_s = score(identity).latency;
      result.iterations = iterations;
      result.infeasible_fallback = true;
      return result;
    }
    ++iterations;
    // Keep the accepted sequence monotone; a worsening step means the
    // linearization has stopped helping.
    if (sub.latency_s > prev_latency * (1.0 + 1e-9)) break;
    pi = sub.pi;
    expansion = sub.pi;
    if (opts.collect_trace) {
      result.trace.surrogate_latency.push_back(sub.latency_s);
      result.trace.merit.push_back(opts.binary_penalty * sub.slack.sum() -
                                   1.0 / std::max(sub.latency_s, 1e-300));
      result.trace.kkt_residual.push_back(sub.kkt_residual);
    }
    const bool converged =
        std::abs(prev_latency - sub.latency_s) <=
        opts.tol_latency * std::max(sub.latency_s, 1e-12);
    prev_latency = sub.latency_s;
    if (converged) break;
  }
  result.iterations = iterations;

  // Rounding: threshold at 0.5, repair pairing, order by row sums. The
  // fractional row sums give a second deterministic candidate.
  Eigen::MatrixXd rounded = Eigen::MatrixXd::Zero(k_count, k_count);
  for (int k = 0; k < k_count; ++k)
    for (int j = k + 1; j < k_count; ++j) {
      const double b = pi(k, j) >= 0.5 ? 1.0 : 0.0;
      rounded(k, j) = b;
      rounded(j, k) = 1.0 - b;
    }
  ScoredOrder best = score(order_by_row_sums(rounded));
  const ScoredOrder fractional = score(order_by_row_sums(pi));
  if (fractional.better_than(best)) best = fractional;

  // Adjacent-swap improvement, re-scored exactly; rounding can only be
  // suboptimal, never invalid.
  bool improved = true;
  while (improved) {
    improved = false;
    for (int pos = 0; pos + 1 < k_count; ++pos) {
      std::vector<int> cand = best.perm;
      std::swap(cand[pos], cand[pos + 1]);
      const ScoredOrder scored = score(cand);
      if (scored.better_than(best)) {
        best = scored;
        improved = true;
      }
    }
  }

  result.order = DecodingOrder::from_permutation(best.perm);
  result.latency_s = best.latency;
  return result;
}

}  // namespace semnoma
