#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "semnoma/decoding_order.hpp"
#include "semnoma/rng.hpp"

namespace semnoma {

// Physical world of one experiment: SU geometry, powers and channel vectors.
// Immutable after construction; share freely across threads.
struct NetworkScenario {
  int num_sus = 0;                          // K
  int num_antennas = 0;                     // Z
  double bandwidth_hz = 0.0;                // B
  double noise_psd_whz = 0.0;               // sigma^2
  std::vector<double> tx_power_w;           // p_o per SU
  std::vector<Eigen::VectorXcd> channels;   // h_k, length Z each
  std::vector<double> su_distances_m;
  double pathloss_exponent = 3.5;           // power pathloss d^-exp, 1 m reference
  double big_m = 0.0;                       // M in the priority constraints
  double weight_psi = 1.0;                  // latency weight in the objective
  std::uint64_t rng_seed = 0;

  double noise_power_w() const { return bandwidth_hz * noise_psd_whz; }

  /// Throws ConfigError on invalid dimensions or non-finite channels.
  void validate() const;
};

// Transmission-side decision state for one step.
struct LinkState {
  std::vector<Eigen::VectorXcd> beamformers;  // unit-norm omega_k
  DecodingOrder order;
  std::vector<double> demands_bits;           // Q_k

  void validate(const NetworkScenario& scenario) const;
};

// Effective powers after receive combining, precomputed once per channel
// draw: own(k) = |h_k^H w_k|^2 p_k, cross(k, j) = |h_j^H w_k|^2 p_j.
struct ChannelGains {
  Eigen::VectorXd own;
  Eigen::MatrixXd cross;

  static ChannelGains build(const NetworkScenario& scenario,
                            const std::vector<Eigen::VectorXcd>& beamformers);
};

/// Rayleigh-faded scenario: h_k ~ CN(0, d_k^-exponent I). Deterministic in seed.
/// Powers default to 1 W per SU; big_m to K + 1.
NetworkScenario sample_rayleigh_scenario(std::uint64_t seed, int num_sus,
                                         int num_antennas,
                                         const std::vector<double>& distances_m,
                                         double pathloss_exponent);

/// Redraw fading on an existing scenario, keeping geometry and powers.
void resample_channels(NetworkScenario& scenario, Rng& rng);

double sinr(int k, const ChannelGains& gains, const DecodingOrder& order,
            double noise_power_w);
double sinr(int k, const NetworkScenario& scenario, const LinkState& link);

double capacity(int k, const ChannelGains& gains, const DecodingOrder& order,
                double bandwidth_hz, double noise_power_w);
double capacity(int k, const NetworkScenario& scenario, const LinkState& link);

/// max_k Q_k / R_k. Returns 0 when all demands are zero and +inf when some
/// SU has demand but no rate; never throws.
double system_latency(const std::vector<double>& demands_bits,
                      const std::vector<double>& rates_bps);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double dbmhz_to_whz(double dbmhz);

}  // namespace semnoma
