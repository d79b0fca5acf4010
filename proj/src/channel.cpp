#include "semnoma/channel.hpp"

#include <cmath>
#include <limits>

#include "semnoma/errors.hpp"
#include "semnoma/rng.hpp"

namespace semnoma {

void NetworkScenario::validate() const {
  if (num_sus < 1) throw ConfigError("scenario: num_sus must be >= 1");
  if (num_antennas < 1) throw ConfigError("scenario: num_antennas must be >= 1");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("scenario: bandwidth must be > 0");
  if (!(noise_psd_whz > 0.0)) throw ConfigError("scenario: noise psd must be > 0");
  if (static_cast<int>(tx_power_w.size()) != num_sus)
    throw ConfigError("scenario: tx_power_w size mismatch");
  for (double p : tx_power_w)
    if (!(p > 0.0)) throw ConfigError("scenario: tx power must be > 0");
  if (static_cast<int>(channels.size()) != num_sus)
    throw ConfigError("scenario: channel count mismatch");
  for (const auto& h : channels) {
    if (h.size() != num_antennas)
      throw ConfigError("scenario: channel vector length != num_antennas");
    if (!h.allFinite()) throw ConfigError("scenario: non-finite channel entry");
  }
  if (static_cast<int>(su_distances_m.size()) != num_sus)
    throw ConfigError("scenario: su_distances_m size mismatch");
  for (double d : su_distances_m)
    if (!(d > 0.0)) throw ConfigError("scenario: distances must be > 0");
  if (!(big_m > num_sus)) throw ConfigError("scenario: big_m must exceed num_sus");
}

void LinkState::validate(const NetworkScenario& scenario) const {
  if (static_cast<int>(beamformers.size()) != scenario.num_sus)
    throw ConfigError("link: beamformer count mismatch");
  for (const auto& w : beamformers) {
    if (w.size() != scenario.num_antennas)
      throw ConfigError("link: beamformer length != num_antennas");
    if (std::abs(w.norm() - 1.0) > 1e-9)
      throw ConfigError("link: beamformers must be unit-norm");
  }
  order.validate();
  if (order.num_sus != scenario.num_sus)
    throw ConfigError("link: decoding order size mismatch");
  if (static_cast<int>(demands_bits.size()) != scenario.num_sus)
    throw ConfigError("link: demand count mismatch");
  for (double q : demands_bits)
    if (q < 0.0) throw ConfigError("link: demands must be >= 0");
}

ChannelGains ChannelGains::build(const NetworkScenario& scenario,
                                 const std::vector<Eigen::VectorXcd>& beamformers) {
  const int k_count = scenario.num_sus;
  ChannelGains g;
  g.own = Eigen::VectorXd::Zero(k_count);
  g.cross = Eigen::MatrixXd::Zero(k_count, k_count);
  for (int k = 0; k < k_count; ++k) {
    for (int j = 0; j < k_count; ++j) {
      const std::complex<double> dot = scenario.channels[j].dot(beamformers[k]);
      const double gain = std::norm(dot) * scenario.tx_power_w[j];
      if (j == k)
        g.own(k) = gain;
      else
        g.cross(k, j) = gain;
    }
  }
  return g;
}

NetworkScenario sample_rayleigh_scenario(std::uint64_t seed, int num_sus,
                                         int num_antennas,
                                         const std::vector<double>& distances_m,
                                         double pathloss_exponent) {
  if (num_sus < 1) throw ConfigError("sample_rayleigh_scenario: num_sus must be >= 1");
  if (num_antennas < 1)
    throw ConfigError("sample_rayleigh_scenario: num_antennas must be >= 1");
  if (static_cast<int>(distances_m.size()) != num_sus)
    throw ConfigError("sample_rayleigh_scenario: need one distance per SU");
  for (double d : distances_m)
    if (!(d > 0.0)) throw ConfigError("sample_rayleigh_scenario: distances must be > 0");

  NetworkScenario s;
  s.num_sus = num_sus;
  s.num_antennas = num_antennas;
  s.bandwidth_hz = 2e6;
  s.noise_psd_whz = dbmhz_to_whz(-174.0);
  s.tx_power_w.assign(num_sus, 1.0);
  s.su_distances_m = distances_m;
  s.big_m = num_sus + 1.0;
  s.weight_psi = 1.0;
  s.rng_seed = seed;
  s.channels.resize(num_sus);
  Rng rng(seed);
  s.pathloss_exponent = pathloss_exponent;
  for (int k = 0; k < num_sus; ++k) {
    const double amp = std::pow(distances_m[k], -0.5 * pathloss_exponent);
    Eigen::VectorXcd h(num_antennas);
    for (int z = 0; z < num_antennas; ++z) h(z) = amp * rng.cnormal();
    s.channels[k] = h;
  }
  return s;
}

void resample_channels(NetworkScenario& scenario, Rng& rng) {
  for (int k = 0; k < scenario.num_sus; ++k) {
    const double amp =
        std::pow(scenario.su_distances_m[k], -0.5 * scenario.pathloss_exponent);
    for (int z = 0; z < scenario.num_antennas; ++z)
      scenario.channels[k](z) = amp * rng.cnormal();
  }
}

double sinr(int k, const ChannelGains& gains, const DecodingOrder& order,
            double noise_power_w) {
  double interference = 0.0;
  for (int j = 0; j < order.num_sus; ++j)
    if (j != k && order.decodes_before(k, j)) interference += gains.cross(k, j);
  return gains.own(k) / (interference + noise_power_w);
}

double sinr(int k, const NetworkScenario& scenario, const LinkState& link) {
  const ChannelGains gains = ChannelGains::build(scenario, link.beamformers);
  return sinr(k, gains, link.order, scenario.noise_power_w());
}

double capacity(int k, const ChannelGains& gains, const DecodingOrder& order,
                double bandwidth_hz, double noise_power_w) {
  return bandwidth_hz * std::log2(1.0 + sinr(k, gains, order, noise_power_w));
}

double capacity(int k, const NetworkScenario& scenario, const LinkState& link) {
  const ChannelGains gains = ChannelGains::build(scenario, link.beamformers);
  return capacity(k, gains, link.order, scenario.bandwidth_hz,
                  scenario.noise_power_w());
}

double system_latency(const std::vector<double>& demands_bits,
                      const std::vector<double>& rates_bps) {
  double worst = 0.0;
  for (std::size_t k = 0; k < demands_bits.size(); ++k) {
    if (demands_bits[k] <= 0.0) continue;
    if (rates_bps[k] <= 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, demands_bits[k] / rates_bps[k]);
  }
  return worst;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts * 1e3); }

double dbmhz_to_whz(double dbmhz) { return dbm_to_watts(dbmhz); }

}  // namespace semnoma
