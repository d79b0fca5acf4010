#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "semnoma/rng.hpp"

namespace semnoma {

// Dense net with tanh hidden layers and a linear output layer.
struct Mlp {
  std::vector<Eigen::MatrixXd> weights;  // out x in per layer
  std::vector<Eigen::VectorXd> biases;

  static Mlp create(int input_dim, const std::vector<int>& hidden_dims,
                    int output_dim, Rng& rng);

  int input_dim() const { return static_cast<int>(weights.front().cols()); }
  int output_dim() const { return static_cast<int>(weights.back().rows()); }

  // Post-activation values per layer, kept for backprop.
  struct Trace {
    std::vector<Eigen::VectorXd> layer_inputs;   // input to each layer
    std::vector<Eigen::VectorXd> layer_outputs;  // activated output of each layer
  };

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& x, Trace& trace) const;

  /// Accumulates d(loss)/d(params) into grad given d(loss)/d(output).
  void backward(const Trace& trace, const Eigen::VectorXd& dout, Mlp& grad) const;

  Mlp zeros_like() const;
  int parameter_count() const;
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& flat);
};

// Composite policy head: independent Bernoulli bits (feature selection),
// one optional categorical slot (decoding-order index) and optional
// squashed-Gaussian dimensions (beamformer entries).
struct HeadSpec {
  int num_bernoulli = 0;
  int num_categorical = 0;  // number of classes, 0 disables the head
  int num_gaussian = 0;

  int output_dim() const { return num_bernoulli + num_categorical + num_gaussian; }
};

struct Actor {
  Mlp net;
  HeadSpec heads;
  Eigen::VectorXd log_std;  // per Gaussian dimension

  int parameter_count() const { return net.parameter_count() + static_cast<int>(log_std.size()); }
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& flat);
};

struct Critic {
  Mlp net;
};

Actor make_actor(int state_dim, const std::vector<int>& hidden_dims,
                 const HeadSpec& heads, Rng& rng);
Critic make_critic(int state_dim, const std::vector<int>& hidden_dims, Rng& rng);

struct Action {
  std::vector<std::uint8_t> bits;  // aligned with the full candidate list
  int category = -1;
  Eigen::VectorXd gauss_raw;       // pre-squash sample
  double log_prob = 0.0;
};

/// tanh-squashed Gaussian dimensions in (-1, 1).
Eigen::VectorXd squashed_gauss(const Action& action);

/// Per-candidate Bernoulli probabilities; out-of-mask entries are exactly 0
/// and never sampled.
Eigen::VectorXd policy_forward(const Actor& actor, const Eigen::VectorXd& state,
                               const std::vector<std::uint8_t>& mask);

/// Independent Bernoulli sampling from given probabilities (in-mask only),
/// with the joint log-probability.
std::pair<std::vector<std::uint8_t>, double> sample_bits(
    const Eigen::VectorXd& probabilities, const std::vector<std::uint8_t>& mask,
    Rng& rng);

/// Full composite sample from the actor.
Action sample_action(const Actor& actor, const Eigen::VectorXd& state,
                     const std::vector<std::uint8_t>& mask, Rng& rng);

/// Log-probability of a stored action under the current parameters.
double action_log_prob(const Actor& actor, const Eigen::VectorXd& state,
                       const std::vector<std::uint8_t>& mask, const Action& action);

struct Transition {
  Eigen::VectorXd state;
  std::vector<std::uint8_t> mask;
  Action action;
  double reward = 0.0;
  double value = 0.0;
  bool done = true;
};

struct RolloutBuffer {
  std::vector<Transition> items;
  double last_value = 0.0;  // bootstrap when the rollout is truncated mid-episode

  void add(Transition t) { items.push_back(std::move(t)); }
  void clear() { items.clear(); }
  int size() const { return static_cast<int>(items.size()); }
};

struct PpoHyper {
  double actor_lr = 1e-4;
  double critic_lr = 1e-4;
  double clip = 0.2;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double entropy_coef = 0.01;
  int epochs = 10;
  int minibatch = 64;
  int rollout = 2048;
  std::vector<int> hidden_dims{128, 128};

  void validate() const;
};

/// Standard recursive GAE. Advantages come back normalized to zero mean and
/// unit variance (guarded for tiny batches); returns are advantages plus
/// values, computed before normalization.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gae_advantages(
    const RolloutBuffer& buffer, double gamma, double lambda);

// First/second Adam moments over the flattened parameter vector.
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;

  static AdamState zeros(int n) { return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0}; }
  void apply(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr);
};

struct UpdateDiagnostics {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  bool aborted = false;
};

/// Clipped-surrogate PPO update with entropy bonus over the whole buffer.
/// A non-finite loss aborts the update and leaves the parameters untouched.
UpdateDiagnostics ppo_update(Actor& actor, Critic& critic, AdamState& actor_adam,
                             AdamState& critic_adam, const RolloutBuffer& buffer,
                             const PpoHyper& hyper, Rng& rng);

/// Actor loss (clipped surrogate + entropy bonus) and its analytic gradient,
/// exposed for finite-difference verification.
double actor_loss(const Actor& actor, const std::vector<const Transition*>& batch,
                  const Eigen::VectorXd& advantages, const PpoHyper& hyper,
                  Actor* grad, UpdateDiagnostics* diag = nullptr);

/// Mean squared error of the critic against returns, with gradient.
double critic_loss(const Critic& critic, const std::vector<const Transition*>& batch,
                   const Eigen::VectorXd& returns, Critic* grad);

// Versioned binary checkpoint of one trained agent.
struct Checkpoint {
  std::string scheme;
  int state_dim = 0;
  HeadSpec heads;
  PpoHyper hyper;
  Actor actor;
  Critic critic;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace semnoma
