#include "semnoma/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "semnoma/errors.hpp"

namespace semnoma {

namespace {

double softplus(double x) {
  return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Mlp Mlp::create(int input_dim, const std::vector<int>& hidden_dims,
                int output_dim, Rng& rng) {
  if (input_dim < 1 || output_dim < 1)
    throw ConfigError("mlp: dimensions must be positive");
  Mlp mlp;
  int in = input_dim;
  std::vector<int> dims = hidden_dims;
  dims.push_back(output_dim);
  for (std::size_t l = 0; l < dims.size(); ++l) {
    const int out = dims[l];
    Eigen::MatrixXd w(out, in);
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) w(r, c) = scale * rng.normal();
    // Small output layer keeps initial policies near-uniform.
    if (l + 1 == dims.size()) w *= 0.01;
    mlp.weights.push_back(std::move(w));
    mlp.biases.push_back(Eigen::VectorXd::Zero(out));
    in = out;
  }
  return mlp;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    a = (weights[l] * a + biases[l]).eval();
    if (l + 1 < weights.size()) a = a.array().tanh().matrix();
  }
  return a;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x, Trace& trace) const {
  trace.layer_inputs.clear();
  trace.layer_outputs.clear();
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    trace.layer_inputs.push_back(a);
    a = (weights[l] * a + biases[l]).eval();
    if (l + 1 < weights.size()) a = a.array().tanh().matrix();
    trace.layer_outputs.push_back(a);
  }
  return a;
}

void Mlp::backward(const Trace& trace, const Eigen::VectorXd& dout,
                   Mlp& grad) const {
  Eigen::VectorXd dz = dout;  // output layer is linear
  for (int l = static_cast<int>(weights.size()) - 1; l >= 0; --l) {
    grad.weights[l].noalias() += dz * trace.layer_inputs[l].transpose();
    grad.biases[l] += dz;
    if (l > 0) {
      Eigen::VectorXd da = weights[l].transpose() * dz;
      const Eigen::VectorXd& out = trace.layer_outputs[l - 1];
      dz = (da.array() * (1.0 - out.array().square())).matrix();
    }
  }
}

Mlp Mlp::zeros_like() const {
  Mlp z;
  for (const auto& w : weights) z.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : biases) z.biases.push_back(Eigen::VectorXd::Zero(b.size()));
  return z;
}

int Mlp::parameter_count() const {
  int n = 0;
  for (const auto& w : weights) n += static_cast<int>(w.size());
  for (const auto& b : biases) n += static_cast<int>(b.size());
  return n;
}

Eigen::VectorXd Mlp::flatten() const {
  Eigen::VectorXd flat(parameter_count());
  int off = 0;
  for (const auto& w : weights) {
    flat.segment(off, w.size()) = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
    off += static_cast<int>(w.size());
  }
  for (const auto& b : biases) {
    flat.segment(off, b.size()) = b;
    off += static_cast<int>(b.size());
  }
  return flat;
}

void Mlp::unflatten(const Eigen::VectorXd& flat) {
  int off = 0;
  for (auto& w : weights) {
    Eigen::Map<Eigen::VectorXd>(w.data(), w.size()) = flat.segment(off, w.size());
    off += static_cast<int>(w.size());
  }
  for (auto& b : biases) {
    b = flat.segment(off, b.size());
    off += static_cast<int>(b.size());
  }
}

Eigen::VectorXd Actor::flatten() const {
  Eigen::VectorXd flat(parameter_count());
  flat.head(net.parameter_count()) = net.flatten();
  flat.tail(log_std.size()) = log_std;
  return flat;
}

void Actor::unflatten(const Eigen::VectorXd& flat) {
  net.unflatten(flat.head(net.parameter_count()));
  log_std = flat.tail(log_std.size());
}

Actor make_actor(int state_dim, const std::vector<int>& hidden_dims,
                 const HeadSpec& heads, Rng& rng) {
  if (heads.output_dim() < 1) throw ConfigError("actor: empty head spec");
  Actor actor;
  actor.net = Mlp::create(state_dim, hidden_dims, heads.output_dim(), rng);
  actor.heads = heads;
  actor.log_std = Eigen::VectorXd::Constant(heads.num_gaussian, -0.5);
  return actor;
}

Critic make_critic(int state_dim, const std::vector<int>& hidden_dims, Rng& rng) {
  return Critic{Mlp::create(state_dim, hidden_dims, 1, rng)};
}

Eigen::VectorXd squashed_gauss(const Action& action) {
  return action.gauss_raw.array().tanh().matrix();
}

Eigen::VectorXd policy_forward(const Actor& actor, const Eigen::VectorXd& state,
                               const std::vector<std::uint8_t>& mask) {
  if (state.size() != actor.net.input_dim())
    throw ShapeError("policy_forward: state dimension mismatch");
  if (static_cast<int>(mask.size()) != actor.heads.num_bernoulli)
    throw ShapeError("policy_forward: mask length mismatch");
  const Eigen::VectorXd out = actor.net.forward(state);
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(actor.heads.num_bernoulli);
  for (int i = 0; i < actor.heads.num_bernoulli; ++i)
    if (mask[i]) probs(i) = sigmoid(out(i));
  return probs;
}

std::pair<std::vector<std::uint8_t>, double> sample_bits(
    const Eigen::VectorXd& probabilities, const std::vector<std::uint8_t>& mask,
    Rng& rng) {
  if (static_cast<int>(mask.size()) != probabilities.size())
    throw ShapeError("sample_bits: mask length mismatch");
  std::vector<std::uint8_t> bits(mask.size(), 0);
  double log_prob = 0.0;
  for (int i = 0; i < probabilities.size(); ++i) {
    if (!mask[i]) continue;
    const double p = probabilities(i);
    bits[i] = rng.bernoulli(p) ? 1 : 0;
    log_prob += bits[i] ? std::log(p) : std::log1p(-p);
  }
  return {bits, log_prob};
}

namespace {

struct HeadSlices {
  int bern_begin, bern_count;
  int cat_begin, cat_count;
  int gauss_begin, gauss_count;
};

HeadSlices slices(const HeadSpec& heads) {
  return {0, heads.num_bernoulli, heads.num_bernoulli, heads.num_categorical,
          heads.num_bernoulli + heads.num_categorical, heads.num_gaussian};
}

// log-probability + entropy of an action at given net output; optionally the
// gradients wrt the net output (dout gets w_lp * dlogp + w_ent * dentropy)
// and wrt log_std.
struct EvalResult {
  double log_prob = 0.0;
  double entropy = 0.0;
};

EvalResult eval_heads(const Actor& actor, const Eigen::VectorXd& out,
                      const std::vector<std::uint8_t>& mask, const Action& action,
                      double w_lp, double w_ent, Eigen::VectorXd* dout,
                      Eigen::VectorXd* dlog_std) {
  const HeadSlices hs = slices(actor.heads);
  EvalResult r;
  for (int i = 0; i < hs.bern_count; ++i) {
    if (!mask[i]) continue;
    const double z = out(hs.bern_begin + i);
    const double p = sigmoid(z);
    r.log_prob += action.bits[i] ? -softplus(-z) : -softplus(z);
    r.entropy += p * softplus(-z) + (1.0 - p) * softplus(z);
    if (dout) {
      const double dlp = (action.bits[i] ? 1.0 : 0.0) - p;
      const double dent = -z * p * (1.0 - p);
      (*dout)(hs.bern_begin + i) += w_lp * dlp + w_ent * dent;
    }
  }
  if (hs.cat_count > 0) {
    const Eigen::VectorXd logits = out.segment(hs.cat_begin, hs.cat_count);
    const double zmax = logits.maxCoeff();
    const Eigen::VectorXd shifted = logits.array() - zmax;
    const double lse = std::log(shifted.array().exp().sum());
    const Eigen::VectorXd logp = shifted.array() - lse;
    const Eigen::VectorXd p = logp.array().exp();
    r.log_prob += logp(action.category);
    const double h = -(p.array() * logp.array()).sum();
    r.entropy += h;
    if (dout) {
      for (int j = 0; j < hs.cat_count; ++j) {
        const double dlp = (j == action.category ? 1.0 : 0.0) - p(j);
        const double dent = -p(j) * (logp(j) + h);
        (*dout)(hs.cat_begin + j) += w_lp * dlp + w_ent * dent;
      }
    }
  }
  for (int g = 0; g < hs.gauss_count; ++g) {
    const double mean = out(hs.gauss_begin + g);
    const double ls = actor.log_std(g);
    const double s = std::exp(ls);
    const double z = action.gauss_raw(g);
    const double d = (z - mean) / s;
    // tanh-squash correction; constant in the parameters but kept so stored
    // log-probs are true densities of the squashed action.
    const double th = std::tanh(z);
    r.log_prob += -0.5 * d * d - ls - 0.5 * std::log(2.0 * M_PI) -
                  std::log(std::max(1.0 - th * th, 1e-12));
    r.entropy += ls + 0.5 * std::log(2.0 * M_PI * M_E);
    if (dout) (*dout)(hs.gauss_begin + g) += w_lp * (d / s);
    if (dlog_std) (*dlog_std)(g) += w_lp * (d * d - 1.0) + w_ent * 1.0;
  }
  return r;
}

}  // namespace

Action sample_action(const Actor& actor, const Eigen::VectorXd& state,
                     const std::vector<std::uint8_t>& mask, Rng& rng) {
  if (state.size() != actor.net.input_dim())
    throw ShapeError("sample_action: state dimension mismatch");
  const Eigen::VectorXd out = actor.net.forward(state);
  const HeadSlices hs = slices(actor.heads);
  Action action;
  action.bits.assign(hs.bern_count, 0);
  for (int i = 0; i < hs.bern_count; ++i)
    if (mask[i]) action.bits[i] = rng.bernoulli(sigmoid(out(hs.bern_begin + i))) ? 1 : 0;
  if (hs.cat_count > 0) {
    const Eigen::VectorXd logits = out.segment(hs.cat_begin, hs.cat_count);
    Eigen::VectorXd q = (logits.array() - logits.maxCoeff()).exp();
    q /= q.sum();
    double u = rng.uniform();
    int pick = hs.cat_count - 1;
    double acc = 0.0;
    for (int j = 0; j < hs.cat_count; ++j) {
      acc += q(j);
      if (u < acc) {
        pick = j;
        break;
      }
    }
    action.category = pick;
  }
  action.gauss_raw = Eigen::VectorXd::Zero(hs.gauss_count);
  for (int g = 0; g < hs.gauss_count; ++g)
    action.gauss_raw(g) =
        out(hs.gauss_begin + g) + std::exp(actor.log_std(g)) * rng.normal();
  action.log_prob =
      eval_heads(actor, out, mask, action, 0.0, 0.0, nullptr, nullptr).log_prob;
  return action;
}

double action_log_prob(const Actor& actor, const Eigen::VectorXd& state,
                       const std::vector<std::uint8_t>& mask, const Action& action) {
  const Eigen::VectorXd out = actor.net.forward(state);
  return eval_heads(actor, out, mask, action, 0.0, 0.0, nullptr, nullptr).log_prob;
}

void PpoHyper::validate() const {
  if (!(clip > 0.0 && clip < 1.0)) throw ConfigError("ppo: clip must be in (0,1)");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("ppo: gamma must be in (0,1]");
  if (!(gae_lambda > 0.0 && gae_lambda <= 1.0))
    throw ConfigError("ppo: gae_lambda must be in (0,1]");
  if (actor_lr <= 0.0 || critic_lr <= 0.0)
    throw ConfigError("ppo: learning rates must be > 0");
  if (epochs < 1 || minibatch < 1 || rollout < 1)
    throw ConfigError("ppo: epochs, minibatch and rollout must be >= 1");
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gae_advantages(
    const RolloutBuffer& buffer, double gamma, double lambda) {
  const int n = buffer.size();
  Eigen::VectorXd advantages = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd returns = Eigen::VectorXd::Zero(n);
  double last_gae = 0.0;
  for (int t = n - 1; t >= 0; --t) {
    const Transition& tr = buffer.items[t];
    const double next_value =
        tr.done ? 0.0 : (t + 1 < n ? buffer.items[t + 1].value : buffer.last_value);
    const double next_nonterminal = tr.done ? 0.0 : 1.0;
    const double delta = tr.reward + gamma * next_value * next_nonterminal - tr.value;
    last_gae = delta + gamma * lambda * next_nonterminal * last_gae;
    advantages(t) = last_gae;
    returns(t) = advantages(t) + tr.value;
  }
  const double mean = advantages.mean();
  const double var = (advantages.array() - mean).square().sum() / std::max(n - 1, 1);
  const double sd = std::sqrt(var);
  if (sd > 1e-8)
    advantages = ((advantages.array() - mean) / sd).matrix();
  else
    advantages = (advantages.array() - mean).matrix();
  return {advantages, returns};
}

void AdamState::apply(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
                      double lr) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  ++step;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v.array().matrix() + (1.0 - beta2) * grad.array().square().matrix();
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  params.array() -=
      lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
}

double actor_loss(const Actor& actor, const std::vector<const Transition*>& batch,
                  const Eigen::VectorXd& advantages, const PpoHyper& hyper,
                  Actor* grad, UpdateDiagnostics* diag) {
  const int n = static_cast<int>(batch.size());
  double pg_loss = 0.0;
  double entropy_sum = 0.0;
  double kl_sum = 0.0;
  int clipped = 0;
  Mlp net_grad = grad ? actor.net.zeros_like() : Mlp{};
  Eigen::VectorXd log_std_grad = Eigen::VectorXd::Zero(actor.log_std.size());

  for (int idx = 0; idx < n; ++idx) {
    const Transition& tr = *batch[idx];
    Mlp::Trace trace;
    const Eigen::VectorXd out = actor.net.forward(tr.state, trace);
    const EvalResult plain =
        eval_heads(actor, out, tr.mask, tr.action, 0.0, 0.0, nullptr, nullptr);
    const double ratio = std::exp(plain.log_prob - tr.action.log_prob);
    const double adv = advantages(idx);
    const double unclipped = ratio * adv;
    const double clipped_ratio = std::clamp(ratio, 1.0 - hyper.clip, 1.0 + hyper.clip);
    const double clipped_term = clipped_ratio * adv;
    pg_loss += -std::min(unclipped, clipped_term);
    entropy_sum += plain.entropy;
    kl_sum += (ratio - 1.0) - (plain.log_prob - tr.action.log_prob);
    if (std::abs(ratio - 1.0) > hyper.clip) ++clipped;

    if (grad) {
      // d(-min)/dlogp: active when the unclipped branch attains the min.
      const double w_lp = (unclipped <= clipped_term) ? -adv * ratio / n : 0.0;
      const double w_ent = -hyper.entropy_coef / n;
      Eigen::VectorXd dout = Eigen::VectorXd::Zero(out.size());
      eval_heads(actor, out, tr.mask, tr.action, w_lp, w_ent, &dout, &log_std_grad);
      actor.net.backward(trace, dout, net_grad);
    }
  }
  const double loss = pg_loss / n - hyper.entropy_coef * entropy_sum / n;
  if (diag) {
    diag->policy_loss = pg_loss / n;
    diag->entropy = entropy_sum / n;
    diag->approx_kl = kl_sum / n;
    diag->clip_fraction = static_cast<double>(clipped) / n;
  }
  if (grad) {
    grad->net = std::move(net_grad);
    grad->log_std = log_std_grad;
    grad->heads = actor.heads;
  }
  return loss;
}

double critic_loss(const Critic& critic, const std::vector<const Transition*>& batch,
                   const Eigen::VectorXd& returns, Critic* grad) {
  const int n = static_cast<int>(batch.size());
  double loss = 0.0;
  Mlp net_grad = grad ? critic.net.zeros_like() : Mlp{};
  for (int idx = 0; idx < n; ++idx) {
    Mlp::Trace trace;
    const double v = critic.net.forward(batch[idx]->state, trace)(0);
    const double err = v - returns(idx);
    loss += err * err;
    if (grad) {
      Eigen::VectorXd dout(1);
      dout(0) = 2.0 * err / n;
      critic.net.backward(trace, dout, net_grad);
    }
  }
  if (grad) grad->net = std::move(net_grad);
  return loss / n;
}

UpdateDiagnostics ppo_update(Actor& actor, Critic& critic, AdamState& actor_adam,
                             AdamState& critic_adam, const RolloutBuffer& buffer,
                             const PpoHyper& hyper, Rng& rng) {
  hyper.validate();
  UpdateDiagnostics diag;
  const int n = buffer.size();
  if (n == 0) return diag;
  auto [advantages, returns] = gae_advantages(buffer, hyper.gamma, hyper.gae_lambda);

  const Eigen::VectorXd actor_backup = actor.flatten();
  const Eigen::VectorXd critic_backup = critic.net.flatten();

  std::vector<int> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    // Fisher-Yates with the deterministic stream.
    for (int i = n - 1; i > 0; --i)
      std::swap(indices[i], indices[rng.uniform_int(0, i)]);
    for (int start = 0; start < n; start += hyper.minibatch) {
      const int count = std::min(hyper.minibatch, n - start);
      std::vector<const Transition*> batch(count);
      Eigen::VectorXd mb_adv(count), mb_ret(count);
      for (int i = 0; i < count; ++i) {
        const int src = indices[start + i];
        batch[i] = &buffer.items[src];
        mb_adv(i) = advantages(src);
        mb_ret(i) = returns(src);
      }
      Actor actor_grad;
      const double a_loss = actor_loss(actor, batch, mb_adv, hyper, &actor_grad, &diag);
      Critic critic_grad;
      const double c_loss = critic_loss(critic, batch, mb_ret, &critic_grad);
      if (!std::isfinite(a_loss) || !std::isfinite(c_loss)) {
        actor.unflatten(actor_backup);
        critic.net.unflatten(critic_backup);
        diag.aborted = true;
        return diag;
      }
      diag.value_loss = c_loss;
      Eigen::VectorXd actor_params = actor.flatten();
      actor_adam.apply(actor_params, actor_grad.flatten(), hyper.actor_lr);
      actor.unflatten(actor_params);
      Eigen::VectorXd critic_params = critic.net.flatten();
      critic_adam.apply(critic_params, critic_grad.net.flatten(), hyper.critic_lr);
      critic.net.unflatten(critic_params);
    }
  }
  return diag;
}

namespace {

constexpr std::uint32_t kCheckpointMagic = 0x534e4d41;  // "SNMA"
constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

void write_string(std::ofstream& out, const std::string& s) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::ifstream& in) {
  const auto n = read_pod<std::uint32_t>(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  return s;
}

void write_vector(std::ofstream& out, const Eigen::VectorXd& v) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

Eigen::VectorXd read_vector(std::ifstream& in) {
  const auto n = read_pod<std::uint32_t>(in);
  Eigen::VectorXd v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  return v;
}

void write_mlp(std::ofstream& out, const Mlp& mlp) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(mlp.weights.size()));
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(mlp.weights[l].rows()));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(mlp.weights[l].cols()));
    out.write(reinterpret_cast<const char*>(mlp.weights[l].data()),
              static_cast<std::streamsize>(mlp.weights[l].size() * sizeof(double)));
    write_vector(out, mlp.biases[l]);
  }
}

Mlp read_mlp(std::ifstream& in) {
  Mlp mlp;
  const auto layers = read_pod<std::uint32_t>(in);
  for (std::uint32_t l = 0; l < layers; ++l) {
    const auto rows = read_pod<std::uint32_t>(in);
    const auto cols = read_pod<std::uint32_t>(in);
    Eigen::MatrixXd w(rows, cols);
    in.read(reinterpret_cast<char*>(w.data()),
            static_cast<std::streamsize>(w.size() * sizeof(double)));
    mlp.weights.push_back(std::move(w));
    mlp.biases.push_back(read_vector(in));
  }
  return mlp;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_checkpoint: cannot write " + path);
  write_pod(out, kCheckpointMagic);
  write_pod(out, kCheckpointVersion);
  write_string(out, ckpt.scheme);
  write_pod<std::int32_t>(out, ckpt.state_dim);
  write_pod<std::int32_t>(out, ckpt.heads.num_bernoulli);
  write_pod<std::int32_t>(out, ckpt.heads.num_categorical);
  write_pod<std::int32_t>(out, ckpt.heads.num_gaussian);
  write_pod(out, ckpt.hyper.actor_lr);
  write_pod(out, ckpt.hyper.critic_lr);
  write_pod(out, ckpt.hyper.clip);
  write_pod(out, ckpt.hyper.gamma);
  write_pod(out, ckpt.hyper.gae_lambda);
  write_pod(out, ckpt.hyper.entropy_coef);
  write_pod<std::int32_t>(out, ckpt.hyper.epochs);
  write_pod<std::int32_t>(out, ckpt.hyper.minibatch);
  write_pod<std::int32_t>(out, ckpt.hyper.rollout);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.hyper.hidden_dims.size()));
  for (int hdim : ckpt.hyper.hidden_dims) write_pod<std::int32_t>(out, hdim);
  write_mlp(out, ckpt.actor.net);
  write_vector(out, ckpt.actor.log_std);
  write_mlp(out, ckpt.critic.net);
  if (!out) throw IoError("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_checkpoint: cannot open " + path);
  if (read_pod<std::uint32_t>(in) != kCheckpointMagic)
    throw VersionError("load_checkpoint: not a checkpoint file");
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kCheckpointVersion)
    throw VersionError("load_checkpoint: unsupported version " + std::to_string(version));
  Checkpoint ckpt;
  ckpt.scheme = read_string(in);
  ckpt.state_dim = read_pod<std::int32_t>(in);
  ckpt.heads.num_bernoulli = read_pod<std::int32_t>(in);
  ckpt.heads.num_categorical = read_pod<std::int32_t>(in);
  ckpt.heads.num_gaussian = read_pod<std::int32_t>(in);
  ckpt.hyper.actor_lr = read_pod<double>(in);
  ckpt.hyper.critic_lr = read_pod<double>(in);
  ckpt.hyper.clip = read_pod<double>(in);
  ckpt.hyper.gamma = read_pod<double>(in);
  ckpt.hyper.gae_lambda = read_pod<double>(in);
  ckpt.hyper.entropy_coef = read_pod<double>(in);
  ckpt.hyper.epochs = read_pod<std::int32_t>(in);
  ckpt.hyper.minibatch = read_pod<std::int32_t>(in);
  ckpt.hyper.rollout = read_pod<std::int32_t>(in);
  const auto hidden_count = read_pod<std::uint32_t>(in);
  ckpt.hyper.hidden_dims.clear();
  for (std::uint32_t i = 0; i < hidden_count; ++i)
    ckpt.hyper.hidden_dims.push_back(read_pod<std::int32_t>(in));
  ckpt.actor.net = read_mlp(in);
  ckpt.actor.log_std = read_vector(in);
  ckpt.actor.heads = ckpt.heads;
  ckpt.critic.net = read_mlp(in);
  if (!in) throw IoError("load_checkpoint: truncated file " + path);
  return ckpt;
}

}  // namespace semnoma
