#include "aoicache/agents/baselines.hpp"

#include <algorithm>
#include <sstream>

#include "aoicache/errors.hpp"
#include "aoicache/nncore/checkpoint.hpp"

namespace aoicache::agents {

DqnLearner::DqnLearner(const env::NetworkConfig& cfg, const Hyper& hyper, std::uint64_t seed)
    : cfg_(cfg), hyper_(hyper), rng_(derive_seed(seed, 0xd09)) {
  cfg_.validate();
  hyper_.validate();
  const std::uint64_t count = env::joint_action_count(cfg_);
  if (count > hyper_.dqn_action_cap) {
    std::ostringstream msg;
    msg << "intractable configuration for dqn: (F+1)^B = (" << cfg_.local_actions() << ")^" << cfg_.num_ens
        << " = " << count << " joint actions exceeds the enumeration cap of " << hyper_.dqn_action_cap;
    throw IntractableError(msg.str());
  }
  num_actions_ = static_cast<std::size_t>(count);
  Rng init(derive_seed(seed, 0x1417));
  q_ = nn::Mlp::make_standard(static_cast<std::size_t>(env::global_obs_size(cfg_)), hyper_.hidden,
                              num_actions_, init);
  q_target_ = q_;
  opt_ = nn::AdamState(q_.params());
  schedule_ = nn::LrSchedule(hyper_.q_lr, hyper_.total_steps, hyper_.lr_power, hyper_.lr_floor);
}

double DqnLearner::epsilon() const {
  const double horizon = hyper_.eps_fraction * static_cast<double>(hyper_.total_steps);
  const double frac = std::min(1.0, static_cast<double>(acts_) / horizon);
  return hyper_.eps_start + frac * (hyper_.eps_end - hyper_.eps_start);
}

env::JointAction DqnLearner::act(const Eigen::VectorXd& stacked_obs, bool explore) {
  if (explore) {
    const double eps = epsilon();
    ++acts_;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng_) < eps) {
      std::uniform_int_distribution<std::size_t> pick(0, num_actions_ - 1);
      return joint_from_index(pick(rng_), cfg_.num_ens, cfg_.local_actions());
    }
  }
  const Vector q = q_.forward(Vector(env::global_from_stacked(stacked_obs, cfg_)));
  Eigen::Index best = 0;
  q.maxCoeff(&best);
  return joint_from_index(static_cast<std::size_t>(best), cfg_.num_ens, cfg_.local_actions());
}

UpdateStats DqnLearner::update(const Batch& batch) {
  const Eigen::Index n = batch.size();
  const Matrix next_q = q_target_.forward(batch.next_global);
  const Eigen::RowVectorXd y = batch.rewards + hyper_.gamma * next_q.colwise().maxCoeff();

  const nn::Tape tape = nn::record_forward(q_, batch.global);
  Matrix adj = Matrix::Zero(tape.output.rows(), n);
  double loss = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto a = static_cast<Eigen::Index>(
        joint_index(batch.joint_actions[static_cast<std::size_t>(j)], cfg_.local_actions()));
    const double diff = tape.output(a, j) - y[j];
    loss += diff * diff;
    adj(a, j) = 2.0 * diff / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);
  if (!std::isfinite(loss)) throw DivergenceError("dqn loss is not finite");

  UpdateStats s;
  s.q_lr = schedule_.rate(updates_);
  s.loss_q = loss;
  nn::adam_step(q_.params(), nn::backward(q_, tape, adj).grads, opt_, s.q_lr);
  nn::soft_update(q_target_.params(), q_.params(), hyper_.tau);
  ++updates_;
  return s;
}

nlohmann::json DqnLearner::to_json() const {
  return {{"format", "agent"},
          {"version", nn::kCheckpointVersion},
          {"algorithm", "dqn"},
          {"num_ens", cfg_.num_ens},
          {"sensors_per_en", cfg_.sensors_per_en},
          {"q", nn::mlp_to_json(q_)},
          {"q_target", nn::mlp_to_json(q_target_)},
          {"updates", updates_},
          {"acts", acts_}};
}

void DqnLearner::load_json(const nlohmann::json& j) {
  if (j.value("format", "") != "agent" || j.value("algorithm", "") != "dqn")
    throw ConfigError("checkpoint is not a dqn agent");
  nn::Mlp q = nn::mlp_from_json(j.at("q"));
  nn::Mlp qt = nn::mlp_from_json(j.at("q_target"));
  if (q.layer_sizes() != q_.layer_sizes() || qt.layer_sizes() != q_.layer_sizes())
    throw ConfigError("checkpoint: dqn network shape does not match the scenario");
  q_ = std::move(q);
  q_target_ = std::move(qt);
  updates_ = j.at("updates").get<std::uint64_t>();
  acts_ = j.at("acts").get<std::uint64_t>();
}

RandomLearner::RandomLearner(const env::NetworkConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(derive_seed(seed, 0x7a9d)) {}

env::JointAction RandomLearner::act(const Eigen::VectorXd&, bool) {
  std::uniform_int_distribution<int> pick(1, cfg_.sensors_per_en);
  env::JointAction a(cfg_.num_ens);
  for (auto& x : a) x = pick(rng_);
  return a;
}

nlohmann::json RandomLearner::to_json() const {
  return {{"format", "agent"},
          {"version", nn::kCheckpointVersion},
          {"algorithm", "random"},
          {"num_ens", cfg_.num_ens},
          {"sensors_per_en", cfg_.sensors_per_en}};
}

double random_policy_expected_energy(const env::ChannelRealization& channel, const env::NetworkConfig& cfg) {
  double total = 0.0;
  for (int b = 0; b < cfg.num_ens; ++b) {
    double sum = 0.0;
    for (int i = 0; i < cfg.sensors_per_en; ++i) sum += channel.energy_j[b * cfg.sensors_per_en + i];
    total += sum / cfg.sensors_per_en;
  }
  return total;
}

}  // namespace aoicache::agents
