#include "aoicache/agents/soft_actor_critic.hpp"

#include <algorithm>
#include <cmath>

#include "aoicache/errors.hpp"
#include "aoicache/nncore/checkpoint.hpp"

namespace aoicache::agents {

namespace {

nlohmann::json nets_to_json(const std::vector<nn::Mlp>& nets) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& n : nets) arr.push_back(nn::mlp_to_json(n));
  return arr;
}

void nets_from_json(std::vector<nn::Mlp>& nets, const nlohmann::json& arr, const char* what) {
  if (!arr.is_array() || arr.size() != nets.size())
    throw ConfigError(std::string("checkpoint: wrong number of ") + what + " networks");
  for (std::size_t i = 0; i < nets.size(); ++i) {
    nn::Mlp loaded = nn::mlp_from_json(arr[i]);
    if (loaded.layer_sizes() != nets[i].layer_sizes())
      throw ConfigError(std::string("checkpoint: ") + what + " network shape does not match the scenario");
    nets[i] = std::move(loaded);
  }
}

}  // namespace

SoftActorCritic::SoftActorCritic(const env::NetworkConfig& cfg, const Hyper& hyper, SacVariant variant,
                                 std::uint64_t seed)
    : cfg_(cfg), hyper_(hyper), variant_(variant), rng_(derive_seed(seed, 0x5ac)) {
  cfg_.validate();
  hyper_.validate();
  const int local = cfg_.local_actions();
  blocks_.assign(static_cast<std::size_t>(cfg_.num_ens), static_cast<std::size_t>(local));
  const auto global = static_cast<std::size_t>(env::global_obs_size(cfg_));
  const auto action_dim = static_cast<std::size_t>(cfg_.num_ens * local);

  Rng init(derive_seed(seed, 0x1417));
  const int num_critics = variant_.twin_critics ? 2 : 1;
  for (int k = 0; k < num_critics; ++k) {
    critics_.push_back(nn::Mlp::make_standard(global + action_dim, hyper_.hidden, 1, init));
    critic_opt_.emplace_back(critics_.back().params());
  }
  target_critics_ = critics_;
  if (variant_.layout == PolicyLayout::centralized) {
    heads_.push_back(nn::Mlp::make_standard(global, hyper_.hidden, action_dim, init));
  } else {
    for (int b = 0; b < cfg_.num_ens; ++b)
      heads_.push_back(nn::Mlp::make_standard(static_cast<std::size_t>(env::local_obs_size(cfg_)),
                                              hyper_.hidden, static_cast<std::size_t>(local), init));
  }
  for (const auto& h : heads_) head_opt_.emplace_back(h.params());

  log_alpha_ = std::log(hyper_.initial_alpha);
  target_entropy_ = hyper_.target_entropy_scale * cfg_.num_ens * std::log(static_cast<double>(local));
  q_schedule_ = nn::LrSchedule(hyper_.q_lr, hyper_.total_steps, hyper_.lr_power, hyper_.lr_floor);
  policy_schedule_ = nn::LrSchedule(hyper_.policy_lr, hyper_.total_steps, hyper_.lr_power, hyper_.lr_floor);
  alpha_schedule_ = nn::LrSchedule(hyper_.alpha_lr, hyper_.total_steps, hyper_.lr_power, hyper_.lr_floor);
}

Algorithm SoftActorCritic::algorithm() const {
  if (!variant_.entropy_bonus && !variant_.twin_critics) return Algorithm::ac;
  return variant_.layout == PolicyLayout::centralized ? Algorithm::madsac_cc : Algorithm::madsac_dc;
}

std::unique_ptr<Learner> SoftActorCritic::clone() const { return std::make_unique<SoftActorCritic>(*this); }

double SoftActorCritic::alpha() const { return variant_.entropy_bonus ? std::exp(log_alpha_) : 0.0; }

double SoftActorCritic::gs_temperature() const {
  const double c0 = hyper_.gs_temperature;
  if (hyper_.gs_temperature_final == c0) return c0;
  const double frac = std::min(1.0, static_cast<double>(updates_) / static_cast<double>(hyper_.total_steps));
  return c0 * std::pow(hyper_.gs_temperature_final / c0, frac);
}

PolicyView SoftActorCritic::policy_view(const Matrix& stacked, const Matrix& global) const {
  PolicyView view{heads_, {}};
  if (variant_.layout == PolicyLayout::centralized) {
    view.inputs.push_back(global);
  } else {
    const Eigen::Index len = env::local_obs_size(cfg_);
    for (int b = 0; b < cfg_.num_ens; ++b) view.inputs.push_back(row_block(stacked, b * len, len));
  }
  return view;
}

Vector SoftActorCritic::action_probs(const Eigen::VectorXd& stacked_obs) const {
  const Matrix stacked = stacked_obs;
  Matrix global;
  if (variant_.layout == PolicyLayout::centralized) global = env::global_from_stacked(stacked_obs, cfg_);
  const Matrix logits = policy_logits(policy_view(stacked, global));
  return nn::softmax_with_log(logits, blocks_).probs.col(0);
}

env::JointAction SoftActorCritic::act(const Eigen::VectorXd& stacked_obs, bool /*explore*/) {
  // Training and execution both sample the stochastic policy.
  return gumbel_max_sample(action_probs(stacked_obs), blocks_, rng_);
}

Eigen::RowVectorXd SoftActorCritic::compute_targets(const Batch& batch) {
  const Matrix noise = nn::gumbel_noise(static_cast<Eigen::Index>(cfg_.num_ens * cfg_.local_actions()),
                                        batch.size(), rng_);
  return soft_q_targets(policy_view(batch.next_stacked, batch.next_global), target_critics_,
                        batch.next_global, batch.rewards, noise, hyper_.gamma, alpha(), gs_temperature(),
                        blocks_);
}

double SoftActorCritic::update_critics(const Batch& batch, const Eigen::RowVectorXd& targets) {
  const Matrix inputs = critic_input(batch.global, batch.actions);
  const double lr = q_schedule_.rate(updates_);
  double total = 0.0;
  for (std::size_t k = 0; k < critics_.size(); ++k) {
    const CriticLoss cl = critic_loss(critics_[k], inputs, targets);
    nn::adam_step(critics_[k].params(), cl.grads, critic_opt_[k], lr);
    total += cl.value;
  }
  return total / static_cast<double>(critics_.size());
}

PolicyLoss SoftActorCritic::update_policy(const Batch& batch) {
  const PolicyView view = policy_view(batch.stacked, batch.global);
  PolicyLoss pl;
  if (hyper_.policy_estimator == PolicyEstimator::exact) {
    pl = policy_loss_exact(view, critics_, batch.global, alpha(), blocks_);
  } else {
    const Matrix noise = nn::gumbel_noise(static_cast<Eigen::Index>(cfg_.num_ens * cfg_.local_actions()),
                                          batch.size(), rng_);
    pl = policy_loss_gs(view, critics_, batch.global, noise, alpha(), gs_temperature(), blocks_);
  }
  const double lr = policy_schedule_.rate(updates_);
  for (std::size_t h = 0; h < heads_.size(); ++h)
    nn::adam_step(heads_[h].params(), pl.head_grads[h], head_opt_[h], lr);
  return pl;
}

double SoftActorCritic::update_temperature(const Eigen::RowVectorXd& log_pi) {
  if (!variant_.entropy_bonus) return std::numeric_limits<double>::quiet_NaN();
  const TemperatureLoss tl = temperature_loss(log_alpha_, log_pi, target_entropy_);
  alpha_opt_.step(log_alpha_, tl.grad_log_alpha, alpha_schedule_.rate(updates_));
  return tl.value;
}

void SoftActorCritic::soft_copy_targets() {
  for (std::size_t k = 0; k < critics_.size(); ++k)
    nn::soft_update(target_critics_[k].params(), critics_[k].params(), hyper_.tau);
}

UpdateStats SoftActorCritic::update(const Batch& batch) {
  UpdateStats s;
  s.q_lr = q_schedule_.rate(updates_);
  s.policy_lr = policy_schedule_.rate(updates_);
  const Eigen::RowVectorXd y = compute_targets(batch);
  s.loss_q = update_critics(batch, y);
  const PolicyLoss pl = update_policy(batch);
  s.loss_pi = pl.value;
  s.loss_alpha = update_temperature(pl.log_pi);
  soft_copy_targets();
  ++updates_;
  return s;
}

nlohmann::json SoftActorCritic::to_json() const {
  return {{"format", "agent"},
          {"version", nn::kCheckpointVersion},
          {"algorithm", to_string(algorithm())},
          {"num_ens", cfg_.num_ens},
          {"sensors_per_en", cfg_.sensors_per_en},
          {"critics", nets_to_json(critics_)},
          {"target_critics", nets_to_json(target_critics_)},
          {"policy", nets_to_json(heads_)},
          {"log_alpha", log_alpha_},
          {"target_entropy", target_entropy_},
          {"updates", updates_}};
}

void SoftActorCritic::load_json(const nlohmann::json& j) {
  if (j.value("format", "") != "agent") throw ConfigError("checkpoint is not an agent checkpoint");
  if (j.value("algorithm", "") != to_string(algorithm()))
    throw ConfigError("checkpoint algorithm '" + j.value("algorithm", "") + "' does not match '" +
                      to_string(algorithm()) + "'");
  nets_from_json(critics_, j.at("critics"), "critic");
  nets_from_json(target_critics_, j.at("target_critics"), "target critic");
  nets_from_json(heads_, j.at("policy"), "policy");
  log_alpha_ = j.at("log_alpha").get<double>();
  target_entropy_ = j.at("target_entropy").get<double>();
  updates_ = j.at("updates").get<std::uint64_t>();
}

}  // namespace aoicache::agents
