#include "aoicache/agents/train_step.hpp"

namespace aoicache::agents {

TrainStepResult train_step(env::Environment& environment, Learner& learner, ReplayBuffer& buffer,
                           std::size_t batch_size) {
  const env::NetworkConfig& cfg = environment.config();
  Eigen::VectorXd obs = env::stacked_local(environment.state(), cfg);
  TrainStepResult r;
  env::JointAction action = learner.act(obs, true);
  r.outcome = environment.step(action);
  if (!learner.learns()) return r;
  buffer.push({std::move(obs), std::move(action), r.outcome.reward, env::stacked_local(r.outcome.next, cfg)});
  if (buffer.size() >= batch_size) {
    const auto sample = buffer.sample(batch_size);
    r.stats = learner.update(make_batch(sample, cfg));
    r.updated = true;
  }
  return r;
}

}  // namespace aoicache::agents
