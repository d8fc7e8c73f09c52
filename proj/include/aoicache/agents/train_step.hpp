#pragma once

#include "aoicache/agents/learner.hpp"
#include "aoicache/agents/replay_buffer.hpp"

namespace aoicache::agents {

struct TrainStepResult {
  env::StepOutcome outcome;
  UpdateStats stats;
  bool updated = false;
};

/// One epoch of the shared training loop: observe, act with the behaviour
/// policy, step the environment, store the transition, then run one
/// learner update once the buffer holds a full mini-batch.
TrainStepResult train_step(env::Environment& environment, Learner& learner, ReplayBuffer& buffer,
                           std::size_t batch_size);

}  // namespace aoicache::agents
