#include <doctest.h>

#include <cmath>
#include <string>

#include "aoicache/agents/baselines.hpp"
#include "aoicache/agents/learner.hpp"
#include "aoicache/agents/losses.hpp"
#include "aoicache/agents/replay_buffer.hpp"
#include "aoicache/agents/sampling.hpp"
#include "aoicache/agents/soft_actor_critic.hpp"
#include "aoicache/agents/train_step.hpp"
#include "aoicache/checks/oracles.hpp"
#include "aoicache/errors.hpp"

using namespace aoicache;
using namespace aoicache::agents;

namespace {

env::NetworkConfig small_scenario(int b, int f) {
  env::NetworkConfig cfg;
  cfg.num_ens = b;
  cfg.sensors_per_en = f;
  return cfg;
}

Hyper small_hyper() {
  Hyper h;
  h.hidden = 16;
  h.batch_size = 8;
  h.buffer_capacity = 64;
  return h;
}

// Fills a buffer with random-policy transitions and returns a batch.
Batch random_batch(const env::NetworkConfig& cfg, std::size_t n, std::uint64_t seed) {
  env::Environment environment(cfg, seed);
  RandomLearner random(cfg, seed);
  ReplayBuffer buffer(n, seed);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd obs = env::stacked_local(environment.state(), cfg);
    env::JointAction a = random.act(obs, true);
    const auto out = environment.step(a);
    buffer.push({obs, a, out.reward, env::stacked_local(out.next, cfg)});
  }
  return make_batch(buffer.chronological(), cfg);
}

}  // namespace

TEST_CASE("joint index is a bijection onto (F+1)^B") {
  const int b = 3, k = 11;
  CHECK(env::joint_action_count(small_scenario(3, 10)) == 1331);
  for (std::size_t i = 0; i < 1331; ++i) CHECK(joint_index(joint_from_index(i, b, k), k) == i);
  CHECK(joint_index({1, 0, 0}, k) == 1);
  CHECK(joint_index({0, 1, 0}, k) == 11);
  CHECK(joint_index({10, 10, 10}, k) == 1330);
}

TEST_CASE("one-hot blocks") {
  const Vector v = one_hot_blocks({2, 0}, 3);
  Vector expected(6);
  expected << 0, 0, 1, 1, 0, 0;
  CHECK(v == expected);
}

TEST_CASE("gumbel-max reproduces the factorized categorical") {
  const std::vector<std::size_t> blocks{3, 2};
  Vector probs(5);
  probs << 0.6, 0.3, 0.1, 0.25, 0.75;
  Rng rng(21);
  std::vector<double> freq(6, 0.0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) freq[joint_index(gumbel_max_sample(probs, blocks, rng), 3)] += 1.0 / n;
  std::vector<double> exact(6);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto a = joint_from_index(i, 2, 3);
    if (a[1] > 1) continue;
    exact[i] = probs[a[0]] * probs[3 + a[1]];
  }
  // Index layout uses radix 3 for both blocks; the second block only has two entries.
  CHECK(checks::total_variation(freq, exact) < 0.005);
}

TEST_CASE("gs relaxation is a per-block simplex, deterministic in the noise") {
  const std::vector<std::size_t> blocks{3, 3};
  Matrix logits(6, 4);
  logits.setRandom();
  Matrix log_probs = logits;
  for (int c = 0; c < 4; ++c)
    for (int b = 0; b < 2; ++b) {
      const double lse = std::log(logits.col(c).segment(3 * b, 3).array().exp().sum());
      log_probs.col(c).segment(3 * b, 3).array() -= lse;
    }
  Rng rng(2);
  const GsSample s = gs_sample(log_probs, 0.7, blocks, rng);
  for (int c = 0; c < 4; ++c)
    for (int b = 0; b < 2; ++b) CHECK(s.relaxed.col(c).segment(3 * b, 3).sum() == doctest::Approx(1.0));
  const GsSample again = gs_relax(log_probs, s.noise, 0.7, blocks);
  CHECK(again.relaxed == s.relaxed);
  CHECK(again.hard == s.hard);

  // Very small temperature collapses onto the hard argmax.
  const GsSample cold = gs_relax(log_probs, s.noise, 1e-4, blocks);
  for (int c = 0; c < 4; ++c)
    for (int b = 0; b < 2; ++b) CHECK(cold.relaxed(3 * b + s.hard(b, c), c) == doctest::Approx(1.0));
  CHECK_THROWS_AS(gs_sample(log_probs, 0.0, blocks, rng), ConfigError);
}

TEST_CASE("relaxed log-prob at a one-hot equals the joint log-prob") {
  const std::vector<std::size_t> blocks{3, 3};
  Vector probs(6);
  probs << 0.2, 0.5, 0.3, 0.1, 0.1, 0.8;
  const Vector logp = probs.array().log();
  const env::JointAction a{1, 2};
  Matrix z(6, 1);
  z.col(0) = one_hot_blocks(a, 3);
  Matrix lp(6, 1);
  lp.col(0) = logp;
  CHECK(relaxed_log_prob(z, lp)[0] == doctest::Approx(std::log(0.5 * 0.8)));
  CHECK(joint_log_prob(logp, a, blocks) == doctest::Approx(std::log(0.5 * 0.8)));
  Vector uniform = Vector::Constant(6, 1.0 / 3.0);
  CHECK(total_entropy(uniform, blocks) == doctest::Approx(2.0 * std::log(3.0)));
  CHECK(floored_log(0.0) == -1e9);
}

TEST_CASE("replay buffer is a ring") {
  ReplayBuffer buffer(3, 1);
  for (int i = 0; i < 5; ++i) buffer.push({Eigen::VectorXd::Constant(1, i), {i}, double(i), Eigen::VectorXd()});
  CHECK(buffer.size() == 3);
  CHECK(buffer.total_pushed() == 5);
  const auto chron = buffer.chronological();
  REQUIRE(chron.size() == 3);
  CHECK(chron[0]->reward == 2.0);
  CHECK(chron[1]->reward == 3.0);
  CHECK(chron[2]->reward == 4.0);
  const auto sample = buffer.sample(3);
  double sum = 0.0;
  for (const auto* e : sample) sum += e->reward;
  CHECK(sum == 9.0);
  CHECK_THROWS(buffer.sample(4));
}

TEST_CASE("batch assembly") {
  const auto cfg = small_scenario(2, 3);
  const Batch batch = random_batch(cfg, 10, 3);
  CHECK(batch.size() == 10);
  CHECK(batch.stacked.rows() == 2 * env::local_obs_size(cfg));
  CHECK(batch.global.rows() == env::global_obs_size(cfg));
  CHECK(batch.actions.rows() == 8);
  for (int c = 0; c < 10; ++c) {
    CHECK(batch.actions.col(c) == one_hot_blocks(batch.joint_actions[c], 4));
    CHECK(batch.global.col(c) == env::global_from_stacked(batch.stacked.col(c), cfg));
  }
}

TEST_CASE("temperature rises when entropy falls short of the target") {
  const double target = 2.0;
  Eigen::RowVectorXd low_entropy = Eigen::RowVectorXd::Constant(4, -0.5);   // entropy 0.5
  Eigen::RowVectorXd high_entropy = Eigen::RowVectorXd::Constant(4, -3.0);  // entropy 3.0
  const auto low = temperature_loss(std::log(0.2), low_entropy, target);
  const auto high = temperature_loss(std::log(0.2), high_entropy, target);
  // Gradient descent on log alpha moves against the gradient.
  CHECK(low.grad_log_alpha < 0.0);
  CHECK(high.grad_log_alpha > 0.0);
  CHECK(low.value == doctest::Approx(-0.2 * 1.5));
  CHECK(low.grad_log_alpha == doctest::Approx(-0.2 * 1.5));
}

TEST_CASE("undiscounted targets reduce to the reward") {
  const auto cfg = small_scenario(2, 3);
  SoftActorCritic sac(cfg, small_hyper(), {}, 5);
  const Batch batch = random_batch(cfg, 12, 5);
  const PolicyView view = sac.policy_view(batch.next_stacked, batch.next_global);
  Matrix noise = Matrix::Zero(8, batch.size());
  const auto y = soft_q_targets(view, sac.target_critics(), batch.next_global, batch.rewards, noise, 0.0,
                                0.3, 1.0, sac.blocks());
  CHECK((y - batch.rewards).cwiseAbs().maxCoeff() == 0.0);
  const auto y1 = soft_q_targets(view, sac.target_critics(), batch.next_global, batch.rewards, noise, 0.9,
                                 0.3, 1.0, sac.blocks());
  CHECK((y1 - batch.rewards).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("critic loss is the mean squared error") {
  Rng rng(0);
  const nn::Mlp critic = nn::Mlp::make_random({3, 1}, rng);
  Matrix in(3, 2);
  in << 1, 0, 0, 1, 2, -1;
  const Eigen::RowVectorXd pred = critic.forward(in).row(0);
  Eigen::RowVectorXd targets(2);
  targets << 0.5, -0.25;
  const auto loss = critic_loss(critic, in, targets);
  CHECK(loss.value == doctest::Approx((pred - targets).squaredNorm() / 2.0));
  CHECK(loss.predictions == pred);
}

TEST_CASE("decentralized heads read local blocks; at B = 1 that is the global state") {
  const auto cfg1 = small_scenario(1, 4);
  SoftActorCritic dc(cfg1, small_hyper(), {PolicyLayout::decentralized, true, true}, 1);
  const Batch b1 = random_batch(cfg1, 6, 1);
  const PolicyView v1 = dc.policy_view(b1.stacked, b1.global);
  REQUIRE(v1.inputs.size() == 1);
  CHECK(v1.inputs[0] == b1.global);

  const auto cfg3 = small_scenario(3, 2);
  SoftActorCritic dc3(cfg3, small_hyper(), {PolicyLayout::decentralized, true, true}, 1);
  SoftActorCritic cc3(cfg3, small_hyper(), {}, 1);
  const Batch b3 = random_batch(cfg3, 6, 2);
  const PolicyView v3 = dc3.policy_view(b3.stacked, b3.global);
  REQUIRE(v3.inputs.size() == 3);
  const auto local = env::local_obs_size(cfg3);
  for (int b = 0; b < 3; ++b) CHECK(v3.inputs[b] == row_block(b3.stacked, b * local, local));
  CHECK(dc3.policy_heads().size() == 3);
  CHECK(cc3.policy_heads().size() == 1);
  CHECK(policy_logits(v3).rows() == 9);
  CHECK(policy_logits(cc3.policy_view(b3.stacked, b3.global)).rows() == 9);
}

TEST_CASE("variants and factory") {
  const auto cfg = small_scenario(2, 3);
  const Hyper h = small_hyper();
  CHECK(make_learner(Algorithm::madsac_cc, cfg, h, 1)->algorithm() == Algorithm::madsac_cc);
  CHECK(make_learner(Algorithm::madsac_dc, cfg, h, 1)->algorithm() == Algorithm::madsac_dc);
  CHECK(make_learner(Algorithm::ac, cfg, h, 1)->algorithm() == Algorithm::ac);
  CHECK(make_learner(Algorithm::dqn, cfg, h, 1)->algorithm() == Algorithm::dqn);
  CHECK_FALSE(make_learner(Algorithm::random, cfg, h, 1)->learns());
  CHECK(make_learner(Algorithm::ac, cfg, h, 1)->alpha() == 0.0);
  CHECK(make_learner(Algorithm::madsac_cc, cfg, h, 1)->alpha() == doctest::Approx(h.initial_alpha));
  CHECK(algorithm_from_string("madsac") == Algorithm::madsac_cc);
  for (auto a : {Algorithm::madsac_cc, Algorithm::madsac_dc, Algorithm::dqn, Algorithm::ac, Algorithm::random,
                 Algorithm::age_optimal})
    CHECK(algorithm_from_string(to_string(a)) == a);
  CHECK_THROWS_AS(algorithm_from_string("ppo"), ConfigError);
  SoftActorCritic sac(cfg, h, {}, 1);
  CHECK(sac.target_entropy() == doctest::Approx(h.target_entropy_scale * 2 * std::log(4.0)));
}

TEST_CASE("dqn refuses intractable action spaces") {
  const auto cfg = small_scenario(3, 20);
  try {
    DqnLearner dqn(cfg, Hyper{}, 1);
    FAIL("expected IntractableError");
  } catch (const IntractableError& e) {
    CHECK(std::string(e.what()).find("(21)^3 = 9261 joint actions exceeds the enumeration cap of 5000") !=
          std::string::npos);
  }
  DqnLearner ok(small_scenario(3, 10), Hyper{}, 1);
  CHECK(ok.num_joint_actions() == 1331);
}

TEST_CASE("dqn exploration schedule") {
  Hyper h = small_hyper();
  h.total_steps = 100;
  h.eps_fraction = 0.5;
  const auto cfg = small_scenario(1, 2);
  DqnLearner dqn(cfg, h, 3);
  CHECK(dqn.epsilon() == 1.0);
  const Eigen::VectorXd obs = Eigen::VectorXd::Zero(env::local_obs_size(cfg));
  for (int i = 0; i < 25; ++i) dqn.act(obs, true);
  CHECK(dqn.epsilon() == doctest::Approx(1.0 + 0.5 * (h.eps_end - 1.0)));
  for (int i = 0; i < 100; ++i) dqn.act(obs, true);
  CHECK(dqn.epsilon() == doctest::Approx(h.eps_end));
  const auto a = dqn.act(obs, false);
  for (int i = 0; i < 10; ++i) CHECK(dqn.act(obs, false) == a);
}

TEST_CASE("updates change parameters and report finite losses") {
  const auto cfg = small_scenario(2, 3);
  const Batch batch = random_batch(cfg, 8, 9);
  for (auto algo : {Algorithm::madsac_cc, Algorithm::madsac_dc, Algorithm::ac, Algorithm::dqn}) {
    auto learner = make_learner(algo, cfg, small_hyper(), 4);
    const std::string before = learner->to_json().dump();
    const UpdateStats s = learner->update(batch);
    CHECK(std::isfinite(s.loss_q));
    CHECK(learner->updates() == 1);
    CHECK(learner->to_json().dump() != before);
  }
}

TEST_CASE("checkpoint round trip preserves the policy") {
  const auto cfg = small_scenario(2, 3);
  const Batch batch = random_batch(cfg, 8, 9);
  for (auto algo : {Algorithm::madsac_cc, Algorithm::madsac_dc, Algorithm::dqn}) {
    auto learner = make_learner(algo, cfg, small_hyper(), 4);
    for (int i = 0; i < 3; ++i) learner->update(batch);
    auto restored = load_learner(learner->to_json(), cfg, small_hyper(), 4);
    CHECK(restored->algorithm() == algo);
    CHECK(restored->to_json() == learner->to_json());
    learner->reseed(77);
    restored->reseed(77);
    for (int c = 0; c < batch.size(); ++c) CHECK(restored->act(batch.stacked.col(c), false) ==
                                                 learner->act(batch.stacked.col(c), false));
  }
  auto sac = make_learner(Algorithm::madsac_cc, cfg, small_hyper(), 4);
  CHECK_THROWS_AS(load_learner(sac->to_json(), small_scenario(3, 3), small_hyper(), 4), ConfigError);
  CHECK_THROWS_AS(load_learner(nlohmann::json{{"format", "mlp"}}, cfg, small_hyper(), 4), ConfigError);
}

TEST_CASE("random policy energy matches its closed form") {
  const auto cfg = small_scenario(3, 10);
  env::Environment environment(cfg, 8);
  RandomLearner random(cfg, 8);
  double energy = 0.0;
  const int n = 20000;
  for (int t = 0; t < n; ++t) {
    const auto out = environment.step(random.act(env::stacked_local(environment.state(), cfg), true));
    energy += out.parts.energy;
  }
  const double expected = random_policy_expected_energy(environment.channel(), cfg);
  CHECK(std::abs(energy / n / expected - 1.0) <= 0.02);
}

TEST_CASE("train step updates once a full batch is stored") {
  const auto cfg = small_scenario(1, 3);
  env::Environment environment(cfg, 2);
  auto learner = make_learner(Algorithm::madsac_cc, cfg, small_hyper(), 2);
  ReplayBuffer buffer(64, 2);
  for (int t = 1; t <= 10; ++t) {
    const auto r = train_step(environment, *learner, buffer, 8);
    CHECK(r.updated == (t >= 8));
  }
  CHECK(learner->updates() == 3);

  RandomLearner random(cfg, 2);
  ReplayBuffer untouched(64, 2);
  train_step(environment, random, untouched, 1);
  CHECK(untouched.size() == 0);
}

TEST_CASE("gradient checker catches a wrong gradient") {
  auto f = [](const std::vector<double>& x) { return x[0] * x[0] + std::sin(x[1]); };
  const std::vector<double> x{0.7, -0.4};
  const auto good = checks::check_gradient(f, x, {1.4, std::cos(-0.4)});
  CHECK(good.passed);
  CHECK(good.max_rel_error < 1e-8);
  const auto bad = checks::check_gradient(f, x, {1.4 * (1 + 1e-3), std::cos(-0.4)});
  CHECK_FALSE(bad.passed);
  CHECK(bad.worst_index == 0);
}
