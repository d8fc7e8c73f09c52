#include "aoicache/agents/learner.hpp"

#include "aoicache/agents/baselines.hpp"
#include "aoicache/agents/soft_actor_critic.hpp"
#include "aoicache/errors.hpp"

namespace aoicache::agents {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::madsac_cc: return "madsac_cc";
    case Algorithm::madsac_dc: return "madsac_dc";
    case Algorithm::dqn: return "dqn";
    case Algorithm::ac: return "ac";
    case Algorithm::random: return "random";
    case Algorithm::age_optimal: return "age_optimal";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& s) {
  for (auto a : {Algorithm::madsac_cc, Algorithm::madsac_dc, Algorithm::dqn, Algorithm::ac, Algorithm::random,
                 Algorithm::age_optimal})
    if (to_string(a) == s) return a;
  if (s == "madsac") return Algorithm::madsac_cc;
  throw ConfigError("unknown algorithm '" + s + "' (expected madsac_cc, madsac_dc, dqn, ac, random, age_optimal)");
}

std::unique_ptr<Learner> make_learner(Algorithm algo, const env::NetworkConfig& cfg, const Hyper& hyper,
                                      std::uint64_t seed) {
  switch (algo) {
    case Algorithm::madsac_cc:
    case Algorithm::age_optimal:
      return std::make_unique<SoftActorCritic>(cfg, hyper, SacVariant{PolicyLayout::centralized, true, true}, seed);
    case Algorithm::madsac_dc:
      return std::make_unique<SoftActorCritic>(cfg, hyper, SacVariant{PolicyLayout::decentralized, true, true},
                                               seed);
    case Algorithm::ac:
      return std::make_unique<SoftActorCritic>(cfg, hyper, SacVariant{PolicyLayout::centralized, false, false},
                                               seed);
    case Algorithm::dqn:
      return std::make_unique<DqnLearner>(cfg, hyper, seed);
    case Algorithm::random:
      return std::make_unique<RandomLearner>(cfg, seed);
  }
  throw ConfigError("unhandled algorithm");
}

std::unique_ptr<Learner> load_learner(const nlohmann::json& checkpoint, const env::NetworkConfig& cfg,
                                      const Hyper& hyper, std::uint64_t seed) {
  if (checkpoint.value("format", "") != "agent") throw ConfigError("not an agent checkpoint");
  if (checkpoint.value("num_ens", -1) != cfg.num_ens || checkpoint.value("sensors_per_en", -1) != cfg.sensors_per_en)
    throw ConfigError("checkpoint was trained for B=" + std::to_string(checkpoint.value("num_ens", -1)) +
                      ", F=" + std::to_string(checkpoint.value("sensors_per_en", -1)) +
                      " but the scenario has B=" + std::to_string(cfg.num_ens) +
                      ", F=" + std::to_string(cfg.sensors_per_en));
  const Algorithm algo = algorithm_from_string(checkpoint.at("algorithm").get<std::string>());
  auto learner = make_learner(algo, cfg, hyper, seed);
  if (auto* sac = dynamic_cast<SoftActorCritic*>(learner.get())) sac->load_json(checkpoint);
  else if (auto* dqn = dynamic_cast<DqnLearner*>(learner.get())) dqn->load_json(checkpoint);
  return learner;
}

}  // namespace aoicache::agents
