#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>

#include "bngnn/mdp/run_log.hpp"
#include "bngnn/mdp/training.hpp"
#include "bngnn/policy/agent.hpp"

namespace bngnn {

enum class PerMode {
  GreedyDepths,   // each validation instance at its greedy depth
  CurrentAction,  // every validation instance at the current action
};

const char* to_string(PerMode mode);
PerMode parse_per_mode(const std::string& text);

struct MdpConfig {
  std::size_t timesteps = 1000;
  std::size_t actions = 3;
  std::size_t window = 20;
  double gamma = 0.95;
  GnnKind gnn = GnnKind::Gcn;
  std::size_t hidden_dim = 128;
  double dropout = 0.3;
  double leaky_slope = 0.2;
  double gnn_learning_rate = 0.005;
  double policy_learning_rate = 0.0005;
  std::size_t q_hidden = 256;
  std::size_t replay_capacity = 500;
  std::size_t batch_size = 32;
  std::size_t sync_period = 50;
  TdTarget td_target = TdTarget::MaxEval;
  PerMode per_mode = PerMode::GreedyDepths;
  bool gnn1_full_pass = false;
  std::size_t action_cap = 0;  // restricts usable actions to 1..cap when nonzero
  EpsilonSchedule epsilon{};
  std::uint64_t seed = 0;
};

struct MdpResult {
  std::unique_ptr<DdqnAgent> agent;
  GnnModel gnn1;
  GnnModel gnn1_initial;
  RunLog log;
};

// Next subject: uniform over the a-hop frontier restricted to training nodes
// (indices < train_count), else uniform over training nodes.
std::size_t transition(const SubjectGraph& subjects, std::size_t current, std::size_t action, Rng& rng,
                       std::size_t train_count);

GnnConfig gnn1_config(const MdpConfig& config, std::size_t input_dim);
DdqnConfig policy_config(const MdpConfig& config, std::size_t state_dim);

MdpResult run_mdp(const MdpConfig& config, const PreparedData& data, std::ostream* log_sink = nullptr);

}  // namespace bngnn
