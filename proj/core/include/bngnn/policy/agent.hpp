#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bngnn/numerics/adam.hpp"
#include "bngnn/policy/components.hpp"
#include "bngnn/policy/qnetwork.hpp"

namespace bngnn {

struct DdqnConfig {
  std::size_t input_dim = 0;
  std::size_t actions = 3;
  std::size_t hidden_dim = 256;
  double leaky_slope = 0.2;
  double gamma = 0.95;
  double learning_rate = 0.0005;
  std::size_t replay_capacity = 500;
  std::size_t batch_size = 32;
  std::size_t sync_period = 50;
  TdTarget td_target = TdTarget::MaxEval;
  EpsilonSchedule epsilon{};
  std::uint64_t seed = 0;
};

class DdqnAgent {
 public:
  explicit DdqnAgent(const DdqnConfig& config);
  DdqnAgent(const DdqnAgent&) = delete;
  DdqnAgent& operator=(const DdqnAgent&) = delete;

  const DdqnConfig& config() const noexcept { return config_; }

  // ε-greedy action for 1-based timestep; consumes the exploration stream.
  std::size_t act(std::span<const double> state, std::size_t timestep);
  std::size_t greedy(std::span<const double> state);
  // One greedy action per state, evaluated as a single batch.
  std::vector<std::size_t> greedy_batch(std::span<const std::vector<double>* const> states);

  // Stores e, trains q_eval on a sampled batch, syncs every sync_period steps.
  double observe(Experience e);
  void sync_target();

  QNetwork& q_eval() noexcept { return *q_eval_; }
  QNetwork& q_target() noexcept { return *q_target_; }
  const ReplayMemory& memory() const noexcept { return memory_; }
  std::uint64_t steps() const noexcept { return steps_; }

  ParamRecord to_record() const;
  static std::unique_ptr<DdqnAgent> from_record(const ParamRecord& record);
  void save(const std::string& path) const;
  static std::unique_ptr<DdqnAgent> load(const std::string& path);

 private:
  DdqnConfig config_;
  std::unique_ptr<QNetwork> q_eval_;
  std::unique_ptr<QNetwork> q_target_;
  std::unique_ptr<Adam> optimizer_;
  ReplayMemory memory_;
  Rng explore_rng_;
  Rng replay_rng_;
  std::uint64_t steps_ = 0;
};

}  // namespace bngnn
