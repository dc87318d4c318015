#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bngnn/numerics/autodiff.hpp"
#include "bngnn/numerics/random.hpp"

namespace bngnn {

class QNetwork;

// Linear decay from start at step 1 to end at step horizon, then constant.
class EpsilonSchedule {
 public:
  EpsilonSchedule(double start = 1.0, double end = 0.05, std::size_t horizon = 20);

  double at(std::size_t step) const;  // step is 1-based

  double start() const noexcept { return start_; }
  double end() const noexcept { return end_; }
  std::size_t horizon() const noexcept { return horizon_; }

 private:
  double start_;
  double end_;
  std::size_t horizon_;
};

using StatePtr = std::shared_ptr<const std::vector<double>>;

struct Experience {
  std::size_t state_id = 0;
  StatePtr state;
  std::size_t action = 1;  // 1-based
  double reward = 0.0;
  std::size_t next_state_id = 0;
  StatePtr next_state;
};

// Bounded FIFO; sampling draws distinct entries uniformly.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity = 500);

  void push(Experience e);
  std::vector<const Experience*> sample(std::size_t batch, Rng& rng) const;

  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  const Experience& operator[](std::size_t i) const { return items_[i]; }

 private:
  std::size_t capacity_;
  std::deque<Experience> items_;
};

// r = per − mean(last w values); the new value is appended afterwards. PER is
// an accuracy correct/total over a fixed split, so the reward is computed in
// integers and rounded once.
class RewardWindow {
 public:
  explicit RewardWindow(std::size_t window = 20);
  double reward(std::size_t correct, std::size_t total);
  std::size_t window() const noexcept { return window_; }
  const std::deque<std::size_t>& history() const noexcept { return history_; }  // correct counts

 private:
  std::size_t window_;
  std::size_t total_ = 0;
  std::deque<std::size_t> history_;
};

// Index of the first maximum.
std::size_t argmax(std::span<const double> values);

// ε-greedy over q-values; returns a 1-based action.
std::size_t select_action(std::span<const double> q_values, double epsilon, Rng& rng);

enum class TdTarget {
  MaxEval,      // (r + γ max Q_target(s′) − max Q_eval(s))²
  TakenAction,  // (r + γ max Q_target(s′) − Q_eval(s, a))²
};

const char* to_string(TdTarget t);
TdTarget parse_td_target(const std::string& text);

// Mean squared TD error over the batch; gradients reach q_eval only.
Var policy_loss(Tape& tape, QNetwork& q_eval, QNetwork& q_target,
                std::span<const Experience* const> batch, double gamma, TdTarget form);

}  // namespace bngnn
