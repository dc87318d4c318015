#include "bngnn/policy/components.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bngnn/policy/qnetwork.hpp"

namespace bngnn {

EpsilonSchedule::EpsilonSchedule(double start, double end, std::size_t horizon)
    : start_(start), end_(end), horizon_(horizon) {
  if (!(start >= 0.0 && start <= 1.0 && end >= 0.0 && end <= start) || horizon == 0) {
    throw std::invalid_argument("EpsilonSchedule: need 0 <= end <= start <= 1 and horizon >= 1");
  }
}

double EpsilonSchedule::at(std::size_t step) const {
  if (step == 0) throw std::invalid_argument("EpsilonSchedule: steps are 1-based");
  if (step >= horizon_ || horizon_ == 1) return end_;
  const double frac = static_cast<double>(step - 1) / static_cast<double>(horizon_ - 1);
  return start_ - frac * (start_ - end_);
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayMemory: capacity must be positive");
}

void ReplayMemory::push(Experience e) {
  if (!std::isfinite(e.reward)) throw std::domain_error("ReplayMemory: non-finite reward");
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(std::move(e));
}

std::vector<const Experience*> ReplayMemory::sample(std::size_t batch, Rng& rng) const {
  std::vector<std::size_t> all(items_.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> picked;
  picked.reserve(std::min(batch, all.size()));
  std::sample(all.begin(), all.end(), std::back_inserter(picked), batch, rng);
  std::vector<const Experience*> out;
  out.reserve(picked.size());
  for (std::size_t i : picked) out.push_back(&items_[i]);
  return out;
}

RewardWindow::RewardWindow(std::size_t window) : window_(window) {
  if (window == 0) throw std::invalid_argument("RewardWindow: window must be positive");
}

double RewardWindow::reward(std::size_t correct, std::size_t total) {
  if (total == 0 || correct > total) throw std::invalid_argument("RewardWindow: need correct <= total, total > 0");
  if (!history_.empty() && total != total_) throw std::invalid_argument("RewardWindow: PER denominator changed");
  total_ = total;
  double r = 0.0;
  if (!history_.empty()) {
    const auto n = static_cast<std::int64_t>(history_.size());
    const auto sum = static_cast<std::int64_t>(std::accumulate(history_.begin(), history_.end(), std::size_t{0}));
    r = static_cast<double>(n * static_cast<std::int64_t>(correct) - sum) / static_cast<double>(n * static_cast<std::int64_t>(total));
  }
  history_.push_back(correct);
  if (history_.size() > window_) history_.pop_front();
  return r;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

std::size_t select_action(std::span<const double> q_values, double epsilon, Rng& rng) {
  const double u = uniform01(rng);
  if (u < epsilon) return uniform_index(rng, q_values.size()) + 1;
  return argmax(q_values) + 1;
}

const char* to_string(TdTarget t) { return t == TdTarget::MaxEval ? "max-eval" : "taken-action"; }

TdTarget parse_td_target(const std::string& text) {
  if (text == "max-eval") return TdTarget::MaxEval;
  if (text == "taken-action") return TdTarget::TakenAction;
  throw std::invalid_argument("unknown TD target '" + text + "' (expected max-eval or taken-action)");
}

Var policy_loss(Tape& tape, QNetwork& q_eval, QNetwork& q_target, std::span<const Experience* const> batch,
                double gamma, TdTarget form) {
  if (batch.empty()) throw std::invalid_argument("policy_loss: empty batch");
  const std::size_t dim = q_eval.config().input_dim;
  Matrix states(batch.size(), dim);
  Matrix next(batch.size(), dim);
  std::vector<std::size_t> taken(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Experience& e = *batch[i];
    if (e.state->size() != dim || e.next_state->size() != dim) {
      throw DimensionError("policy_loss: experience state has wrong length");
    }
    if (e.action < 1 || e.action > q_eval.config().actions) throw std::out_of_range("policy_loss: action out of range");
    std::copy(e.state->begin(), e.state->end(), states.row(i).begin());
    std::copy(e.next_state->begin(), e.next_state->end(), next.row(i).begin());
    taken[i] = e.action - 1;
  }
  const Matrix q_next = q_target.q_values(next);
  Matrix target(batch.size(), 1);
  for (std::size_t i = 0; i < batch.size(); ++i)
    target(i, 0) = batch[i]->reward + gamma * q_next(i, argmax(q_next.row(i)));

  Var q = q_eval.forward(tape, tape.constant(std::move(states)));
  Var predicted = form == TdTarget::MaxEval ? row_max(q) : pick(q, taken);
  return mean_all(square(sub(predicted, tape.constant(std::move(target)))));
}

}  // namespace bngnn
