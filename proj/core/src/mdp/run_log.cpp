#include "bngnn/mdp/run_log.hpp"

#include <ostream>

#include "json.hpp"

namespace bngnn {

using nlohmann::ordered_json;

std::string RunLog::to_json_line(const TimestepRecord& r) {
  ordered_json j;
  j["type"] = "timestep";
  j["step"] = r.step;
  j["state"] = r.state_id;
  j["action"] = r.action;
  j["epsilon"] = r.epsilon;
  j["per"] = r.per;
  j["reward"] = r.reward;
  j["policy_loss"] = r.policy_loss;
  j["gnn_loss"] = r.gnn_loss;
  j["next_state"] = r.next_state_id;
  return j.dump();
}

std::string RunLog::to_json_line(const EpochRecord& r) {
  ordered_json j;
  j["type"] = "epoch";
  j["epoch"] = r.epoch;
  j["train_loss"] = r.train_loss;
  j["val_accuracy"] = r.val_accuracy;
  return j.dump();
}

void RunLog::add(const TimestepRecord& r) {
  timesteps_.push_back(r);
  if (sink_) *sink_ << to_json_line(r) << '\n';
}

void RunLog::add(const EpochRecord& r) {
  epochs_.push_back(r);
  if (sink_) *sink_ << to_json_line(r) << '\n';
}

void RunLog::add_final(const std::string& key, double value) {
  finals_.emplace_back(key, value);
  if (sink_) {
    ordered_json j;
    j["type"] = "final";
    j["metric"] = key;
    j["value"] = value;
    *sink_ << j.dump() << '\n';
  }
}

void RunLog::flush() {
  if (sink_) sink_->flush();
}

void RunLog::write(std::ostream& out) const {
  for (const auto& r : timesteps_) out << to_json_line(r) << '\n';
  for (const auto& r : epochs_) out << to_json_line(r) << '\n';
  for (const auto& [k, v] : finals_) {
    ordered_json j;
    j["type"] = "final";
    j["metric"] = k;
    j["value"] = v;
    out << j.dump() << '\n';
  }
}

}  // namespace bngnn
