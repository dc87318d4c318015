#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bngnn/mdp/training.hpp"

namespace bngnn {

struct TimestepRecord {
  std::size_t step = 0;
  std::string state_id;
  std::size_t action = 1;
  double epsilon = 0.0;
  double per = 0.0;
  double reward = 0.0;
  double policy_loss = 0.0;
  double gnn_loss = 0.0;
  std::string next_state_id;
};

// Line-delimited JSON: one object per timestep, per epoch, then final metrics.
class RunLog {
 public:
  RunLog() = default;
  // Records are also streamed to `sink` as they arrive.
  explicit RunLog(std::ostream* sink) : sink_(sink) {}

  void add(const TimestepRecord& r);
  void add(const EpochRecord& r);
  void add_final(const std::string& key, double value);
  void flush();

  const std::vector<TimestepRecord>& timesteps() const noexcept { return timesteps_; }
  const std::vector<EpochRecord>& epochs() const noexcept { return epochs_; }
  const std::vector<std::pair<std::string, double>>& finals() const noexcept { return finals_; }

  void write(std::ostream& out) const;

  static std::string to_json_line(const TimestepRecord& r);
  static std::string to_json_line(const EpochRecord& r);

 private:
  std::ostream* sink_ = nullptr;
  std::vector<TimestepRecord> timesteps_;
  std::vector<EpochRecord> epochs_;
  std::vector<std::pair<std::string, double>> finals_;
};

// Thrown when a loss turns non-finite; the log up to that point is kept.
class RunAborted : public std::runtime_error {
 public:
  RunAborted(const std::string& what, RunLog log) : std::runtime_error(what), log_(std::move(log)) {}
  const RunLog& log() const noexcept { return log_; }

 private:
  RunLog log_;
};

}  // namespace bngnn
