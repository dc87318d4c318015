#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bngnn/gnn/model.hpp"
#include "bngnn/netbuild/graph.hpp"
#include "bngnn/policy/qnetwork.hpp"

namespace bngnn {

// Built splits plus the subject graph over train ∪ val (train nodes first).
struct PreparedData {
  std::vector<BuiltGraph> train;
  std::vector<BuiltGraph> val;
  std::vector<BuiltGraph> test;
  SubjectGraph subjects;

  std::size_t input_dim() const;
  std::size_t state_dim() const;
};

PreparedData prepare_data(const std::vector<WeightedGraph>& graphs, std::span<const std::size_t> train,
                          std::span<const std::size_t> val, std::span<const std::size_t> test, std::size_t k,
                          std::size_t subject_k, InputMode mode = InputMode::Normalized);

// Per-instance depth choice used while training and evaluating a GNN.
class DepthPolicy {
 public:
  virtual ~DepthPolicy() = default;
  virtual std::size_t depth(const BuiltGraph& g) = 0;
};

class FixedDepth final : public DepthPolicy {
 public:
  explicit FixedDepth(std::size_t depth) : depth_(depth) {}
  std::size_t depth(const BuiltGraph&) override { return depth_; }

 private:
  std::size_t depth_;
};

// Uniform over 1..b. Redraws on every call unless fixed per instance.
class RandomDepth final : public DepthPolicy {
 public:
  RandomDepth(std::size_t max_depth, std::uint64_t seed, bool fixed_per_instance = false);
  std::size_t depth(const BuiltGraph& g) override;

 private:
  std::size_t max_depth_;
  bool fixed_;
  Rng rng_;
  std::map<std::string, std::size_t> chosen_;
};

// Greedy action of a frozen Q-network on the instance state, optionally capped.
class GreedyDepth final : public DepthPolicy {
 public:
  explicit GreedyDepth(QNetwork& q, std::size_t cap = 0) : q_(q), cap_(cap) {}
  std::size_t depth(const BuiltGraph& g) override;

 private:
  QNetwork& q_;
  std::size_t cap_;
  std::map<std::string, std::size_t> cache_;
};

// 1-based argmax over the first `cap` actions (0 = all).
std::size_t capped_argmax(std::span<const double> q, std::size_t cap);

struct InstancePrediction {
  std::string id;
  int label = 0;
  std::size_t predicted = 0;
  double positive_probability = 0.0;
  std::size_t depth = 1;
};

struct EvalResult {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::optional<double> auc;  // absent when the split holds a single class
  std::vector<InstancePrediction> predictions;
  std::vector<std::size_t> depth_histogram;  // entry d-1 counts depth d
};

EvalResult evaluate(GnnModel& model, std::span<const BuiltGraph> split, DepthPolicy& depths);
EvalResult evaluate(GnnModel& model, std::span<const BuiltGraph> split, std::span<const std::size_t> depths);

struct TrainOptions {
  std::size_t epochs = 100;
  double learning_rate = 0.005;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  GnnModel model;
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // 0 when no epoch ran
  EvalResult validation;
  EvalResult test;
};

// Fresh model, minibatch Adam, best-validation epoch kept (earliest on ties).
TrainResult train_gnn(const GnnConfig& config, const TrainOptions& options, const PreparedData& data,
                      DepthPolicy& depths);

}  // namespace bngnn
