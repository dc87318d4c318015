#include "bngnn/mdp/training.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "bngnn/experiments/metrics.hpp"
#include "bngnn/numerics/adam.hpp"
#include "bngnn/policy/components.hpp"

namespace bngnn {

std::size_t PreparedData::input_dim() const {
  if (train.empty()) throw std::logic_error("PreparedData: empty training split");
  return train.front().features.cols();
}

std::size_t PreparedData::state_dim() const {
  if (train.empty()) throw std::logic_error("PreparedData: empty training split");
  return train.front().state.size();
}

PreparedData prepare_data(const std::vector<WeightedGraph>& graphs, std::span<const std::size_t> train,
                          std::span<const std::size_t> val, std::span<const std::size_t> test, std::size_t k,
                          std::size_t subject_k, InputMode mode) {
  PreparedData data;
  auto build = [&](std::span<const std::size_t> idx, std::vector<BuiltGraph>& out) {
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(build_graph(graphs.at(i), k, mode));
  };
  build(train, data.train);
  build(val, data.val);
  build(test, data.test);
  std::vector<const WeightedGraph*> subjects;
  for (std::size_t i : train) subjects.push_back(&graphs.at(i));
  for (std::size_t i : val) subjects.push_back(&graphs.at(i));
  data.subjects = build_subject_graph(subjects, subject_k);
  return data;
}

RandomDepth::RandomDepth(std::size_t max_depth, std::uint64_t seed, bool fixed_per_instance)
    : max_depth_(max_depth), fixed_(fixed_per_instance), rng_(make_rng(seed, streams::kRandomDepth)) {
  if (max_depth == 0) throw std::invalid_argument("RandomDepth: max depth must be positive");
}

std::size_t RandomDepth::depth(const BuiltGraph& g) {
  if (fixed_) {
    auto it = chosen_.find(g.id);
    if (it != chosen_.end()) return it->second;
    const std::size_t d = uniform_index(rng_, max_depth_) + 1;
    chosen_.emplace(g.id, d);
    return d;
  }
  return uniform_index(rng_, max_depth_) + 1;
}

std::size_t capped_argmax(std::span<const double> q, std::size_t cap) {
  const std::size_t limit = cap == 0 ? q.size() : std::min(cap, q.size());
  return argmax(q.first(limit)) + 1;
}

std::size_t GreedyDepth::depth(const BuiltGraph& g) {
  auto it = cache_.find(g.id);
  if (it != cache_.end()) return it->second;
  const std::size_t d = capped_argmax(q_.q_values(g.state), cap_);
  cache_.emplace(g.id, d);
  return d;
}

EvalResult evaluate(GnnModel& model, std::span<const BuiltGraph> split, std::span<const std::size_t> depths) {
  if (split.empty()) throw std::invalid_argument("evaluate: empty split");
  if (depths.size() != split.size()) throw std::invalid_argument("evaluate: one depth per instance required");
  EvalResult out;
  out.depth_histogram.assign(model.config().max_depth, 0);
  std::size_t correct = 0;
  std::vector<double> scores;
  std::vector<int> labels;
  for (std::size_t i = 0; i < split.size(); ++i) {
    const BuiltGraph& g = split[i];
    const Prediction p = model.predict(g, depths[i]);
    InstancePrediction rec{g.id, g.label, p.label, p.probabilities.size() > 1 ? p.probabilities[1] : 0.0, depths[i]};
    if (static_cast<int>(p.label) == g.label) ++correct;
    ++out.depth_histogram[depths[i] - 1];
    scores.push_back(rec.positive_probability);
    labels.push_back(g.label);
    out.predictions.push_back(std::move(rec));
  }
  out.correct = correct;
  out.accuracy = static_cast<double>(correct) / static_cast<double>(split.size());
  const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
  if (has_pos && has_neg) out.auc = auc(scores, labels);
  return out;
}

EvalResult evaluate(GnnModel& model, std::span<const BuiltGraph> split, DepthPolicy& depths) {
  std::vector<std::size_t> d;
  d.reserve(split.size());
  for (const BuiltGraph& g : split) d.push_back(depths.depth(g));
  return evaluate(model, split, d);
}

TrainResult train_gnn(const GnnConfig& config, const TrainOptions& options, const PreparedData& data,
                      DepthPolicy& depths) {
  if (data.train.empty() || data.val.empty() || data.test.empty()) {
    throw std::invalid_argument("train_gnn: every split must be nonempty");
  }
  if (options.batch_size == 0) throw std::invalid_argument("train_gnn: batch size must be positive");
  GnnModel model(config);
  GnnModel best = model;
  const auto params = model.parameters();
  Adam adam(AdamOptions{options.learning_rate}, params);
  Rng shuffle_rng = make_rng(options.seed, streams::kGnnShuffle);
  Rng dropout_rng = make_rng(options.seed, streams::kGnnDropout);

  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val = -1.0;
  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double total_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t stop = std::min(order.size(), start + options.batch_size);
      const double weight = 1.0 / static_cast<double>(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        const BuiltGraph& g = data.train[order[i]];
        Tape tape;
        Var loss = model.loss(tape, g, depths.depth(g), true, &dropout_rng);
        total_loss += loss.value()(0, 0);
        tape.backward(scale(loss, weight));
      }
      adam.step();
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = total_loss / static_cast<double>(order.size());
    rec.val_accuracy = evaluate(model, data.val, depths).accuracy;
    epochs.push_back(rec);
    if (rec.val_accuracy > best_val) {
      best_val = rec.val_accuracy;
      best_epoch = epoch;
      best.copy_parameters_from(model);
    }
  }
  if (best_epoch > 0) model.copy_parameters_from(best);
  EvalResult validation = evaluate(model, data.val, depths);
  EvalResult test = evaluate(model, data.test, depths);
  return TrainResult{std::move(model), std::move(epochs), best_epoch, std::move(validation), std::move(test)};
}

}  // namespace bngnn
