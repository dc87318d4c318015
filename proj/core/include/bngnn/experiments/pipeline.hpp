#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bngnn/experiments/metrics.hpp"
#include "bngnn/experiments/split.hpp"
#include "bngnn/mdp/run_mdp.hpp"

namespace bngnn {

struct ExperimentConfig {
  MdpConfig mdp;  // carries gnn kind, b, d, t, γ, w and the TD form
  std::size_t k = 10;
  std::size_t subject_k = 10;
  InputMode input_mode = InputMode::Normalized;
  std::size_t epochs = 100;
  std::size_t gnn_batch_size = 16;
  bool random_fixed_per_instance = false;
  std::uint64_t seed = 0;
};

enum class Method { BnGnn, Fixed, Skip, Random };

const char* to_string(Method m);
// "bn", "fixed", "skip", "random"
Method parse_method(const std::string& text);

struct RunResult {
  Method method = Method::BnGnn;
  GnnKind gnn = GnnKind::Gcn;
  std::size_t depth = 0;  // fixed depth, or b for adaptive and random methods
  std::uint64_t seed = 0;
  std::size_t best_epoch = 0;
  std::vector<EpochRecord> epochs;
  EvalResult validation;
  EvalResult test;
  std::optional<GnnModel> model;
};

std::string method_label(const RunResult& r);  // e.g. "gcn-fixed-2", "bn-gcn"

// The split and built graphs for one repetition.
PreparedData prepare_run(const std::vector<WeightedGraph>& graphs, const ExperimentConfig& config);

GnnConfig final_gnn_config(const ExperimentConfig& config, std::size_t input_dim, std::size_t max_depth, bool residual);
TrainOptions final_train_options(const ExperimentConfig& config);

struct BnGnnRun {
  RunResult result;
  MdpResult mdp;
};

// run_mdp, then a fresh GNN trained and tested with the frozen greedy policy.
BnGnnRun run_bngnn(const ExperimentConfig& config, const PreparedData& data, std::ostream* log_sink = nullptr);

// Fixed and Skip need depth; Random uses b = config.mdp.actions.
RunResult run_baseline(Method method, std::size_t depth, const ExperimentConfig& config, const PreparedData& data);

struct SweepSpec {
  std::string parameter;  // "k", "b" or "dim"
  std::vector<std::size_t> values;
  std::size_t repetitions = 1;
};

struct SweepRow {
  std::size_t value = 0;
  MeanStd accuracy;
  MeanStd auc;
  std::vector<RunResult> runs;
};

ExperimentConfig with_parameter(const ExperimentConfig& config, const std::string& parameter, std::size_t value);

// Rows sorted by value; repetition r runs with seed config.seed + r.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const ExperimentConfig& config,
                                const std::vector<WeightedGraph>& graphs, std::ostream* results = nullptr);

}  // namespace bngnn
