#include "bngnn/experiments/pipeline.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "bngnn/experiments/results.hpp"

namespace bngnn {

const char* to_string(Method m) {
  switch (m) {
    case Method::BnGnn: return "bn";
    case Method::Fixed: return "fixed";
    case Method::Skip: return "skip";
    case Method::Random: return "random";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  if (text == "bn") return Method::BnGnn;
  if (text == "fixed") return Method::Fixed;
  if (text == "skip") return Method::Skip;
  if (text == "random") return Method::Random;
  throw std::invalid_argument("unknown method '" + text + "' (expected bn, fixed, skip or random)");
}

std::string method_label(const RunResult& r) {
  const std::string g = to_string(r.gnn);
  switch (r.method) {
    case Method::BnGnn: return "bn-" + g;
    case Method::Fixed: return g + "-fixed-" + std::to_string(r.depth);
    case Method::Skip: return g + "-skip-" + std::to_string(r.depth);
    case Method::Random: return g + "-random";
  }
  return g;
}

PreparedData prepare_run(const std::vector<WeightedGraph>& graphs, const ExperimentConfig& config) {
  std::vector<int> labels;
  labels.reserve(graphs.size());
  for (const auto& g : graphs) labels.push_back(g.label);
  const SplitIndices split = split_dataset(labels, config.seed);
  return prepare_data(graphs, split.train, split.val, split.test, config.k, config.subject_k, config.input_mode);
}

GnnConfig final_gnn_config(const ExperimentConfig& config, std::size_t input_dim, std::size_t max_depth, bool residual) {
  GnnConfig g;
  g.kind = config.mdp.gnn;
  g.input_dim = input_dim;
  g.max_depth = max_depth;
  g.hidden_dim = config.mdp.hidden_dim;
  g.dropout = config.mdp.dropout;
  g.leaky_slope = config.mdp.leaky_slope;
  g.residual = residual;
  g.seed = make_rng(config.seed, 103)();
  return g;
}

TrainOptions final_train_options(const ExperimentConfig& config) {
  TrainOptions t;
  t.epochs = config.epochs;
  t.learning_rate = config.mdp.gnn_learning_rate;
  t.batch_size = config.gnn_batch_size;
  t.seed = make_rng(config.seed, 104)();
  return t;
}

namespace {

RunResult from_training(Method method, const ExperimentConfig& config, std::size_t depth, TrainResult&& tr) {
  RunResult r;
  r.method = method;
  r.gnn = config.mdp.gnn;
  r.depth = depth;
  r.seed = config.seed;
  r.best_epoch = tr.best_epoch;
  r.epochs = std::move(tr.epochs);
  r.validation = std::move(tr.validation);
  r.test = std::move(tr.test);
  r.model.emplace(std::move(tr.model));
  return r;
}

}  // namespace

BnGnnRun run_bngnn(const ExperimentConfig& config, const PreparedData& data, std::ostream* log_sink) {
  MdpConfig mdp = config.mdp;
  mdp.seed = config.seed;
  MdpResult mdp_result = run_mdp(mdp, data, log_sink);
  GreedyDepth depths(mdp_result.agent->q_eval(), mdp.action_cap);
  TrainResult tr = train_gnn(final_gnn_config(config, data.input_dim(), mdp.actions, false),
                             final_train_options(config), data, depths);
  RunLog& log = mdp_result.log;
  for (const EpochRecord& e : tr.epochs) log.add(e);
  log.add_final("test_accuracy", tr.test.accuracy);
  if (tr.test.auc) log.add_final("test_auc", *tr.test.auc);
  log.flush();
  RunResult result = from_training(Method::BnGnn, config, mdp.actions, std::move(tr));
  return BnGnnRun{std::move(result), std::move(mdp_result)};
}

RunResult run_baseline(Method method, std::size_t depth, const ExperimentConfig& config, const PreparedData& data) {
  switch (method) {
    case Method::Fixed:
    case Method::Skip: {
      if (depth == 0) throw std::invalid_argument("run_baseline: fixed and skip baselines need a depth");
      FixedDepth depths(depth);
      auto tr = train_gnn(final_gnn_config(config, data.input_dim(), depth, method == Method::Skip),
                          final_train_options(config), data, depths);
      return from_training(method, config, depth, std::move(tr));
    }
    case Method::Random: {
      const std::size_t b = config.mdp.actions;
      RandomDepth depths(b, config.seed, config.random_fixed_per_instance);
      auto tr = train_gnn(final_gnn_config(config, data.input_dim(), b, false), final_train_options(config), data, depths);
      return from_training(method, config, b, std::move(tr));
    }
    case Method::BnGnn:
      break;
  }
  throw std::invalid_argument("run_baseline: use run_bngnn for the adaptive method");
}

ExperimentConfig with_parameter(const ExperimentConfig& config, const std::string& parameter, std::size_t value) {
  if (value == 0) throw std::invalid_argument("sweep values must be positive");
  ExperimentConfig c = config;
  if (parameter == "k") c.k = value;
  else if (parameter == "b") c.mdp.actions = value;
  else if (parameter == "dim") c.mdp.hidden_dim = value;
  else throw std::invalid_argument("unknown sweep parameter '" + parameter + "' (expected k, b or dim)");
  return c;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const ExperimentConfig& config,
                                const std::vector<WeightedGraph>& graphs, std::ostream* results) {
  if (spec.values.empty() || spec.repetitions == 0) throw std::invalid_argument("run_sweep: need values and repetitions");
  std::vector<std::size_t> values = spec.values;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<SweepRow> rows;
  for (std::size_t v : values) {
    const ExperimentConfig base = with_parameter(config, spec.parameter, v);
    SweepRow row;
    row.value = v;
    std::vector<double> acc, aucs;
    for (std::size_t r = 0; r < spec.repetitions; ++r) {
      ExperimentConfig c = base;
      c.seed = config.seed + r;
      const PreparedData data = prepare_run(graphs, c);
      RunResult run = run_bngnn(c, data).result;
      run.model.reset();
      if (results) *results << results_record(c, run) << '\n';
      acc.push_back(run.test.accuracy);
      aucs.push_back(run.test.auc.value());
      row.runs.push_back(std::move(run));
    }
    row.accuracy = mean_std(acc);
    row.auc = mean_std(aucs);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace bngnn
