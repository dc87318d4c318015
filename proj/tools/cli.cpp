#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bngnn/experiments/dataset.hpp"
#include "bngnn/experiments/pipeline.hpp"
#include "bngnn/experiments/results.hpp"
#include "bngnn/experiments/synthetic.hpp"
#include "json.hpp"

namespace bngnn::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string dataset;
  std::string gnn = "gcn";
  std::size_t b = 3;
  std::size_t k = 10;
  std::size_t subject_k = 10;
  std::size_t dim = 128;
  std::size_t timesteps = 1000;
  double gamma = 0.95;
  std::size_t window = 20;
  std::uint64_t seed = 0;
  std::size_t reps = 1;
  std::string input_mode = "normalized";
  std::string out;
  std::size_t epochs = 100;
  std::string td_target = "max-eval";
  std::string per_mode = "greedy";
  bool gnn1_full_pass = false;
  std::size_t action_cap = 0;

  // baseline
  std::string method = "fixed";
  std::size_t depth = 0;
  bool random_fixed_per_instance = false;

  // sweep
  std::string param = "b";
  std::vector<std::size_t> values;

  // generate
  std::size_t m = 200;
  std::size_t n = 30;
  double p2 = 0.5;
  double noise = 0.015;
  double amplitude = 0.5;

  // eval
  std::string checkpoint;
};

ExperimentConfig experiment_config(const Options& o) {
  ExperimentConfig c;
  c.mdp.gnn = parse_gnn_kind(o.gnn);
  c.mdp.actions = o.b;
  c.mdp.hidden_dim = o.dim;
  c.mdp.timesteps = o.timesteps;
  c.mdp.gamma = o.gamma;
  c.mdp.window = o.window;
  c.mdp.td_target = parse_td_target(o.td_target);
  c.mdp.per_mode = parse_per_mode(o.per_mode);
  c.mdp.gnn1_full_pass = o.gnn1_full_pass;
  c.mdp.action_cap = o.action_cap;
  c.k = o.k;
  c.subject_k = o.subject_k;
  c.input_mode = parse_input_mode(o.input_mode);
  c.epochs = o.epochs;
  c.random_fixed_per_instance = o.random_fixed_per_instance;
  c.seed = o.seed;
  return c;
}

fs::path output_dir(const Options& o) {
  if (o.out.empty()) throw std::invalid_argument("--out is required");
  fs::create_directories(o.out);
  return o.out;
}

std::ofstream open_file(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

void report(std::ostream& out, const std::string& label, const std::vector<double>& acc,
            const std::vector<double>& aucs) {
  out << label << " accuracy " << format_mean_std(mean_std(acc));
  if (!aucs.empty()) out << " auc " << format_mean_std(mean_std(aucs));
  out << " (" << acc.size() << " runs)\n";
}

int cmd_generate(const Options& o, std::ostream& out) {
  SyntheticSpec spec;
  spec.m = o.m;
  spec.n = o.n;
  spec.two_hop_fraction = o.p2;
  spec.noise = o.noise;
  spec.amplitude = o.amplitude;
  spec.seed = o.seed;
  const SyntheticDataset ds = generate_synthetic(spec);
  const fs::path dir = output_dir(o);
  write_dataset(dir, ds.graphs);
  std::ofstream depths = open_file(dir / "depths.csv");
  depths << "id,depth\n";
  for (std::size_t i = 0; i < ds.graphs.size(); ++i) depths << ds.graphs[i].id << ',' << ds.optimal_depth[i] << '\n';
  out << "wrote " << ds.graphs.size() << " instances to " << dir.string() << '\n';
  return 0;
}

int cmd_build(const Options& o, std::ostream& out) {
  const auto graphs = load_dataset(o.dataset);
  const fs::path dir = output_dir(o);
  const InputMode mode = parse_input_mode(o.input_mode);
  for (const WeightedGraph& g : graphs) {
    const BuiltGraph built = build_graph(g, o.k, mode);
    write_matrix_csv(dir / (g.id + ".adjacency.csv"), built.adjacency);
    write_matrix_csv(dir / (g.id + ".normalized.csv"), built.normalized);
  }
  out << "built " << graphs.size() << " graphs into " << dir.string() << '\n';
  return 0;
}

int cmd_train(const Options& o, std::ostream& out) {
  const auto graphs = load_dataset(o.dataset);
  const ExperimentConfig base = experiment_config(o);
  const fs::path dir = output_dir(o);
  std::ofstream results = open_file(dir / "results.jsonl");
  std::ofstream log = open_file(dir / "run_log.jsonl");
  std::vector<double> acc, aucs;
  for (std::size_t r = 0; r < o.reps; ++r) {
    ExperimentConfig c = base;
    c.seed = base.seed + r;
    const PreparedData data = prepare_run(graphs, c);
    BnGnnRun run = run_bngnn(c, data, &log);
    results << results_record(c, run.result) << '\n';
    if (r == 0) {
      run.result.model->save((dir / "gnn.ckpt").string());
      run.mdp.agent->save((dir / "policy.ckpt").string());
    }
    acc.push_back(run.result.test.accuracy);
    if (run.result.test.auc) aucs.push_back(*run.result.test.auc);
  }
  report(out, "bn-" + o.gnn, acc, aucs);
  return 0;
}

int cmd_baseline(const Options& o, std::ostream& out) {
  const auto graphs = load_dataset(o.dataset);
  const ExperimentConfig base = experiment_config(o);
  const Method method = parse_method(o.method);
  if (method == Method::BnGnn) throw std::invalid_argument("use the train subcommand for bn");
  const fs::path dir = output_dir(o);
  std::ofstream results = open_file(dir / "results.jsonl");
  std::vector<double> acc, aucs;
  std::string label;
  for (std::size_t r = 0; r < o.reps; ++r) {
    ExperimentConfig c = base;
    c.seed = base.seed + r;
    const PreparedData data = prepare_run(graphs, c);
    RunResult run = run_baseline(method, o.depth, c, data);
    results << results_record(c, run) << '\n';
    if (r == 0) run.model->save((dir / "gnn.ckpt").string());
    label = method_label(run);
    acc.push_back(run.test.accuracy);
    if (run.test.auc) aucs.push_back(*run.test.auc);
  }
  report(out, label, acc, aucs);
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const auto graphs = load_dataset(o.dataset);
  SweepSpec spec;
  spec.parameter = o.param;
  spec.values = o.values;
  spec.repetitions = o.reps;
  const fs::path dir = output_dir(o);
  std::ofstream results = open_file(dir / "results.jsonl");
  const auto rows = run_sweep(spec, experiment_config(o), graphs, &results);
  open_file(dir / "sweep.json") << sweep_table_json(spec, rows) << '\n';
  for (const SweepRow& row : rows) {
    out << o.param << '=' << row.value << " accuracy " << format_mean_std(row.accuracy) << " auc "
        << format_mean_std(row.auc) << '\n';
  }
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out) {
  if (o.checkpoint.empty()) throw std::invalid_argument("--checkpoint is required");
  const auto graphs = load_dataset(o.dataset);
  const ExperimentConfig c = experiment_config(o);
  const PreparedData data = prepare_run(graphs, c);
  const fs::path ckpt = o.checkpoint;
  GnnModel model = GnnModel::load((ckpt / "gnn.ckpt").string());
  EvalResult result;
  if (fs::exists(ckpt / "policy.ckpt")) {
    auto agent = DdqnAgent::load((ckpt / "policy.ckpt").string());
    GreedyDepth depths(agent->q_eval(), o.action_cap);
    result = evaluate(model, data.test, depths);
  } else {
    FixedDepth depths(o.depth == 0 ? model.config().max_depth : o.depth);
    result = evaluate(model, data.test, depths);
  }
  nlohmann::ordered_json j;
  j["accuracy"] = result.accuracy;
  j["auc"] = result.auc ? nlohmann::ordered_json(*result.auc) : nlohmann::ordered_json(nullptr);
  j["depth_histogram"] = result.depth_histogram;
  out << j.dump() << '\n';
  if (!o.out.empty()) open_file(output_dir(o) / "eval.json") << j.dump() << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Adaptive-depth brain network GNN"};
  app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
  app.require_subcommand(1);

  app.add_option("--dataset", o.dataset, "Dataset directory");
  app.add_option("--gnn", o.gnn, "Backbone")->check(CLI::IsMember({"gcn", "gat"}));
  app.add_option("--b", o.b, "Number of depth actions")->check(CLI::PositiveNumber);
  app.add_option("--k", o.k, "KNN neighbours per node")->check(CLI::PositiveNumber);
  app.add_option("--subject-k", o.subject_k, "KNN neighbours in the subject graph")->check(CLI::PositiveNumber);
  app.add_option("--dim", o.dim, "GNN hidden dimension")->check(CLI::PositiveNumber);
  app.add_option("--timesteps", o.timesteps, "MDP timesteps")->check(CLI::PositiveNumber);
  app.add_option("--gamma", o.gamma, "Discount factor")->check(CLI::Range(0.0, 1.0));
  app.add_option("--window", o.window, "Reward window")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Base seed");
  app.add_option("--reps", o.reps, "Repetitions, seeds seed..seed+reps-1")->check(CLI::PositiveNumber);
  app.add_option("--input-mode", o.input_mode, "Aggregation input")
      ->check(CLI::IsMember({"raw", "degree", "normalized"}));
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--epochs", o.epochs, "Final GNN epochs")->check(CLI::PositiveNumber);
  app.add_option("--td-target", o.td_target, "Policy loss form")->check(CLI::IsMember({"max-eval", "taken-action"}));
  app.add_option("--per-mode", o.per_mode, "Validation depths for the reward")
      ->check(CLI::IsMember({"greedy", "current-action"}));
  app.add_flag("--gnn1-full-pass", o.gnn1_full_pass, "Train GNN1 on every training instance per step");
  app.add_option("--action-cap", o.action_cap, "Restrict actions to 1..cap");

  auto* generate = app.add_subcommand("generate", "Write a synthetic depth-mixture dataset");
  generate->add_option("--m", o.m, "Instances")->check(CLI::PositiveNumber);
  generate->add_option("--n", o.n, "Nodes")->check(CLI::PositiveNumber);
  generate->add_option("--p2", o.p2, "Fraction of two-hop instances")->check(CLI::Range(0.0, 1.0));
  generate->add_option("--noise", o.noise, "Noise level")->check(CLI::NonNegativeNumber);
  generate->add_option("--amplitude", o.amplitude, "Class signal amplitude")->check(CLI::NonNegativeNumber);

  auto* build = app.add_subcommand("build", "Write built adjacency matrices as CSV");
  auto* train = app.add_subcommand("train", "Run the full adaptive-depth pipeline");
  auto* baseline = app.add_subcommand("baseline", "Run a fixed, skip or random-depth baseline");
  baseline->add_option("--method", o.method, "Baseline kind")->check(CLI::IsMember({"fixed", "skip", "random"}));
  baseline->add_option("--depth", o.depth, "Depth for fixed and skip");
  baseline->add_flag("--random-fixed-per-instance", o.random_fixed_per_instance,
                     "Draw one random depth per instance instead of per epoch");
  auto* sweep = app.add_subcommand("sweep", "Hyperparameter sweep of the adaptive pipeline");
  sweep->add_option("--param", o.param, "Parameter to sweep")->check(CLI::IsMember({"k", "b", "dim"}));
  sweep->add_option("--values", o.values, "Comma-separated values")->delimiter(',')->required();
  auto* eval = app.add_subcommand("eval", "Evaluate a saved checkpoint on the test split");
  eval->add_option("--checkpoint", o.checkpoint, "Directory written by train or baseline");
  eval->add_option("--depth", o.depth, "Depth for checkpoints without a policy");

  for (auto* sub : {generate, build, train, baseline, sweep, eval}) sub->fallthrough();
  for (auto* sub : {build, train, baseline, sweep, eval}) sub->callback([&] {
    if (o.dataset.empty()) throw CLI::RequiredError("--dataset");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o_out, o_err;
    const int code = app.exit(e, o_out, o_err);
    out << o_out.str();
    err << o_err.str();
    return code;
  }

  try {
    if (generate->parsed()) return cmd_generate(o, out);
    if (build->parsed()) return cmd_build(o, out);
    if (train->parsed()) return cmd_train(o, out);
    if (baseline->parsed()) return cmd_baseline(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out);
    if (eval->parsed()) return cmd_eval(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace bngnn::cli
