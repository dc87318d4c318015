#include "bngnn/experiments/results.hpp"

#include "json.hpp"

namespace bngnn {

using nlohmann::ordered_json;

namespace {

ordered_json config_object(const ExperimentConfig& c) {
  ordered_json j;
  j["gnn"] = to_string(c.mdp.gnn);
  j["b"] = c.mdp.actions;
  j["k"] = c.k;
  j["subject_k"] = c.subject_k;
  j["dim"] = c.mdp.hidden_dim;
  j["timesteps"] = c.mdp.timesteps;
  j["gamma"] = c.mdp.gamma;
  j["window"] = c.mdp.window;
  j["input_mode"] = to_string(c.input_mode);
  j["epochs"] = c.epochs;
  j["gnn_batch_size"] = c.gnn_batch_size;
  j["gnn_lr"] = c.mdp.gnn_learning_rate;
  j["policy_lr"] = c.mdp.policy_learning_rate;
  j["dropout"] = c.mdp.dropout;
  j["leaky_slope"] = c.mdp.leaky_slope;
  j["q_hidden"] = c.mdp.q_hidden;
  j["replay_capacity"] = c.mdp.replay_capacity;
  j["policy_batch"] = c.mdp.batch_size;
  j["sync_period"] = c.mdp.sync_period;
  j["td_target"] = to_string(c.mdp.td_target);
  j["per_mode"] = to_string(c.mdp.per_mode);
  j["gnn1_full_pass"] = c.mdp.gnn1_full_pass;
  j["action_cap"] = c.mdp.action_cap;
  j["epsilon_start"] = c.mdp.epsilon.start();
  j["epsilon_end"] = c.mdp.epsilon.end();
  j["epsilon_horizon"] = c.mdp.epsilon.horizon();
  j["random_fixed_per_instance"] = c.random_fixed_per_instance;
  j["seed"] = c.seed;
  return j;
}

ordered_json eval_object(const EvalResult& e) {
  ordered_json j;
  j["accuracy"] = e.accuracy;
  j["auc"] = e.auc ? ordered_json(*e.auc) : ordered_json(nullptr);
  j["depth_histogram"] = e.depth_histogram;
  ordered_json preds = ordered_json::array();
  for (const auto& p : e.predictions) {
    preds.push_back(ordered_json{{"id", p.id}, {"label", p.label}, {"predicted", p.predicted},
                                 {"p1", p.positive_probability}, {"depth", p.depth}});
  }
  j["predictions"] = std::move(preds);
  return j;
}

}  // namespace

std::string config_json(const ExperimentConfig& config) { return config_object(config).dump(); }

std::string results_record(const ExperimentConfig& config, const RunResult& run) {
  ordered_json j;
  j["method"] = method_label(run);
  j["config"] = config_object(config);
  j["accuracy"] = run.test.accuracy;
  j["auc"] = run.test.auc ? ordered_json(*run.test.auc) : ordered_json(nullptr);
  j["depth_histogram"] = run.test.depth_histogram;
  j["best_epoch"] = run.best_epoch;
  j["val_accuracy"] = run.validation.accuracy;
  j["test"] = eval_object(run.test);
  return j.dump();
}

std::string sweep_table_json(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  ordered_json j;
  j["parameter"] = spec.parameter;
  j["repetitions"] = spec.repetitions;
  ordered_json table = ordered_json::array();
  for (const auto& r : rows) {
    table.push_back(ordered_json{{"value", r.value},
                                 {"accuracy_mean", r.accuracy.mean},
                                 {"accuracy_std", r.accuracy.std},
                                 {"accuracy", format_mean_std(r.accuracy)},
                                 {"auc_mean", r.auc.mean},
                                 {"auc_std", r.auc.std},
                                 {"auc", format_mean_std(r.auc)}});
  }
  j["rows"] = std::move(table);
  return j.dump();
}

}  // namespace bngnn
