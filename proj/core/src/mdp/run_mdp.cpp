#include "bngnn/mdp/run_mdp.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "bngnn/numerics/adam.hpp"

namespace bngnn {

const char* to_string(PerMode mode) { return mode == PerMode::GreedyDepths ? "greedy" : "current-action"; }

PerMode parse_per_mode(const std::string& text) {
  if (text == "greedy") return PerMode::GreedyDepths;
  if (text == "current-action") return PerMode::CurrentAction;
  throw std::invalid_argument("unknown PER mode '" + text + "' (expected greedy or current-action)");
}

std::size_t transition(const SubjectGraph& subjects, std::size_t current, std::size_t action, Rng& rng,
                       std::size_t train_count) {
  if (train_count == 0 || train_count > subjects.size()) throw std::invalid_argument("transition: bad training count");
  std::vector<std::size_t> frontier;
  for (std::size_t v : subjects.hop_neighbors(current, action))
    if (v < train_count) frontier.push_back(v);
  if (frontier.empty()) return uniform_index(rng, train_count);
  return frontier[uniform_index(rng, frontier.size())];
}

GnnConfig gnn1_config(const MdpConfig& c, std::size_t input_dim) {
  GnnConfig g;
  g.kind = c.gnn;
  g.input_dim = input_dim;
  g.max_depth = c.actions;
  g.hidden_dim = c.hidden_dim;
  g.dropout = c.dropout;
  g.leaky_slope = c.leaky_slope;
  g.seed = make_rng(c.seed, 101)();
  return g;
}

DdqnConfig policy_config(const MdpConfig& c, std::size_t state_dim) {
  DdqnConfig d;
  d.input_dim = state_dim;
  d.actions = c.actions;
  d.hidden_dim = c.q_hidden;
  d.leaky_slope = c.leaky_slope;
  d.gamma = c.gamma;
  d.learning_rate = c.policy_learning_rate;
  d.replay_capacity = c.replay_capacity;
  d.batch_size = c.batch_size;
  d.sync_period = c.sync_period;
  d.td_target = c.td_target;
  d.epsilon = c.epsilon;
  d.seed = make_rng(c.seed, 102)();
  return d;
}

namespace {

std::size_t capped_select(DdqnAgent& agent, const std::vector<double>& state, std::size_t step, std::size_t cap,
                          Rng& explore) {
  if (cap == 0) return agent.act(state, step);
  const auto q = agent.q_eval().q_values(state);
  const double eps = agent.config().epsilon.at(step);
  if (uniform01(explore) < eps) return uniform_index(explore, std::min(cap, q.size())) + 1;
  return capped_argmax(q, cap);
}

}  // namespace

MdpResult run_mdp(const MdpConfig& config, const PreparedData& data, std::ostream* log_sink) {
  if (config.timesteps == 0 || config.actions == 0) throw std::invalid_argument("run_mdp: timesteps and actions must be positive");
  if (data.train.empty() || data.val.empty()) throw std::invalid_argument("run_mdp: empty train or validation split");

  auto agent = std::make_unique<DdqnAgent>(policy_config(config, data.state_dim()));
  GnnModel gnn1(gnn1_config(config, data.input_dim()));
  GnnModel gnn1_initial = gnn1;
  const auto params = gnn1.parameters();
  Adam adam(AdamOptions{config.gnn_learning_rate}, params);
  RewardWindow window(config.window);
  Rng transition_rng = make_rng(config.seed, streams::kTransition);
  Rng dropout_rng = make_rng(config.seed, streams::kGnnDropout);
  Rng cap_rng = make_rng(config.seed, streams::kExploration + 100);
  RunLog log(log_sink);

  std::vector<StatePtr> states;
  states.reserve(data.train.size());
  for (const BuiltGraph& g : data.train) states.push_back(std::make_shared<const std::vector<double>>(g.state));
  std::vector<const std::vector<double>*> val_states;
  for (const BuiltGraph& g : data.val) val_states.push_back(&g.state);

  std::size_t current = uniform_index(transition_rng, data.train.size());
  for (std::size_t step = 1; step <= config.timesteps; ++step) {
    TimestepRecord rec;
    rec.step = step;
    rec.state_id = data.train[current].id;
    rec.epsilon = agent->config().epsilon.at(step);
    try {
      const std::size_t action = capped_select(*agent, *states[current], step, config.action_cap, cap_rng);
      rec.action = action;

      if (config.gnn1_full_pass) {
        const double weight = 1.0 / static_cast<double>(data.train.size());
        double total = 0.0;
        for (const BuiltGraph& g : data.train) {
          Tape tape;
          Var loss = gnn1.loss(tape, g, action, true, &dropout_rng);
          total += loss.value()(0, 0);
          tape.backward(scale(loss, weight));
        }
        rec.gnn_loss = total * weight;
      } else {
        Tape tape;
        Var loss = gnn1.loss(tape, data.train[current], action, true, &dropout_rng);
        rec.gnn_loss = loss.value()(0, 0);
        tape.backward(loss);
      }
      adam.step();

      std::vector<std::size_t> val_depths;
      if (config.per_mode == PerMode::GreedyDepths) {
        const Matrix q = [&] {
          Matrix batch(val_states.size(), data.state_dim());
          for (std::size_t i = 0; i < val_states.size(); ++i)
            std::copy(val_states[i]->begin(), val_states[i]->end(), batch.row(i).begin());
          return agent->q_eval().q_values(batch);
        }();
        for (std::size_t i = 0; i < val_states.size(); ++i) val_depths.push_back(capped_argmax(q.row(i), config.action_cap));
      } else {
        val_depths.assign(data.val.size(), action);
      }
      const EvalResult per = evaluate(gnn1, data.val, val_depths);
      rec.per = per.accuracy;
      rec.reward = window.reward(per.correct, data.val.size());

      const std::size_t next = transition(data.subjects, current, action, transition_rng, data.train.size());
      rec.next_state_id = data.train[next].id;
      rec.policy_loss = agent->observe(Experience{current, states[current], action, rec.reward, next, states[next]});
      if (!std::isfinite(rec.policy_loss)) throw std::domain_error("non-finite policy loss");
      current = next;
    } catch (const std::domain_error& e) {
      log.add(rec);
      log.flush();
      throw RunAborted("run_mdp aborted at timestep " + std::to_string(step) + ": " + e.what(), log);
    }
    log.add(rec);
  }
  log.flush();
  return MdpResult{std::move(agent), std::move(gnn1), std::move(gnn1_initial), std::move(log)};
}

}  // namespace bngnn
