#include "bngnn/policy/agent.hpp"

#include <sstream>
#include <stdexcept>

namespace bngnn {

namespace {

QNetworkConfig q_config(const DdqnConfig& c) {
  return QNetworkConfig{c.input_dim, c.hidden_dim, c.actions, c.leaky_slope, c.seed};
}

std::string rng_state(const Rng& rng) {
  std::ostringstream out;
  out << rng;
  return out.str();
}

void restore_rng(Rng& rng, const std::string& text) {
  std::istringstream in(text);
  in >> rng;
  if (!in) throw std::runtime_error("DdqnAgent: corrupt generator state in checkpoint");
}

}  // namespace

DdqnAgent::DdqnAgent(const DdqnConfig& config)
    : config_(config),
      q_eval_(std::make_unique<QNetwork>(q_config(config))),
      q_target_(std::make_unique<QNetwork>(q_config(config))),
      memory_(config.replay_capacity),
      explore_rng_(make_rng(config.seed, streams::kExploration)),
      replay_rng_(make_rng(config.seed, streams::kReplay)) {
  if (!(config_.gamma >= 0.0 && config_.gamma < 1.0)) throw std::invalid_argument("DdqnAgent: gamma must be in [0,1)");
  if (config_.batch_size == 0 || config_.sync_period == 0) {
    throw std::invalid_argument("DdqnAgent: batch size and sync period must be positive");
  }
  q_target_->copy_parameters_from(*q_eval_);
  const auto params = q_eval_->parameters();
  optimizer_ = std::make_unique<Adam>(AdamOptions{config_.learning_rate}, params);
}

std::size_t DdqnAgent::act(std::span<const double> state, std::size_t timestep) {
  const auto q = q_eval_->q_values(state);
  return select_action(q, config_.epsilon.at(timestep), explore_rng_);
}

std::size_t DdqnAgent::greedy(std::span<const double> state) { return argmax(q_eval_->q_values(state)) + 1; }

std::vector<std::size_t> DdqnAgent::greedy_batch(std::span<const std::vector<double>* const> states) {
  std::vector<std::size_t> out;
  if (states.empty()) return out;
  Matrix batch(states.size(), config_.input_dim);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i]->size() != config_.input_dim) throw DimensionError("greedy_batch: state has wrong length");
    std::copy(states[i]->begin(), states[i]->end(), batch.row(i).begin());
  }
  const Matrix q = q_eval_->q_values(batch);
  out.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) out.push_back(argmax(q.row(i)) + 1);
  return out;
}

double DdqnAgent::observe(Experience e) {
  memory_.push(std::move(e));
  const auto batch = memory_.sample(config_.batch_size, replay_rng_);
  double loss_value = 0.0;
  {
    Tape tape;
    Var loss = policy_loss(tape, *q_eval_, *q_target_, batch, config_.gamma, config_.td_target);
    loss_value = loss.value()(0, 0);
    tape.backward(loss);
  }
  optimizer_->step();
  ++steps_;
  if (steps_ % config_.sync_period == 0) sync_target();
  return loss_value;
}

void DdqnAgent::sync_target() { q_target_->copy_parameters_from(*q_eval_); }

ParamRecord DdqnAgent::to_record() const {
  ParamRecord r;
  r.kind = "policy";
  r.meta = {{"input_dim", std::to_string(config_.input_dim)},
            {"actions", std::to_string(config_.actions)},
            {"hidden_dim", std::to_string(config_.hidden_dim)},
            {"leaky_slope", format_double(config_.leaky_slope)},
            {"gamma", format_double(config_.gamma)},
            {"learning_rate", format_double(config_.learning_rate)},
            {"replay_capacity", std::to_string(config_.replay_capacity)},
            {"batch_size", std::to_string(config_.batch_size)},
            {"sync_period", std::to_string(config_.sync_period)},
            {"td_target", to_string(config_.td_target)},
            {"epsilon_start", format_double(config_.epsilon.start())},
            {"epsilon_end", format_double(config_.epsilon.end())},
            {"epsilon_horizon", std::to_string(config_.epsilon.horizon())},
            {"seed", std::to_string(config_.seed)},
            {"steps", std::to_string(steps_)},
            {"explore_rng", rng_state(explore_rng_)},
            {"replay_rng", rng_state(replay_rng_)}};
  q_eval_->append_to(r, "eval.");
  q_target_->append_to(r, "target.");
  const auto& slots = optimizer_->slots();
  const auto params = optimizer_->params();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    r.meta.emplace_back("adam_steps." + params[i]->name, std::to_string(slots[i].steps));
    r.matrices.emplace_back("adam_m." + params[i]->name, slots[i].m);
    r.matrices.emplace_back("adam_v." + params[i]->name, slots[i].v);
  }
  return r;
}

std::unique_ptr<DdqnAgent> DdqnAgent::from_record(const ParamRecord& r) {
  if (r.kind != "policy") throw std::invalid_argument("DdqnAgent: record kind '" + r.kind + "' is not policy");
  DdqnConfig c;
  c.input_dim = std::stoul(r.meta_value("input_dim"));
  c.actions = std::stoul(r.meta_value("actions"));
  c.hidden_dim = std::stoul(r.meta_value("hidden_dim"));
  c.leaky_slope = std::stod(r.meta_value("leaky_slope"));
  c.gamma = std::stod(r.meta_value("gamma"));
  c.learning_rate = std::stod(r.meta_value("learning_rate"));
  c.replay_capacity = std::stoul(r.meta_value("replay_capacity"));
  c.batch_size = std::stoul(r.meta_value("batch_size"));
  c.sync_period = std::stoul(r.meta_value("sync_period"));
  c.td_target = parse_td_target(r.meta_value("td_target"));
  c.epsilon = EpsilonSchedule(std::stod(r.meta_value("epsilon_start")), std::stod(r.meta_value("epsilon_end")),
                              std::stoul(r.meta_value("epsilon_horizon")));
  c.seed = std::stoull(r.meta_value("seed"));
  auto agent = std::make_unique<DdqnAgent>(c);
  agent->q_eval_->load_from(r, "eval.");
  agent->q_target_->load_from(r, "target.");
  agent->steps_ = std::stoull(r.meta_value("steps"));
  restore_rng(agent->explore_rng_, r.meta_value("explore_rng"));
  restore_rng(agent->replay_rng_, r.meta_value("replay_rng"));
  auto& slots = agent->optimizer_->slots();
  const auto params = agent->optimizer_->params();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    slots[i].steps = std::stoull(r.meta_value("adam_steps." + params[i]->name));
    slots[i].m = r.matrix("adam_m." + params[i]->name);
    slots[i].v = r.matrix("adam_v." + params[i]->name);
  }
  return agent;
}

void DdqnAgent::save(const std::string& path) const { save_param_record(path, to_record()); }

std::unique_ptr<DdqnAgent> DdqnAgent::load(const std::string& path) { return from_record(load_param_record(path)); }

}  // namespace bngnn
