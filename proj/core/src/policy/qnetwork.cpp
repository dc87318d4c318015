#include "bngnn/policy/qnetwork.hpp"

#include <stdexcept>

namespace bngnn {

QNetwork::QNetwork(const QNetworkConfig& config) : config_(config) {
  if (config_.input_dim == 0 || config_.hidden_dim == 0 || config_.actions == 0) {
    throw std::invalid_argument("QNetwork: dimensions must be positive");
  }
  Rng hidden_rng = make_rng(config_.seed, streams::kPolicyInit * 1'000'000 + 1);
  Rng output_rng = make_rng(config_.seed, streams::kPolicyInit * 1'000'000 + 2);
  hidden_weight_ = Parameter("hidden.weight", glorot_uniform(config_.input_dim, config_.hidden_dim, hidden_rng));
  hidden_bias_ = Parameter("hidden.bias", Matrix(1, config_.hidden_dim));
  output_weight_ = Parameter("output.weight", glorot_uniform(config_.hidden_dim, config_.actions, output_rng));
  output_bias_ = Parameter("output.bias", Matrix(1, config_.actions));
}

Var QNetwork::forward(Tape& tape, Var states) {
  if (states.cols() != config_.input_dim) {
    throw DimensionError("QNetwork: states " + states.value().shape_string() + " but input_dim " +
                         std::to_string(config_.input_dim));
  }
  Var h = leaky_relu(add_row(matmul(states, tape.parameter(hidden_weight_)), tape.parameter(hidden_bias_)),
                     config_.leaky_slope);
  return add_row(matmul(h, tape.parameter(output_weight_)), tape.parameter(output_bias_));
}

Matrix QNetwork::q_values(const Matrix& states) {
  Tape tape(false);
  return forward(tape, tape.constant_view(states)).value();
}

std::vector<double> QNetwork::q_values(std::span<const double> state) {
  const Matrix q = q_values(Matrix::row_vector(state));
  return {q.values().begin(), q.values().end()};
}

std::vector<Parameter*> QNetwork::parameters() {
  return {&hidden_weight_, &hidden_bias_, &output_weight_, &output_bias_};
}

void QNetwork::copy_parameters_from(const QNetwork& other) {
  if (other.config_.input_dim != config_.input_dim || other.config_.hidden_dim != config_.hidden_dim ||
      other.config_.actions != config_.actions) {
    throw std::invalid_argument("QNetwork: copy between incompatible networks");
  }
  hidden_weight_.value = other.hidden_weight_.value;
  hidden_bias_.value = other.hidden_bias_.value;
  output_weight_.value = other.output_weight_.value;
  output_bias_.value = other.output_bias_.value;
}

bool QNetwork::same_parameters(const QNetwork& other) const {
  return hidden_weight_.value == other.hidden_weight_.value && hidden_bias_.value == other.hidden_bias_.value &&
         output_weight_.value == other.output_weight_.value && output_bias_.value == other.output_bias_.value;
}

void QNetwork::append_to(ParamRecord& record, const std::string& prefix) const {
  for (const Parameter* p : {&hidden_weight_, &hidden_bias_, &output_weight_, &output_bias_})
    record.matrices.emplace_back(prefix + p->name, p->value);
}

void QNetwork::load_from(const ParamRecord& record, const std::string& prefix) {
  for (Parameter* p : parameters()) {
    const Matrix& m = record.matrix(prefix + p->name);
    if (!m.same_shape(p->value)) throw DimensionError("QNetwork: checkpoint matrix " + prefix + p->name + " has shape " + m.shape_string());
    p->value = m;
  }
}

}  // namespace bngnn
