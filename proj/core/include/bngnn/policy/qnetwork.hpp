#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bngnn/numerics/autodiff.hpp"
#include "bngnn/numerics/param_record.hpp"

namespace bngnn {

struct QNetworkConfig {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 256;
  std::size_t actions = 3;
  double leaky_slope = 0.2;
  std::uint64_t seed = 0;
};

// input → hidden (leaky-ReLU) → one Q-value per action, with biases.
class QNetwork {
 public:
  explicit QNetwork(const QNetworkConfig& config);

  const QNetworkConfig& config() const noexcept { return config_; }

  // states: B×input_dim, result B×actions.
  Var forward(Tape& tape, Var states);
  Matrix q_values(const Matrix& states);
  std::vector<double> q_values(std::span<const double> state);

  std::vector<Parameter*> parameters();
  void copy_parameters_from(const QNetwork& other);
  bool same_parameters(const QNetwork& other) const;

  void append_to(ParamRecord& record, const std::string& prefix) const;
  void load_from(const ParamRecord& record, const std::string& prefix);

 private:
  QNetworkConfig config_;
  Parameter hidden_weight_;
  Parameter hidden_bias_;
  Parameter output_weight_;
  Parameter output_bias_;
};

}  // namespace bngnn
