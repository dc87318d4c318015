#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bngnn/netbuild/graph.hpp"
#include "bngnn/numerics/autodiff.hpp"
#include "bngnn/numerics/param_record.hpp"

namespace bngnn {

enum class GnnKind { Gcn, Gat };

const char* to_string(GnnKind kind);
GnnKind parse_gnn_kind(const std::string& text);

struct GnnConfig {
  GnnKind kind = GnnKind::Gcn;
  std::size_t input_dim = 0;
  std::size_t max_depth = 3;
  std::size_t hidden_dim = 128;
  std::size_t num_classes = 2;
  double dropout = 0.3;
  double leaky_slope = 0.2;
  bool residual = false;
  std::uint64_t seed = 0;
};

struct Prediction {
  std::size_t label = 0;
  std::vector<double> probabilities;
};

// argmax of softmax(logits), ties to the lower class.
Prediction predict_from_logits(const Matrix& logits);

// leaky(aggregation · x · transform)
Var gcn_layer(Var aggregation, Var x, Var transform, double slope);
// Single-head attention restricted to mask; optionally exposes the attention matrix.
Var gat_layer(Var x, Var transform, Var attention, const Matrix& mask, double slope,
              Var* weights_out = nullptr);

// b-layer GNN with a shared classifier; any depth j ≤ b uses layers 1..j only.
class GnnModel {
 public:
  struct Layer {
    Parameter transform;
    Parameter attention;  // empty for GCN
  };

  explicit GnnModel(const GnnConfig& config);

  const GnnConfig& config() const noexcept { return config_; }

  Var node_features(Tape& tape, const BuiltGraph& g, std::size_t depth, bool training = false,
                    Rng* dropout_rng = nullptr);
  Var logits(Tape& tape, const BuiltGraph& g, std::size_t depth, bool training = false,
             Rng* dropout_rng = nullptr);
  Var loss(Tape& tape, const BuiltGraph& g, std::size_t depth, bool training = false,
           Rng* dropout_rng = nullptr);
  Prediction predict(const BuiltGraph& g, std::size_t depth);

  std::vector<Parameter*> parameters();
  std::vector<Parameter*> layer_parameters(std::size_t layer);  // 1-based
  Layer& layer(std::size_t layer);                               // 1-based
  Parameter& classifier() noexcept { return classifier_; }

  void copy_parameters_from(const GnnModel& other);

  ParamRecord to_record() const;
  static GnnModel from_record(const ParamRecord& record);
  void save(const std::string& path) const;
  static GnnModel load(const std::string& path);

 private:
  void check_depth(std::size_t depth) const;

  GnnConfig config_;
  std::vector<Layer> layers_;
  Parameter classifier_;
};

}  // namespace bngnn
