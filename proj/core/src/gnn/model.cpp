#include "bngnn/gnn/model.hpp"

#include <cmath>
#include <stdexcept>

namespace bngnn {

namespace {

std::uint64_t init_stream(std::size_t layer, std::size_t role) {
  return streams::kGnnInit * 1'000'000 + layer * 10 + role;
}

}  // namespace

const char* to_string(GnnKind kind) { return kind == GnnKind::Gcn ? "gcn" : "gat"; }

GnnKind parse_gnn_kind(const std::string& text) {
  if (text == "gcn") return GnnKind::Gcn;
  if (text == "gat") return GnnKind::Gat;
  throw std::invalid_argument("unknown gnn kind '" + text + "' (expected gcn or gat)");
}

Prediction predict_from_logits(const Matrix& logits) {
  Prediction out;
  const Matrix p = softmax_rows(logits);
  out.probabilities.assign(p.values().begin(), p.values().end());
  for (std::size_t c = 1; c < logits.cols(); ++c)
    if (logits(0, c) > logits(0, out.label)) out.label = c;
  return out;
}

Var gcn_layer(Var aggregation, Var x, Var transform, double slope) {
  return leaky_relu(aggregate(aggregation, matmul(x, transform)), slope);
}

Var gat_layer(Var x, Var transform, Var attention, const Matrix& mask, double slope, Var* weights_out) {
  Var h = matmul(x, transform);
  Var scores = leaky_relu(attention_scores(h, attention), slope);
  Var alpha = masked_softmax_rows(scores, mask);
  if (weights_out != nullptr) *weights_out = alpha;
  return leaky_relu(aggregate(alpha, h), slope);
}

GnnModel::GnnModel(const GnnConfig& config) : config_(config) {
  if (config_.input_dim == 0 || config_.hidden_dim == 0 || config_.num_classes < 2 || config_.max_depth == 0) {
    throw std::invalid_argument("GnnModel: dimensions, depth and class count must be positive");
  }
  layers_.reserve(config_.max_depth);
  for (std::size_t l = 1; l <= config_.max_depth; ++l) {
    const std::size_t fan_in = l == 1 ? config_.input_dim : config_.hidden_dim;
    Rng rng = make_rng(config_.seed, init_stream(l, 0));
    Layer layer;
    layer.transform = Parameter("layer" + std::to_string(l) + ".transform",
                                glorot_uniform(fan_in, config_.hidden_dim, rng));
    if (config_.kind == GnnKind::Gat) {
      Rng arng = make_rng(config_.seed, init_stream(l, 1));
      layer.attention = Parameter("layer" + std::to_string(l) + ".attention",
                                  glorot_uniform(2 * config_.hidden_dim, 1, arng).transposed());
    }
    layers_.push_back(std::move(layer));
  }
  Rng crng = make_rng(config_.seed, init_stream(0, 2));
  classifier_ = Parameter("classifier", glorot_uniform(config_.hidden_dim, config_.num_classes, crng));
}

void GnnModel::check_depth(std::size_t depth) const {
  if (depth < 1 || depth > config_.max_depth) {
    throw std::out_of_range("GnnModel: depth " + std::to_string(depth) + " outside [1, " +
                            std::to_string(config_.max_depth) + "]");
  }
}

Var GnnModel::node_features(Tape& tape, const BuiltGraph& g, std::size_t depth, bool training, Rng* dropout_rng) {
  check_depth(depth);
  if (g.features.cols() != config_.input_dim) {
    throw DimensionError("GnnModel: features " + g.features.shape_string() + " but input_dim " +
                         std::to_string(config_.input_dim));
  }
  if (training && config_.dropout > 0.0 && dropout_rng == nullptr) {
    throw std::invalid_argument("GnnModel: training forward needs a dropout generator");
  }
  Var agg = tape.constant_view(g.aggregation);
  Var x = tape.constant_view(g.features);
  for (std::size_t l = 1; l <= depth; ++l) {
    if (l > 1 && training) x = dropout(x, config_.dropout, true, *dropout_rng);
    Layer& layer = layers_[l - 1];
    Var t = tape.parameter(layer.transform);
    Var h = config_.kind == GnnKind::Gcn
                ? gcn_layer(agg, x, t, config_.leaky_slope)
                : gat_layer(x, t, tape.parameter(layer.attention), g.attention_mask, config_.leaky_slope);
    if (config_.residual && l > 1) h = add(h, x);
    x = h;
  }
  return x;
}

Var GnnModel::logits(Tape& tape, const BuiltGraph& g, std::size_t depth, bool training, Rng* dropout_rng) {
  Var pooled = mean_rows(node_features(tape, g, depth, training, dropout_rng));
  return matmul(pooled, tape.parameter(classifier_));
}

Var GnnModel::loss(Tape& tape, const BuiltGraph& g, std::size_t depth, bool training, Rng* dropout_rng) {
  if (g.label < 0 || static_cast<std::size_t>(g.label) >= config_.num_classes) {
    throw std::out_of_range("GnnModel: label " + std::to_string(g.label) + " of '" + g.id + "' out of range");
  }
  return softmax_cross_entropy(logits(tape, g, depth, training, dropout_rng), static_cast<std::size_t>(g.label));
}

Prediction GnnModel::predict(const BuiltGraph& g, std::size_t depth) {
  Tape tape(false);
  return predict_from_logits(logits(tape, g, depth).value());
}

std::vector<Parameter*> GnnModel::parameters() {
  std::vector<Parameter*> out;
  for (std::size_t l = 1; l <= layers_.size(); ++l)
    for (Parameter* p : layer_parameters(l)) out.push_back(p);
  out.push_back(&classifier_);
  return out;
}

std::vector<Parameter*> GnnModel::layer_parameters(std::size_t l) {
  Layer& ly = layer(l);
  std::vector<Parameter*> out{&ly.transform};
  if (config_.kind == GnnKind::Gat) out.push_back(&ly.attention);
  return out;
}

GnnModel::Layer& GnnModel::layer(std::size_t l) {
  if (l < 1 || l > layers_.size()) throw std::out_of_range("GnnModel: layer index out of range");
  return layers_[l - 1];
}

void GnnModel::copy_parameters_from(const GnnModel& other) {
  if (other.layers_.size() != layers_.size() || other.config_.kind != config_.kind) {
    throw std::invalid_argument("GnnModel: copy between incompatible models");
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].transform.value = other.layers_[l].transform.value;
    layers_[l].attention.value = other.layers_[l].attention.value;
  }
  classifier_.value = other.classifier_.value;
}

ParamRecord GnnModel::to_record() const {
  ParamRecord r;
  r.kind = "gnn";
  r.meta = {{"gnn", to_string(config_.kind)},
            {"max_depth", std::to_string(config_.max_depth)},
            {"input_dim", std::to_string(config_.input_dim)},
            {"hidden_dim", std::to_string(config_.hidden_dim)},
            {"num_classes", std::to_string(config_.num_classes)},
            {"dropout", format_double(config_.dropout)},
            {"leaky_slope", format_double(config_.leaky_slope)},
            {"residual", config_.residual ? "1" : "0"},
            {"seed", std::to_string(config_.seed)}};
  for (const Layer& l : layers_) {
    r.matrices.emplace_back(l.transform.name, l.transform.value);
    if (config_.kind == GnnKind::Gat) r.matrices.emplace_back(l.attention.name, l.attention.value);
  }
  r.matrices.emplace_back(classifier_.name, classifier_.value);
  return r;
}

GnnModel GnnModel::from_record(const ParamRecord& r) {
  if (r.kind != "gnn") throw std::invalid_argument("GnnModel: record kind '" + r.kind + "' is not gnn");
  GnnConfig c;
  c.kind = parse_gnn_kind(r.meta_value("gnn"));
  c.max_depth = std::stoul(r.meta_value("max_depth"));
  c.input_dim = std::stoul(r.meta_value("input_dim"));
  c.hidden_dim = std::stoul(r.meta_value("hidden_dim"));
  c.num_classes = std::stoul(r.meta_value("num_classes"));
  c.dropout = std::stod(r.meta_value("dropout"));
  c.leaky_slope = std::stod(r.meta_value("leaky_slope"));
  c.residual = r.meta_value("residual") == "1";
  c.seed = std::stoull(r.meta_value("seed"));
  GnnModel model(c);
  for (Parameter* p : model.parameters()) {
    const Matrix& m = r.matrix(p->name);
    if (!m.same_shape(p->value)) {
      throw DimensionError("GnnModel: checkpoint matrix " + p->name + " has shape " + m.shape_string());
    }
    p->value = m;
  }
  return model;
}

void GnnModel::save(const std::string& path) const { save_param_record(path, to_record()); }

GnnModel GnnModel::load(const std::string& path) { return from_record(load_param_record(path)); }

}  // namespace bngnn
