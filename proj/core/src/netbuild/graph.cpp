#include "bngnn/netbuild/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bngnn {

const char* to_string(InputMode mode) {
  switch (mode) {
    case InputMode::Raw: return "raw";
    case InputMode::Degree: return "degree";
    case InputMode::Normalized: return "normalized";
  }
  return "?";
}

InputMode parse_input_mode(const std::string& text) {
  if (text == "raw") return InputMode::Raw;
  if (text == "degree") return InputMode::Degree;
  if (text == "normalized") return InputMode::Normalized;
  throw std::invalid_argument("unknown input mode '" + text + "' (expected raw, degree or normalized)");
}

std::vector<double> pairwise_distances(const Matrix& features) {
  const std::size_t n = features.rows();
  std::vector<double> dist(n * n, 0.0);
  std::vector<double> terms(features.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t c = 0; c < features.cols(); ++c) {
        const double diff = features(i, c) - features(j, c);
        terms[c] = diff * diff;
      }
      const double d = std::sqrt(ordered_sum(terms));
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }
  return dist;
}

namespace {

NeighborLists knn_from_distances(const std::vector<double>& dist, std::size_t n, std::size_t k) {
  if (k < 1 || k >= n) {
    throw std::invalid_argument("knn_neighbors: k=" + std::to_string(k) + " must satisfy 1 <= k < n=" +
                                std::to_string(n));
  }
  NeighborLists out(n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double da = dist[i * n + a];
                        const double db = dist[i * n + b];
                        return da < db || (da == db && a < b);
                      });
    out[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(out[i].begin(), out[i].end());
  }
  return out;
}

Matrix adjacency_from_knn(const NeighborLists& knn, const std::vector<double>& dist, std::size_t n) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : knn[i]) {
      const double w = std::exp(-dist[i * n + j]);
      a(i, j) = w;
      a(j, i) = w;
    }
  }
  return a;
}

}  // namespace

NeighborLists knn_neighbors(const Matrix& features, std::size_t k) {
  return knn_from_distances(pairwise_distances(features), features.rows(), k);
}

Matrix build_adjacency(const Matrix& features, std::size_t k) {
  const std::size_t n = features.rows();
  const auto dist = pairwise_distances(features);
  return adjacency_from_knn(knn_from_distances(dist, n, k), dist, n);
}

Matrix normalize_adjacency(const Matrix& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw DimensionError("normalize_adjacency: matrix must be square, got " + adjacency.shape_string());
  }
  const std::size_t n = adjacency.rows();
  std::vector<double> degree(n);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = adjacency(i, j);
      if (v < 0.0) throw std::invalid_argument("normalize_adjacency: negative entry");
      row[j] = v + (i == j ? 1.0 : 0.0);
    }
    degree[i] = ordered_sum(row);
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out(i, j) = (adjacency(i, j) + (i == j ? 1.0 : 0.0)) / std::sqrt(degree[i] * degree[j]);
  return out;
}

NeighborLists neighbors_from_adjacency(const Matrix& adjacency) {
  NeighborLists out(adjacency.rows());
  for (std::size_t i = 0; i < adjacency.rows(); ++i)
    for (std::size_t j = 0; j < adjacency.cols(); ++j)
      if (i != j && adjacency(i, j) > 0.0) out[i].push_back(j);
  return out;
}

NeighborLists symmetrize(const NeighborLists& knn) {
  const std::size_t n = knn.size();
  std::vector<std::vector<char>> edge(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : knn[i]) edge[i][j] = edge[j][i] = 1;
  NeighborLists out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (edge[i][j] && i != j) out[i].push_back(j);
  return out;
}

BuiltGraph build_graph(const WeightedGraph& graph, std::size_t k, InputMode mode) {
  const Matrix& w = graph.weights;
  if (w.rows() != w.cols()) throw DimensionError("build_graph: W must be square, got " + w.shape_string());
  require_finite(w, ("build_graph(" + graph.id + ")").c_str());
  const std::size_t n = w.rows();

  BuiltGraph g;
  g.id = graph.id;
  g.label = graph.label;
  g.features = w;
  g.adjacency = build_adjacency(w, k);
  g.normalized = normalize_adjacency(g.adjacency);
  g.neighbors = neighbors_from_adjacency(g.adjacency);

  g.attention_mask = Matrix::identity(n);
  switch (mode) {
    case InputMode::Normalized:
      g.aggregation = g.normalized;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : g.neighbors[i]) g.attention_mask(i, j) = 1.0;
      break;
    case InputMode::Raw:
      g.aggregation = w;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (w(i, j) != 0.0) g.attention_mask(i, j) = 1.0;
      break;
    case InputMode::Degree: {
      g.aggregation = Matrix(n, n);
      std::vector<double> row(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row[j] = g.adjacency(i, j) + (i == j ? 1.0 : 0.0);
        g.aggregation(i, i) = ordered_sum(row);
      }
      break;
    }
  }
  g.state.assign(g.aggregation.values().begin(), g.aggregation.values().end());
  return g;
}

}  // namespace bngnn
