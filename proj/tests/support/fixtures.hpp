#pragma once

// Independent reference implementations and fixture builders shared by the
// unit and acceptance tests. Nothing here calls into the code under test
// except for plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "bngnn/netbuild/graph.hpp"
#include "bngnn/numerics/matrix.hpp"

namespace bngnn::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = u(rng);
  return m;
}

inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      long double s = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += static_cast<long double>(a(i, k)) * b(k, j);
      out(i, j) = static_cast<double>(s);
    }
  return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

// Fraction of (positive, negative) pairs ordered correctly, ties counted ½.
inline double brute_force_auc(std::span<const double> scores, std::span<const int> labels) {
  double good = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) good += 1.0;
      else if (scores[i] == scores[j]) good += 0.5;
    }
  }
  return good / static_cast<double>(pairs);
}

// Row permutation: out row i = in row perm[i].
inline Matrix permute_rows(const Matrix& m, std::span<const std::size_t> perm) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(perm[i], j);
  return out;
}

// P·m·Pᵀ for the same permutation.
inline Matrix permute_both(const Matrix& m, std::span<const std::size_t> perm) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(perm[i], perm[j]);
  return out;
}

inline std::vector<std::size_t> random_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// Relabels every node-indexed field of a built graph.
inline BuiltGraph permute_graph(const BuiltGraph& g, std::span<const std::size_t> perm) {
  BuiltGraph p = g;
  p.features = permute_rows(g.features, perm);
  p.adjacency = permute_both(g.adjacency, perm);
  p.normalized = permute_both(g.normalized, perm);
  p.aggregation = permute_both(g.aggregation, perm);
  p.attention_mask = permute_both(g.attention_mask, perm);
  return p;
}

// Symmetric weighted matrix with unit diagonal, like a correlation matrix.
inline WeightedGraph random_weighted_graph(std::size_t n, std::mt19937_64& rng, int label = 0,
                                           std::string id = "g") {
  Matrix w = random_matrix(n, n, rng);
  for (std::size_t i = 0; i < n; ++i) {
    w(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) w(i, j) = w(j, i);
  }
  return WeightedGraph{std::move(id), std::move(w), label};
}

}  // namespace bngnn::testing
