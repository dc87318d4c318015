#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bngnn/numerics/matrix.hpp"

namespace bngnn {

// One subject: raw weighted matrix W (n×n) and its class label.
struct WeightedGraph {
  std::string id;
  Matrix weights;
  int label = 0;
};

using NeighborLists = std::vector<std::vector<std::size_t>>;

// Which matrix the GNN aggregates with and the policy observes.
enum class InputMode { Raw, Degree, Normalized };

const char* to_string(InputMode mode);
InputMode parse_input_mode(const std::string& text);

struct BuiltGraph {
  std::string id;
  int label = 0;
  Matrix adjacency;    // A: KNN edges weighted exp(−distance)
  Matrix normalized;   // D̃^{-1/2}(A+I)D̃^{-1/2}
  Matrix features;     // F⁰ = W
  NeighborLists neighbors;  // V(i) = {j : A(i,j) > 0}
  Matrix aggregation;  // matrix applied by each GCN layer (depends on InputMode)
  Matrix attention_mask;    // 1 where GAT attends: V(i) ∪ {i} under the same mode
  std::vector<double> state;  // flattened aggregation matrix, the policy input
};

std::vector<double> pairwise_distances(const Matrix& features);

NeighborLists knn_neighbors(const Matrix& features, std::size_t k);
Matrix build_adjacency(const Matrix& features, std::size_t k);
Matrix normalize_adjacency(const Matrix& adjacency);
NeighborLists neighbors_from_adjacency(const Matrix& adjacency);
// i–j edge whenever i∈V(j) or j∈V(i); lists ascending.
NeighborLists symmetrize(const NeighborLists& knn);

BuiltGraph build_graph(const WeightedGraph& graph, std::size_t k,
                       InputMode mode = InputMode::Normalized);

// Coarse graph whose nodes are whole subjects, built with the same KNN rule on
// flattened weight matrices.
class SubjectGraph {
 public:
  SubjectGraph() = default;
  SubjectGraph(std::vector<std::string> ids, Matrix adjacency);
  // Explicit edge lists, for when exp(−distance) underflows on far-apart subjects.
  SubjectGraph(std::vector<std::string> ids, Matrix adjacency, NeighborLists neighbors);

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const Matrix& adjacency() const noexcept { return adjacency_; }
  const NeighborLists& neighbors() const noexcept { return neighbors_; }

  // Nodes at breadth-first distance exactly `hops` from `node`, ascending.
  std::vector<std::size_t> hop_neighbors(std::size_t node, std::size_t hops) const;
  std::vector<std::size_t> bfs_distances(std::size_t node) const;

 private:
  std::vector<std::string> ids_;
  Matrix adjacency_;
  NeighborLists neighbors_;
};

SubjectGraph build_subject_graph(const std::vector<const WeightedGraph*>& subjects, std::size_t k);
SubjectGraph build_subject_graph(const std::vector<WeightedGraph>& subjects, std::size_t k);

}  // namespace bngnn
