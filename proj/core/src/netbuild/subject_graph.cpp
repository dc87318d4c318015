#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

#include "bngnn/netbuild/graph.hpp"

namespace bngnn {

SubjectGraph::SubjectGraph(std::vector<std::string> ids, Matrix adjacency)
    : ids_(std::move(ids)), adjacency_(std::move(adjacency)) {
  if (adjacency_.rows() != ids_.size() || adjacency_.cols() != ids_.size()) {
    throw DimensionError("SubjectGraph: adjacency " + adjacency_.shape_string() + " for " +
                         std::to_string(ids_.size()) + " subjects");
  }
  neighbors_ = neighbors_from_adjacency(adjacency_);
}

SubjectGraph::SubjectGraph(std::vector<std::string> ids, Matrix adjacency, NeighborLists neighbors)
    : ids_(std::move(ids)), adjacency_(std::move(adjacency)), neighbors_(std::move(neighbors)) {
  if (adjacency_.rows() != ids_.size() || adjacency_.cols() != ids_.size() || neighbors_.size() != ids_.size()) {
    throw DimensionError("SubjectGraph: inconsistent sizes for " + std::to_string(ids_.size()) + " subjects");
  }
}

std::vector<std::size_t> SubjectGraph::bfs_distances(std::size_t node) const {
  constexpr auto kUnreached = std::numeric_limits<std::size_t>::max();
  if (node >= size()) throw std::out_of_range("SubjectGraph: node out of range");
  std::vector<std::size_t> dist(size(), kUnreached);
  std::deque<std::size_t> queue{node};
  dist[node] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : neighbors_[u]) {
      if (dist[v] != kUnreached) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
  return dist;
}

std::vector<std::size_t> SubjectGraph::hop_neighbors(std::size_t node, std::size_t hops) const {
  const auto dist = bfs_distances(node);
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < dist.size(); ++v)
    if (dist[v] == hops) out.push_back(v);
  return out;
}

SubjectGraph build_subject_graph(const std::vector<const WeightedGraph*>& subjects, std::size_t k) {
  const std::size_t m = subjects.size();
  if (m < 2) throw std::invalid_argument("build_subject_graph: need at least 2 subjects, got " + std::to_string(m));
  const std::size_t n = subjects.front()->weights.rows();
  Matrix flat(m, n * subjects.front()->weights.cols());
  std::vector<std::string> ids;
  ids.reserve(m);
  for (std::size_t s = 0; s < m; ++s) {
    const Matrix& w = subjects[s]->weights;
    if (w.size() != flat.cols()) {
      throw DimensionError("build_subject_graph: subject '" + subjects[s]->id + "' has shape " + w.shape_string());
    }
    std::copy(w.values().begin(), w.values().end(), flat.row(s).begin());
    ids.push_back(subjects[s]->id);
  }
  NeighborLists edges = symmetrize(knn_neighbors(flat, k));
  return SubjectGraph(std::move(ids), build_adjacency(flat, k), std::move(edges));
}

SubjectGraph build_subject_graph(const std::vector<WeightedGraph>& subjects, std::size_t k) {
  std::vector<const WeightedGraph*> ptrs;
  ptrs.reserve(subjects.size());
  for (const auto& s : subjects) ptrs.push_back(&s);
  return build_subject_graph(ptrs, k);
}

}  // namespace bngnn
