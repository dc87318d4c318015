#pragma once

#include <cstdint>
#include <vector>

#include "bngnn/netbuild/graph.hpp"

namespace bngnn {

// Instances whose class is visible either to one aggregation hop (depth 1) or
// only to a nonlinear combination of nodes three hops apart on the KNN line
// skeleton (depth 2). Depth-2 instances carry their rows in a fixed shuffled
// order: the GNN is blind to row order, the adjacency state is not.
struct SyntheticSpec {
  std::size_t m = 200;
  std::size_t n = 30;
  double two_hop_fraction = 0.5;
  double noise = 0.015;
  double amplitude = 0.5;
  double structure_scale = 0.5;
  double background = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticDataset {
  std::vector<WeightedGraph> graphs;
  std::vector<std::size_t> optimal_depth;  // parallel to graphs
};

SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

// Row order applied to depth-2 instances: even positions, then odd.
std::vector<std::size_t> two_hop_row_order(std::size_t n);

}  // namespace bngnn
