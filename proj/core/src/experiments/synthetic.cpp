#include "bngnn/experiments/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "bngnn/numerics/random.hpp"

namespace bngnn {

namespace {

double random_sign(Rng& rng) { return uniform01(rng) < 0.5 ? -1.0 : 1.0; }

Matrix make_instance(const SyntheticSpec& spec, std::size_t depth, int cls, Rng& rng) {
  const std::size_t n = spec.n;
  const std::size_t col_a = n - 3;
  const std::size_t col_b = n - 2;
  const std::size_t col_c = n - 1;
  const double lab = cls == 0 ? 1.0 : -1.0;

  // Gaussian bumps over n−3 evenly spaced anchors make each row closest to its
  // positional neighbours, so k=2 KNN yields a line.
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < col_a; ++a) {
      const double anchor = static_cast<double>(a) * static_cast<double>(n - 1) / static_cast<double>(col_a - 1);
      const double diff = static_cast<double>(i) - anchor;
      w(i, a) = spec.structure_scale * std::exp(-diff * diff / 2.0) + spec.background;
    }
  }
  const double sign_c = depth == 1 ? lab : random_sign(rng);
  const double product = depth == 1 ? -lab : lab;
  for (std::size_t q = 0; q < n; q += 8) {
    if (q + 4 < n) {
      const double alpha = random_sign(rng);
      w(q + 1, col_a) += spec.amplitude * alpha;
      w(q + 4, col_b) += spec.amplitude * alpha * product;
    }
    for (std::size_t c : {q + 6, q + 7})
      if (c < n) w(c, col_c) += spec.amplitude * sign_c;
  }
  if (spec.noise > 0.0) {
    std::normal_distribution<double> gauss(0.0, spec.noise);
    for (double& v : w.values()) v += gauss(rng);
  }
  if (depth == 2) {
    const auto order = two_hop_row_order(n);
    Matrix shuffled(n, n);
    for (std::size_t r = 0; r < n; ++r) std::copy(w.row(order[r]).begin(), w.row(order[r]).end(), shuffled.row(r).begin());
    w = std::move(shuffled);
  }
  return w;
}

}  // namespace

std::vector<std::size_t> two_hop_row_order(std::size_t n) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; i += 2) order.push_back(i);
  for (std::size_t i = 1; i < n; i += 2) order.push_back(i);
  return order;
}

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.m < 20) throw std::invalid_argument("generate_synthetic: m must be at least 20");
  if (spec.n < 10) throw std::invalid_argument("generate_synthetic: n must be at least 10 to place the signal");
  if (!(spec.two_hop_fraction >= 0.0 && spec.two_hop_fraction <= 1.0)) {
    throw std::invalid_argument("generate_synthetic: two-hop fraction must be in [0,1]");
  }
  if (!(spec.noise >= 0.0)) throw std::invalid_argument("generate_synthetic: noise must be nonnegative");

  const auto n_two = static_cast<std::size_t>(std::llround(spec.two_hop_fraction * static_cast<double>(spec.m)));
  struct Slot {
    std::size_t depth;
    int label;
  };
  std::vector<Slot> slots;
  slots.reserve(spec.m);
  for (std::size_t i = 0; i < spec.m; ++i) slots.push_back(Slot{i < n_two ? 2u : 1u, static_cast<int>(i % 2)});

  Rng rng = make_rng(spec.seed, streams::kSynthetic);
  std::shuffle(slots.begin(), slots.end(), rng);

  SyntheticDataset out;
  out.graphs.reserve(spec.m);
  for (std::size_t i = 0; i < spec.m; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "syn%05zu", i);
    out.graphs.push_back(WeightedGraph{id, make_instance(spec, slots[i].depth, slots[i].label, rng), slots[i].label});
    out.optimal_depth.push_back(slots[i].depth);
  }
  return out;
}

}  // namespace bngnn
