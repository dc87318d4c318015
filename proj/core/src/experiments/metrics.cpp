#include "bngnn/experiments/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace bngnn {

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auc: scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Ranks are 1-based; a tie group spanning ranks [lo, hi] gets (lo+hi)/2. Twice
  // the rank is an integer, so the sums below are exact.
  double twice_rank_sum_pos = 0.0;
  double n_pos = 0.0;
  double n_neg = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double twice_rank = static_cast<double>(i + 1 + j + 1);
    for (std::size_t t = i; t <= j; ++t) {
      const int y = labels[order[t]];
      if (y == 1) {
        twice_rank_sum_pos += twice_rank;
        n_pos += 1.0;
      } else if (y == 0) {
        n_neg += 1.0;
      } else {
        throw std::invalid_argument("auc: labels must be 0 or 1");
      }
    }
    i = j + 1;
  }
  if (n_pos == 0.0 || n_neg == 0.0) throw std::invalid_argument("auc: both classes must be present");
  // Numerator counts pairs in halves: 2·U = 2·R_pos − n_pos(n_pos+1).
  const double twice_u = twice_rank_sum_pos - n_pos * (n_pos + 1.0);
  return twice_u / (2.0 * n_pos * n_neg);
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_std: no values");
  MeanStd out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(values.size()));
  return out;
}

std::string format_mean_std(const MeanStd& v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f±%.*f", decimals, v.mean, decimals, v.std);
  return buf;
}

}  // namespace bngnn
