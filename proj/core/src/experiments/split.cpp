#include "bngnn/experiments/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "bngnn/numerics/random.hpp"

namespace bngnn {

SplitIndices split_dataset(std::span<const int> labels, std::uint64_t seed, double train_ratio, double val_ratio) {
  if (labels.size() < 10) throw std::invalid_argument("split_dataset: need at least 10 instances");
  if (!(train_ratio > 0.0 && val_ratio > 0.0 && train_ratio + val_ratio < 1.0)) {
    throw std::invalid_argument("split_dataset: ratios must be positive and leave room for a test split");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  Rng rng = make_rng(seed, streams::kSplit);
  SplitIndices out;
  for (auto& [label, members] : by_class) {
    if (members.size() < 3) {
      throw std::invalid_argument("split_dataset: class " + std::to_string(label) + " has only " +
                                  std::to_string(members.size()) + " members");
    }
    std::shuffle(members.begin(), members.end(), rng);
    const double n = static_cast<double>(members.size());
    const double test_ratio = 1.0 - train_ratio - val_ratio;
    const auto n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * val_ratio)));
    const auto n_test = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * test_ratio)));
    if (n_val + n_test >= members.size()) throw std::invalid_argument("split_dataset: class too small to stratify");
    out.val.insert(out.val.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_val));
    out.test.insert(out.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_val),
                    members.begin() + static_cast<std::ptrdiff_t>(n_val + n_test));
    out.train.insert(out.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_val + n_test), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace bngnn
