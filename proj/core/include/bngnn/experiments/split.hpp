#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bngnn {

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

// Stratified train/val/test partition by ratio; each split sorted ascending.
SplitIndices split_dataset(std::span<const int> labels, std::uint64_t seed, double train_ratio = 0.8,
                           double val_ratio = 0.1);

}  // namespace bngnn
