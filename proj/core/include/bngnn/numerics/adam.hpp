#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bngnn/numerics/autodiff.hpp"

namespace bngnn {

struct AdamOptions {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Each parameter slot keeps its own step counter and
// only advances when the parameter was touched by the preceding backward pass,
// so parameters outside a truncated forward are left exactly as they were.
class Adam {
 public:
  struct Slot {
    Matrix m;
    Matrix v;
    std::uint64_t steps = 0;
  };

  Adam(AdamOptions options, std::span<Parameter* const> params);

  // Applies one update to every touched parameter, then clears grads and flags.
  void step();
  void zero_grad();

  const AdamOptions& options() const noexcept { return options_; }
  const std::vector<Slot>& slots() const noexcept { return slots_; }
  std::vector<Slot>& slots() noexcept { return slots_; }
  std::span<Parameter* const> params() const noexcept { return params_; }

 private:
  AdamOptions options_;
  std::vector<Parameter*> params_;
  std::vector<Slot> slots_;
};

}  // namespace bngnn
