#pragma once

#include <functional>
#include <span>

#include "bngnn/numerics/autodiff.hpp"

namespace bngnn {

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t worst_parameter = 0;
  std::size_t worst_entry = 0;
  std::size_t entries_checked = 0;
};

using ScalarGraph = std::function<Var(Tape&)>;

// Compares reverse-mode gradients with central differences (step h); error per
// entry is |analytic − numeric| / max(1, |numeric|).
GradCheckReport grad_check(const ScalarGraph& f, std::span<Parameter* const> params,
                           double h = 1e-6);

}  // namespace bngnn
