#include "bngnn/numerics/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace bngnn {

Adam::Adam(AdamOptions options, std::span<Parameter* const> params)
    : options_(options), params_(params.begin(), params.end()) {
  if (!(options_.learning_rate > 0.0)) throw std::invalid_argument("Adam: learning rate must be positive");
  slots_.reserve(params_.size());
  for (Parameter* p : params_) {
    slots_.push_back(Slot{Matrix(p->value.rows(), p->value.cols()),
                          Matrix(p->value.rows(), p->value.cols()), 0});
  }
}

void Adam::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

void Adam::step() {
  // Validate everything first so a rejected step leaves all parameters untouched.
  for (Parameter* p : params_) {
    if (!p->touched) continue;
    require_same_shape(p->value, p->grad, "Adam::step");
    for (double g : p->grad.values()) {
      if (!std::isfinite(g)) throw std::domain_error("Adam: non-finite gradient in parameter " + p->name);
    }
  }
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Parameter& p = *params_[k];
    if (!p.touched) continue;
    Slot& s = slots_[k];
    ++s.steps;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(s.steps));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(s.steps));
    double* w = p.value.data();
    const double* g = p.grad.data();
    double* m = s.m.data();
    double* v = s.v.data();
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      w[i] -= options_.learning_rate * m_hat / (std::sqrt(v_hat) + options_.epsilon);
    }
  }
  zero_grad();
}

}  // namespace bngnn
