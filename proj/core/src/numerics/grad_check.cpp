#include "bngnn/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bngnn {

namespace {

double evaluate(const ScalarGraph& f) {
  Tape tape(false);
  const Matrix& out = f(tape).value();
  if (out.size() != 1) throw DimensionError("grad_check: function must return a 1x1 value");
  if (!std::isfinite(out(0, 0))) throw std::domain_error("grad_check: non-finite function value");
  return out(0, 0);
}

}  // namespace

GradCheckReport grad_check(const ScalarGraph& f, std::span<Parameter* const> params, double h) {
  for (Parameter* p : params) p->zero_grad();
  {
    Tape tape(true);
    Var y = f(tape);
    tape.backward(y);
  }
  std::vector<Matrix> analytic;
  analytic.reserve(params.size());
  for (Parameter* p : params) analytic.push_back(p->grad);

  GradCheckReport report;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix& value = params[k]->value;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value.data()[i];
      value.data()[i] = saved + h;
      const double plus = evaluate(f);
      value.data()[i] = saved - h;
      const double minus = evaluate(f);
      value.data()[i] = saved;
      const double numeric = (plus - minus) / (2.0 * h);
      const double err = std::abs(analytic[k].data()[i] - numeric) / std::max(1.0, std::abs(numeric));
      ++report.entries_checked;
      if (err > report.max_relative_error) {
        report.max_relative_error = err;
        report.worst_parameter = k;
        report.worst_entry = i;
      }
    }
  }
  for (Parameter* p : params) p->zero_grad();
  return report;
}

}  // namespace bngnn
