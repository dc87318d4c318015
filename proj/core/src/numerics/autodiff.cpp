#include "bngnn/numerics/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bngnn {

Parameter::Parameter(std::string n, Matrix v)
    : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}

void Parameter::zero_grad() {
  if (!grad.same_shape(value)) grad = Matrix(value.rows(), value.cols());
  else grad.fill(0.0);
  touched = false;
}

const Matrix& Var::value() const {
  if (tape_ == nullptr) throw std::logic_error("Var: not attached to a tape");
  return tape_->value(*this);
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Matrix value) {
  Node n;
  n.owned = std::move(value);
  return push(std::move(n));
}

Var Tape::constant_view(const Matrix& value) {
  Node n;
  n.view = &value;
  return push(std::move(n));
}

Var Tape::parameter(Parameter& p) {
  Node n;
  n.view = &p.value;
  n.param = &p;
  n.requires_grad = record_;
  return push(std::move(n));
}

Var Tape::record(Matrix value, std::initializer_list<Var> parents, Backward backward) {
  Node n;
  n.owned = std::move(value);
  if (record_) {
    for (Var p : parents) {
      if (p.tape_ != this) throw std::logic_error("Tape: operands live on different tapes");
      n.requires_grad = n.requires_grad || nodes_[p.index_].requires_grad;
    }
    if (n.requires_grad) n.backward = std::move(backward);
  }
  return push(std::move(n));
}

bool Tape::requires_grad(Var v) const { return nodes_[v.index_].requires_grad; }

const Matrix& Tape::value(Var v) const { return nodes_[v.index_].value(); }

Matrix& Tape::grad_of(std::size_t index) {
  Node& n = nodes_[index];
  if (n.grad.empty() && !n.value().empty()) n.grad = Matrix(n.value().rows(), n.value().cols());
  return n.grad;
}

void Tape::backward(Var root) {
  if (!record_) throw std::logic_error("Tape::backward on a non-recording tape");
  const Matrix& out = value(root);
  if (out.rows() != 1 || out.cols() != 1) {
    throw DimensionError("Tape::backward: root must be 1x1, got " + out.shape_string());
  }
  if (!std::isfinite(out(0, 0))) throw std::domain_error("Tape::backward: non-finite loss");
  grad_of(root.index_)(0, 0) = 1.0;
  for (std::size_t i = root.index_ + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty()) continue;
    if (n.backward) {
      // grad_of only allocates inside existing nodes, so n.grad stays valid.
      n.backward(*this, n.grad);
    } else if (n.param != nullptr) {
      Parameter& p = *n.param;
      if (!p.grad.same_shape(p.value)) p.grad = Matrix(p.value.rows(), p.value.cols());
      add_in_place(p.grad, n.grad);
      p.touched = true;
    }
  }
}

namespace {

Tape& tape_of(Var a) {
  if (a.tape() == nullptr) throw std::logic_error("op on detached Var");
  return *a.tape();
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a);
  return t.record(matmul(a.value(), b.value()), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) add_in_place(tp.grad_of(a.index()), matmul_a_bt(g, b.value()));
    if (tp.requires_grad(b)) add_in_place(tp.grad_of(b.index()), matmul_at_b(a.value(), g));
  });
}

Var aggregate(Var a, Var b) {
  Tape& t = tape_of(a);
  return t.record(ordered_matmul(a.value(), b.value()), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) add_in_place(tp.grad_of(a.index()), matmul_a_bt(g, b.value()));
    if (tp.requires_grad(b)) add_in_place(tp.grad_of(b.index()), matmul_at_b(a.value(), g));
  });
}

Var add(Var a, Var b) {
  Tape& t = tape_of(a);
  require_same_shape(a.value(), b.value(), "add");
  Matrix out = a.value();
  add_in_place(out, b.value());
  return t.record(std::move(out), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) add_in_place(tp.grad_of(a.index()), g);
    if (tp.requires_grad(b)) add_in_place(tp.grad_of(b.index()), g);
  });
}

Var sub(Var a, Var b) {
  Tape& t = tape_of(a);
  require_same_shape(a.value(), b.value(), "sub");
  Matrix out = a.value();
  const Matrix& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= bv.data()[i];
  return t.record(std::move(out), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) add_in_place(tp.grad_of(a.index()), g);
    if (tp.requires_grad(b)) {
      Matrix& gb = tp.grad_of(b.index());
      for (std::size_t i = 0; i < g.size(); ++i) gb.data()[i] -= g.data()[i];
    }
  });
}

Var add_row(Var x, Var bias) {
  Tape& t = tape_of(x);
  const Matrix& xv = x.value();
  const Matrix& bv = bias.value();
  if (bv.rows() != 1 || bv.cols() != xv.cols()) {
    throw DimensionError("add_row: bias " + bv.shape_string() + " does not fit " + xv.shape_string());
  }
  Matrix out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += bv(0, c);
  return t.record(std::move(out), {x, bias}, [x, bias](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(x)) add_in_place(tp.grad_of(x.index()), g);
    if (tp.requires_grad(bias)) {
      Matrix& gb = tp.grad_of(bias.index());
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) gb(0, c) += g(r, c);
    }
  });
}

Var scale(Var x, double s) {
  Tape& t = tape_of(x);
  Matrix out = x.value();
  for (double& v : out.values()) v *= s;
  return t.record(std::move(out), {x}, [x, s](Tape& tp, const Matrix& g) {
    Matrix& gx = tp.grad_of(x.index());
    for (std::size_t i = 0; i < g.size(); ++i) gx.data()[i] += s * g.data()[i];
  });
}

Var leaky_relu(Var x, double slope) {
  Tape& t = tape_of(x);
  return t.record(leaky_relu(x.value(), slope), {x}, [x, slope](Tape& tp, const Matrix& g) {
    const Matrix& xv = x.value();
    Matrix& gx = tp.grad_of(x.index());
    for (std::size_t i = 0; i < g.size(); ++i)
      gx.data()[i] += (xv.data()[i] >= 0.0 ? 1.0 : slope) * g.data()[i];
  });
}

Var dropout(Var x, double rate, bool training, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout: rate must be in [0,1)");
  if (!training || rate == 0.0) return x;
  Tape& t = tape_of(x);
  const double keep_scale = 1.0 / (1.0 - rate);
  Matrix mask(x.rows(), x.cols());
  Matrix out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double m = uniform01(rng) < rate ? 0.0 : keep_scale;
    mask.data()[i] = m;
    out.data()[i] *= m;
  }
  return t.record(std::move(out), {x}, [x, mask = std::move(mask)](Tape& tp, const Matrix& g) {
    Matrix& gx = tp.grad_of(x.index());
    for (std::size_t i = 0; i < g.size(); ++i) gx.data()[i] += mask.data()[i] * g.data()[i];
  });
}

Var mean_rows(Var x) {
  Tape& t = tape_of(x);
  const Matrix& xv = x.value();
  if (xv.rows() == 0) throw DimensionError("mean_rows: empty input");
  Matrix out(1, xv.cols());
  const double inv = 1.0 / static_cast<double>(xv.rows());
  std::vector<double> column(xv.rows());
  for (std::size_t c = 0; c < xv.cols(); ++c) {
    for (std::size_t r = 0; r < xv.rows(); ++r) column[r] = xv(r, c);
    out(0, c) = ordered_sum(column) / static_cast<double>(xv.rows());
  }
  return t.record(std::move(out), {x}, [x, inv](Tape& tp, const Matrix& g) {
    Matrix& gx = tp.grad_of(x.index());
    for (std::size_t r = 0; r < gx.rows(); ++r)
      for (std::size_t c = 0; c < gx.cols(); ++c) gx(r, c) += g(0, c) * inv;
  });
}

Var sum_all(Var x) {
  Tape& t = tape_of(x);
  double total = 0.0;
  for (double v : x.value().values()) total += v;
  return t.record(Matrix(1, 1, total), {x}, [x](Tape& tp, const Matrix& g) {
    Matrix& gx = tp.grad_of(x.index());
    for (double& v : gx.values()) v += g(0, 0);
  });
}

Var mean_all(Var x) {
  const std::size_t n = x.value().size();
  if (n == 0) throw DimensionError("mean_all: empty input");
  return scale(sum_all(x), 1.0 / static_cast<double>(n));
}

Var square(Var x) {
  Tape& t = tape_of(x);
  Matrix out = x.value();
  for (double& v : out.values()) v *= v;
  return t.record(std::move(out), {x}, [x](Tape& tp, const Matrix& g) {
    const Matrix& xv = x.value();
    Matrix& gx = tp.grad_of(x.index());
    for (std::size_t i = 0; i < g.size(); ++i) gx.data()[i] += 2.0 * xv.data()[i] * g.data()[i];
  });
}

Var attention_scores(Var h, Var q) {
  Tape& t = tape_of(h);
  const Matrix& hv = h.value();
  const Matrix& qv = q.value();
  const std::size_t n = hv.rows();
  const std::size_t d = hv.cols();
  if (qv.rows() != 1 || qv.cols() != 2 * d) {
    throw DimensionError("attention_scores: q " + qv.shape_string() + " does not fit features " +
                         hv.shape_string());
  }
  std::vector<double> src(n, 0.0), dst(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      src[i] += hv(i, c) * qv(0, c);
      dst[i] += hv(i, c) * qv(0, d + c);
    }
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = src[i] + dst[j];
  return t.record(std::move(out), {h, q}, [h, q, n, d](Tape& tp, const Matrix& g) {
    std::vector<double> g_src(n, 0.0), g_dst(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        g_src[i] += g(i, j);
        g_dst[j] += g(i, j);
      }
    }
    const Matrix& hv = h.value();
    const Matrix& qv = q.value();
    if (tp.requires_grad(h)) {
      Matrix& gh = tp.grad_of(h.index());
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) gh(i, c) += g_src[i] * qv(0, c) + g_dst[i] * qv(0, d + c);
    }
    if (tp.requires_grad(q)) {
      Matrix& gq = tp.grad_of(q.index());
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < d; ++c) {
          gq(0, c) += g_src[i] * hv(i, c);
          gq(0, d + c) += g_dst[i] * hv(i, c);
        }
      }
    }
  });
}

Var masked_softmax_rows(Var x, const Matrix& mask) {
  Tape& t = tape_of(x);
  Matrix y = softmax_rows(x.value(), &mask);
  Matrix y_copy = y;
  return t.record(std::move(y), {x}, [x, y = std::move(y_copy)](Tape& tp, const Matrix& g) {
    Matrix& gx = tp.grad_of(x.index());
    for (std::size_t r = 0; r < y.rows(); ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < y.cols(); ++c) dot += y(r, c) * g(r, c);
      for (std::size_t c = 0; c < y.cols(); ++c) gx(r, c) += y(r, c) * (g(r, c) - dot);
    }
  });
}

Var row_max(Var x) {
  Tape& t = tape_of(x);
  const Matrix& xv = x.value();
  if (xv.cols() == 0) throw DimensionError("row_max: no columns");
  std::vector<std::size_t> arg(xv.rows(), 0);
  Matrix out(xv.rows(), 1);
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    for (std::size_t c = 1; c < xv.cols(); ++c)
      if (xv(r, c) > xv(r, arg[r])) arg[r] = c;
    out(r, 0) = xv(r, arg[r]);
  }
  return t.record(std::move(out), {x}, [x, arg = std::move(arg)](Tape& tp, const Matrix& g) {
    Matrix& gx = tp.grad_of(x.index());
    for (std::size_t r = 0; r < arg.size(); ++r) gx(r, arg[r]) += g(r, 0);
  });
}

Var pick(Var x, std::span<const std::size_t> cols) {
  Tape& t = tape_of(x);
  const Matrix& xv = x.value();
  if (cols.size() != xv.rows()) throw DimensionError("pick: one column index per row required");
  std::vector<std::size_t> idx(cols.begin(), cols.end());
  Matrix out(xv.rows(), 1);
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    if (idx[r] >= xv.cols()) throw std::out_of_range("pick: column index out of range");
    out(r, 0) = xv(r, idx[r]);
  }
  return t.record(std::move(out), {x}, [x, idx = std::move(idx)](Tape& tp, const Matrix& g) {
    Matrix& gx = tp.grad_of(x.index());
    for (std::size_t r = 0; r < idx.size(); ++r) gx(r, idx[r]) += g(r, 0);
  });
}

Var softmax_cross_entropy(Var logits, std::size_t label) {
  Tape& t = tape_of(logits);
  const Matrix& z = logits.value();
  if (z.rows() != 1) throw DimensionError("softmax_cross_entropy: logits must be a row, got " + z.shape_string());
  if (label >= z.cols()) throw std::out_of_range("softmax_cross_entropy: label out of range");
  Matrix p = softmax_rows(z);
  double best = z(0, 0);
  for (double v : z.values()) best = std::max(best, v);
  double total = 0.0;
  for (double v : z.values()) total += std::exp(v - best);
  const double loss = best + std::log(total) - z(0, label);
  return t.record(Matrix(1, 1, loss), {logits}, [logits, label, p = std::move(p)](Tape& tp, const Matrix& g) {
    Matrix& gz = tp.grad_of(logits.index());
    for (std::size_t c = 0; c < p.cols(); ++c)
      gz(0, c) += g(0, 0) * (p(0, c) - (c == label ? 1.0 : 0.0));
  });
}

}  // namespace bngnn
