#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "bngnn/numerics/matrix.hpp"
#include "bngnn/numerics/random.hpp"

namespace bngnn {

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  // Set when a backward pass reaches this parameter; Adam only updates touched ones.
  bool touched = false;

  Parameter() = default;
  Parameter(std::string n, Matrix v);
  void zero_grad();
};

class Tape;

class Var {
 public:
  Var() = default;
  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  std::size_t index() const noexcept { return index_; }
  Tape* tape() const noexcept { return tape_; }

 private:
  friend class Tape;
  Var(Tape* t, std::size_t i) : tape_(t), index_(i) {}
  Tape* tape_ = nullptr;
  std::size_t index_ = 0;
};

// Records operations in creation order; backward walks them in reverse, which is
// a valid reverse topological order because parents always precede children.
class Tape {
 public:
  using Backward = std::function<void(Tape&, const Matrix& out_grad)>;

  explicit Tape(bool record_gradients = true) : record_(record_gradients) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const noexcept { return record_; }

  Var constant(Matrix value);
  // Borrows the matrix; caller keeps it alive for the tape's lifetime.
  Var constant_view(const Matrix& value);
  Var parameter(Parameter& p);

  // Adds an op node. The backward rule is kept only if some parent needs a gradient.
  Var record(Matrix value, std::initializer_list<Var> parents, Backward backward);

  bool requires_grad(Var v) const;

  const Matrix& value(Var v) const;
  // Gradient accumulator of a node; only meaningful while recording.
  Matrix& grad_of(std::size_t index);

  // Seeds d(root)/d(root) = 1 and propagates; root must be 1×1 and finite.
  void backward(Var root);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Matrix owned;
    const Matrix* view = nullptr;
    Matrix grad;
    Backward backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
    const Matrix& value() const { return view ? *view : owned; }
  };
  Var push(Node node);

  bool record_;
  std::vector<Node> nodes_;
};

// Differentiable operations. All arguments must live on the same tape.
Var matmul(Var a, Var b);
// a·b with node-order-independent sums (see ordered_matmul); a is typically an
// adjacency or attention matrix, b node features.
Var aggregate(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var add_row(Var x, Var bias);  // bias 1×c broadcast over rows
Var scale(Var x, double s);
Var leaky_relu(Var x, double slope);
Var dropout(Var x, double rate, bool training, Rng& rng);
Var mean_rows(Var x);  // column mean, 1×c, node-order independent
Var sum_all(Var x);
Var mean_all(Var x);
Var square(Var x);
// Pairwise attention scores: out(i,j) = h_i·q[0:d] + h_j·q[d:2d], q is 1×2d.
Var attention_scores(Var h, Var q);
// Softmax over the nonzero entries of mask in each row; masked entries get 0.
Var masked_softmax_rows(Var x, const Matrix& mask);
Var row_max(Var x);                                  // r×1, first maximum wins
Var pick(Var x, std::span<const std::size_t> cols);  // r×1, x(i, cols[i])
// −log softmax(logits)[label] for a 1×C row.
Var softmax_cross_entropy(Var logits, std::size_t label);

}  // namespace bngnn
