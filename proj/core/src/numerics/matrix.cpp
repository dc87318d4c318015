#include "bngnn/numerics/matrix.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

namespace bngnn {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

ConstMap view(const Matrix& m) { return ConstMap(m.data(), m.rows(), m.cols()); }
MutMap view(Matrix& m) { return MutMap(m.data(), m.rows(), m.cols()); }

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + a.shape_string() + " and " +
                       b.shape_string());
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("Matrix: " + std::to_string(data_.size()) + " values for shape " +
                         shape_string());
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer list");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::row_vector(std::span<const double> values) {
  return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::column_vector(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

std::string Matrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  Matrix out(a.rows(), b.cols());
  if (a.cols() == 0) return out;
  view(out).noalias() = view(a) * view(b);
  return out;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) shape_error("matmul_at_b", a, b);
  Matrix out(a.cols(), b.cols());
  if (a.rows() == 0) return out;
  view(out).noalias() = view(a).transpose() * view(b);
  return out;
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) shape_error("matmul_a_bt", a, b);
  Matrix out(a.rows(), b.rows());
  if (a.cols() == 0) return out;
  view(out).noalias() = view(a) * view(b).transpose();
  return out;
}

void add_in_place(Matrix& target, const Matrix& addend) {
  require_same_shape(target, addend, "add_in_place");
  double* t = target.data();
  const double* s = addend.data();
  for (std::size_t i = 0; i < target.size(); ++i) t[i] += s[i];
}

Matrix leaky_relu(const Matrix& x, double slope) {
  if (!(slope >= 0.0 && slope < 1.0)) throw std::invalid_argument("leaky_relu: slope must be in [0,1)");
  Matrix out = x;
  for (double& v : out.values())
    if (v < 0.0) v *= slope;
  return out;
}

Matrix softmax_rows(const Matrix& x, const Matrix* mask) {
  if (mask != nullptr) require_same_shape(x, *mask, "softmax_rows");
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (mask && (*mask)(r, c) == 0.0) continue;
      best = std::max(best, x(r, c));
      any = true;
    }
    if (!any) throw std::invalid_argument("softmax_rows: row " + std::to_string(r) + " is fully masked");
    std::vector<double> terms;
    terms.reserve(x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (mask && (*mask)(r, c) == 0.0) continue;
      const double e = std::exp(x(r, c) - best);
      out(r, c) = e;
      terms.push_back(e);
    }
    const double total = ordered_sum(terms);
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) /= total;
  }
  return out;
}

double ordered_sum(std::span<double> terms) {
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

Matrix ordered_matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) shape_error("ordered_matmul", a, b);
  Matrix out(a.rows(), b.cols());
  std::vector<std::size_t> support;
  // One order per row, keyed by (a(i,j), row j of b): relabeling j permutes
  // the keys but not their sorted sequence, and exact ties have equal terms.
  auto before = [&](std::size_t i, std::size_t j, std::size_t k) {
    if (a(i, j) != a(i, k)) return a(i, j) < a(i, k);
    const auto rj = b.row(j), rk = b.row(k);
    return std::lexicographical_compare(rj.begin(), rj.end(), rk.begin(), rk.end());
  };
  for (std::size_t i = 0; i < a.rows(); ++i) {
    support.clear();
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) support.push_back(j);
    std::sort(support.begin(), support.end(), [&](std::size_t j, std::size_t k) { return before(i, j, k); });
    for (std::size_t c = 0; c < b.cols(); ++c) {
      double total = 0.0;
      for (std::size_t j : support) total += a(i, j) * b(j, c);
      out(i, c) = total;
    }
  }
  return out;
}

bool all_finite(const Matrix& m) noexcept {
  return std::all_of(m.values().begin(), m.values().end(), [](double v) { return std::isfinite(v); });
}

void require_finite(const Matrix& m, const char* what) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m.data()[i])) {
      throw std::domain_error(std::string(what) + ": non-finite entry at (" +
                              std::to_string(i / std::max<std::size_t>(1, m.cols())) + ", " +
                              std::to_string(i % std::max<std::size_t>(1, m.cols())) + ")");
    }
  }
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) shape_error(op, a, b);
}

}  // namespace bngnn
