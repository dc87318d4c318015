#include <cmath>
#include <fstream>
#include <sstream>

#include "bngnn/gnn/model.hpp"
#include "bngnn/numerics/adam.hpp"
#include "bngnn/numerics/grad_check.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace bngnn;
using bngnn::testing::max_abs_diff;
using bngnn::testing::naive_matmul;
using bngnn::testing::random_matrix;

namespace {

GnnModel make_model(GnnKind kind, std::size_t n, std::size_t depth, std::size_t dim, bool residual = false,
                    std::uint64_t seed = 1) {
  GnnConfig c;
  c.kind = kind;
  c.input_dim = n;
  c.max_depth = depth;
  c.hidden_dim = dim;
  c.residual = residual;
  c.seed = seed;
  return GnnModel(c);
}

BuiltGraph random_graph(std::size_t n, std::mt19937_64& rng, int label = 0) {
  return build_graph(bngnn::testing::random_weighted_graph(n, rng, label), 2);
}

Matrix leaky(const Matrix& x) { return leaky_relu(x, 0.2); }

// Plain-matrix GAT layer written from the attention formula.
Matrix gat_oracle(const Matrix& x, const Matrix& t, const Matrix& q, const Matrix& mask) {
  const Matrix h = naive_matmul(x, t);
  const std::size_t n = h.rows(), d = h.cols();
  Matrix out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> score(n, 0.0);
    double mx = -INFINITY;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask(i, j) == 0.0) continue;
      double c = 0.0;
      for (std::size_t k = 0; k < d; ++k) c += h(i, k) * q(0, k) + h(j, k) * q(0, d + k);
      score[j] = c > 0 ? c : 0.2 * c;
      mx = std::max(mx, score[j]);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (mask(i, j) != 0.0) z += std::exp(score[j] - mx);
    for (std::size_t j = 0; j < n; ++j) {
      if (mask(i, j) == 0.0) continue;
      const double a = std::exp(score[j] - mx) / z;
      for (std::size_t k = 0; k < d; ++k) out(i, k) += a * h(j, k);
    }
  }
  return leaky(out);
}

Matrix features(GnnModel& m, const BuiltGraph& g, std::size_t depth) {
  Tape t(false);
  return m.node_features(t, g, depth).value();
}

Matrix logits(GnnModel& m, const BuiltGraph& g, std::size_t depth) {
  Tape t(false);
  return m.logits(t, g, depth).value();
}

}  // namespace

TEST_SUITE("gcn") {
  TEST_CASE("identity transform on the two-node graph") {
    GnnModel m = make_model(GnnKind::Gcn, 2, 1, 2);
    m.layer(1).transform.value = Matrix::identity(2);
    BuiltGraph g;
    g.features = Matrix::identity(2);
    g.aggregation = Matrix{{0.5, 0.5}, {0.5, 0.5}};
    CHECK(features(m, g, 1) == (Matrix{{0.5, 0.5}, {0.5, 0.5}}));
    m.layer(1).transform.value.fill(0.0);
    CHECK(features(m, g, 1) == Matrix(2, 2, 0.0));
  }

  TEST_CASE("depth 3 equals the hand-unrolled recursion") {
    std::mt19937_64 rng(5);
    const BuiltGraph g = random_graph(5, rng);
    GnnModel m = make_model(GnnKind::Gcn, 5, 3, 4);
    Matrix x = g.features;
    for (std::size_t l = 1; l <= 3; ++l) {
      x = leaky(naive_matmul(g.normalized, naive_matmul(x, m.layer(l).transform.value)));
      CHECK(max_abs_diff(features(m, g, l), x) < 1e-12);
    }
    CHECK_THROWS_AS(features(m, g, 0), std::out_of_range);
    CHECK_THROWS_AS(features(m, g, 4), std::out_of_range);
  }

  TEST_CASE("residual adds the layer input from layer 2 on") {
    std::mt19937_64 rng(6);
    const BuiltGraph g = random_graph(6, rng);
    GnnModel skip = make_model(GnnKind::Gcn, 6, 3, 4, true);
    GnnModel plain = make_model(GnnKind::Gcn, 6, 3, 4, false);
    const Matrix f1 = features(plain, g, 1);
    CHECK(features(skip, g, 1) == f1);
    const Matrix h2 = leaky(naive_matmul(g.normalized, naive_matmul(f1, skip.layer(2).transform.value)));
    Matrix expect = h2;
    add_in_place(expect, f1);
    CHECK(max_abs_diff(features(skip, g, 2), expect) < 1e-12);

    skip.layer(2).transform.value.fill(0.0);
    skip.layer(3).transform.value.fill(0.0);
    CHECK(features(skip, g, 3) == f1);
  }
}

TEST_SUITE("gat") {
  TEST_CASE("matches the attention formula") {
    std::mt19937_64 rng(7);
    const BuiltGraph g = random_graph(6, rng);
    GnnModel m = make_model(GnnKind::Gat, 6, 2, 4);
    const Matrix l1 = gat_oracle(g.features, m.layer(1).transform.value, m.layer(1).attention.value, g.attention_mask);
    CHECK(max_abs_diff(features(m, g, 1), l1) < 1e-12);
    const Matrix l2 = gat_oracle(l1, m.layer(2).transform.value, m.layer(2).attention.value, g.attention_mask);
    CHECK(max_abs_diff(features(m, g, 2), l2) < 1e-12);
  }

  TEST_CASE("singleton neighbourhood and zero attention vector") {
    GnnModel m = make_model(GnnKind::Gat, 3, 1, 3);
    std::mt19937_64 rng(8);
    BuiltGraph g;
    g.features = random_matrix(3, 3, rng);
    g.attention_mask = Matrix::identity(3);
    CHECK(max_abs_diff(features(m, g, 1), leaky(naive_matmul(g.features, m.layer(1).transform.value))) < 1e-15);

    g.attention_mask = Matrix{{1, 1, 0}, {1, 1, 1}, {0, 1, 1}};
    m.layer(1).attention.value.fill(0.0);
    const Matrix h = naive_matmul(g.features, m.layer(1).transform.value);
    Matrix mean(3, 3);
    for (std::size_t i = 0; i < 3; ++i) {
      double cnt = 0;
      for (std::size_t j = 0; j < 3; ++j)
        if (g.attention_mask(i, j) != 0.0) {
          cnt += 1;
          for (std::size_t k = 0; k < 3; ++k) mean(i, k) += h(j, k);
        }
      for (std::size_t k = 0; k < 3; ++k) mean(i, k) /= cnt;
    }
    CHECK(max_abs_diff(features(m, g, 1), leaky(mean)) < 1e-14);
  }

  TEST_CASE("attention rows are distributions over the mask") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
      const BuiltGraph g = random_graph(10, rng);
      GnnModel m = make_model(GnnKind::Gat, 10, 1, 8, false, trial);
      Tape t(false);
      Var alpha;
      gat_layer(t.constant(g.features), t.parameter(m.layer(1).transform), t.parameter(m.layer(1).attention),
                g.attention_mask, 0.2, &alpha);
      for (std::size_t i = 0; i < 10; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 10; ++j) {
          const double a = alpha.value()(i, j);
          CHECK(a >= 0.0);
          if (g.attention_mask(i, j) == 0.0) CHECK(a == 0.0);
          s += a;
        }
        CHECK(std::abs(s - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_SUITE("pooling and head") {
  TEST_CASE("mean pooling") {
    Tape t(false);
    CHECK(mean_rows(t.constant(Matrix{{1, 3}, {3, 5}})).value() == (Matrix{{2, 4}}));
    CHECK(mean_rows(t.constant(Matrix{{7, -1}})).value() == (Matrix{{7, -1}}));
    std::mt19937_64 rng(10);
    const Matrix f = random_matrix(9, 4, rng);
    const Matrix e = mean_rows(t.constant(f)).value();
    for (std::size_t c = 0; c < 4; ++c) {
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t r = 0; r < 9; ++r) {
        lo = std::min(lo, f(r, c));
        hi = std::max(hi, f(r, c));
      }
      CHECK(e(0, c) >= lo);
      CHECK(e(0, c) <= hi);
    }
    const auto perm = bngnn::testing::random_permutation(9, rng);
    CHECK(mean_rows(t.constant(bngnn::testing::permute_rows(f, perm))).value() == e);
  }

  TEST_CASE("cross entropy values") {
    Tape t(false);
    CHECK(softmax_cross_entropy(t.constant(Matrix{{0, 0}}), 0).value()(0, 0) == doctest::Approx(std::log(2.0)));
    CHECK(softmax_cross_entropy(t.constant(Matrix{{0, 0}}), 1).value()(0, 0) == doctest::Approx(std::log(2.0)));
    const double saturated = softmax_cross_entropy(t.constant(Matrix{{10, -10}}), 0).value()(0, 0);
    CHECK(saturated == doctest::Approx(std::log1p(std::exp(-20.0))).epsilon(1e-6));
    CHECK(saturated < 3e-9);
  }

  TEST_CASE("prediction") {
    const Prediction p = predict_from_logits(Matrix{{3, 1}});
    CHECK(p.label == 0);
    CHECK(p.probabilities[0] == doctest::Approx(0.8808).epsilon(1e-4));
    CHECK(p.probabilities[1] == doctest::Approx(0.1192).epsilon(1e-3));
    CHECK(predict_from_logits(Matrix{{2, 2}}).label == 0);
    CHECK(predict_from_logits(Matrix{{-1, 4}}).label == 1);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
      const Prediction q = predict_from_logits(random_matrix(1, 2, rng, -30, 30));
      CHECK(std::abs(q.probabilities[0] + q.probabilities[1] - 1.0) <= 1e-12);
    }
  }
}

TEST_SUITE("gradients") {
  TEST_CASE("model losses pass finite differences") {
    std::mt19937_64 rng(12);
    for (GnnKind kind : {GnnKind::Gcn, GnnKind::Gat}) {
      for (bool residual : {false, true}) {
        const BuiltGraph g = random_graph(6, rng, 1);
        GnnModel m = make_model(kind, 6, 3, 4, residual, 3);
        const std::size_t max_depth = kind == GnnKind::Gat ? 2 : 3;
        for (std::size_t depth = 1; depth <= max_depth; ++depth) {
          auto params = m.parameters();
          const auto report = grad_check([&](Tape& t) { return m.loss(t, g, depth); }, params);
          CHECK(report.max_relative_error <= 1e-4);
        }
      }
    }
  }
}

TEST_SUITE("depth sharing") {
  TEST_CASE("a step at depth j leaves deeper layers untouched") {
    std::mt19937_64 rng(13);
    const BuiltGraph g = random_graph(6, rng, 1);
    for (GnnKind kind : {GnnKind::Gcn, GnnKind::Gat}) {
      GnnModel m = make_model(kind, 6, 3, 4);
      const GnnModel before = m;
      auto params = m.parameters();
      Adam adam(AdamOptions{0.01}, params);
      Rng drop = make_rng(1, streams::kGnnDropout);
      for (int i = 0; i < 5; ++i) {
        Tape t;
        t.backward(m.loss(t, g, 2, true, &drop));
        adam.step();
      }
      GnnModel copy = before;
      CHECK(m.layer(3).transform.value == copy.layer(3).transform.value);
      CHECK(m.layer(3).attention.value == copy.layer(3).attention.value);
      CHECK(m.layer(2).transform.value != copy.layer(2).transform.value);
      CHECK(m.classifier().value != copy.classifier().value);
    }
  }

  TEST_CASE("models of different depth share initial layers for one seed") {
    GnnModel deep = make_model(GnnKind::Gat, 5, 3, 4, false, 77);
    GnnModel shallow = make_model(GnnKind::Gat, 5, 1, 4, false, 77);
    CHECK(deep.layer(1).transform.value == shallow.layer(1).transform.value);
    CHECK(deep.layer(1).attention.value == shallow.layer(1).attention.value);
    CHECK(deep.classifier().value == shallow.classifier().value);
  }
}

TEST_SUITE("checkpoint") {
  TEST_CASE("save and load is exact and byte stable") {
    std::mt19937_64 rng(14);
    const BuiltGraph g = random_graph(7, rng);
    GnnModel m = make_model(GnnKind::Gat, 7, 3, 5, true, 9);
    std::ostringstream a;
    write_param_record(a, m.to_record());
    GnnModel back = GnnModel::from_record(m.to_record());
    CHECK(back.config().kind == GnnKind::Gat);
    CHECK(back.config().max_depth == 3);
    CHECK(back.config().residual);
    CHECK(logits(back, g, 3) == logits(m, g, 3));
    std::ostringstream b;
    write_param_record(b, back.to_record());
    CHECK(a.str() == b.str());

    std::ostringstream c;
    write_param_record(c, make_model(GnnKind::Gat, 7, 3, 5, true, 9).to_record());
    CHECK(c.str() == a.str());
  }

  TEST_CASE("rejects foreign records") {
    ParamRecord r;
    r.kind = "policy";
    CHECK_THROWS(GnnModel::from_record(r));
  }
}
