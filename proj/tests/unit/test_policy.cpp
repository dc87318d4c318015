#include <array>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "bngnn/numerics/grad_check.hpp"
#include "bngnn/policy/agent.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace bngnn;

namespace {

QNetworkConfig qconfig(std::size_t in, std::size_t actions = 3, std::uint64_t seed = 1, std::size_t hidden = 16) {
  QNetworkConfig c;
  c.input_dim = in;
  c.actions = actions;
  c.hidden_dim = hidden;
  c.seed = seed;
  return c;
}

Parameter& named(QNetwork& q, const std::string& name) {
  for (Parameter* p : q.parameters())
    if (p->name == name) return *p;
  throw std::logic_error("no parameter " + name);
}

// Network whose outputs are the given constants for every input.
QNetwork constant_net(std::vector<double> q_values, std::size_t in = 2) {
  QNetwork q(qconfig(in, q_values.size()));
  named(q, "output.weight").value.fill(0.0);
  named(q, "output.bias").value = Matrix::row_vector(q_values);
  return q;
}

StatePtr state(std::vector<double> v) { return std::make_shared<const std::vector<double>>(std::move(v)); }

Experience experience(std::size_t id, std::size_t action = 1, double reward = 0.0) {
  return Experience{id, state({double(id) + 0.5, 0.3}), action, reward, id + 1, state({double(id) + 1.5, 0.3})};
}

double loss_value(QNetwork& eval, QNetwork& target, const std::vector<Experience>& batch, double gamma, TdTarget form) {
  std::vector<const Experience*> ptrs;
  for (const auto& e : batch) ptrs.push_back(&e);
  Tape t(false);
  return policy_loss(t, eval, target, ptrs, gamma, form).value()(0, 0);
}

}  // namespace

TEST_SUITE("epsilon") {
  TEST_CASE("linear decay over the first 20 timesteps") {
    const EpsilonSchedule e;
    CHECK(e.at(1) == 1.0);
    CHECK(e.at(10) == 0.55);
    CHECK(e.at(20) == 0.05);
    CHECK(e.at(21) == 0.05);
    CHECK(e.at(1000) == 0.05);
    for (std::size_t i = 1; i < 40; ++i) CHECK(e.at(i + 1) <= e.at(i));
    CHECK_THROWS(e.at(0));
    CHECK_THROWS(EpsilonSchedule(0.1, 0.5, 10));
  }
}

TEST_SUITE("action selection") {
  TEST_CASE("greedy with low-index ties") {
    Rng rng = make_rng(1, streams::kExploration);
    const std::array<double, 3> q{0.1, 0.9, 0.3};
    CHECK(select_action(q, 0.0, rng) == 2);
    const std::array<double, 3> flat{0.4, 0.4, 0.4};
    CHECK(select_action(flat, 0.0, rng) == 1);
    CHECK(argmax(flat) == 0);
  }

  TEST_CASE("epsilon one is uniform") {
    Rng rng = make_rng(2, streams::kExploration);
    const std::array<double, 3> q{0.0, 5.0, 0.0};
    std::array<int, 3> counts{};
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++counts[select_action(q, 1.0, rng) - 1];
    for (int c : counts) CHECK(std::abs(c / double(draws) - 1.0 / 3.0) <= 0.02);
  }
}

TEST_SUITE("reward window") {
  TEST_CASE("fixtures") {
    RewardWindow w(20);
    CHECK(w.reward(6, 10) == 0.0);
    w.reward(7, 10);
    CHECK(w.reward(8, 10) == 0.15);
    RewardWindow flat(20);
    for (int i = 0; i < 30; ++i) flat.reward(5, 10);
    CHECK(flat.reward(5, 10) == 0.0);
    CHECK(flat.history().size() == 20);
  }

  TEST_CASE("keeps the last w values in order") {
    RewardWindow w(3);
    for (std::size_t v : {1, 2, 3, 4, 5}) w.reward(v, 10);
    CHECK(std::vector<std::size_t>(w.history().begin(), w.history().end()) == std::vector<std::size_t>{3, 4, 5});
    CHECK(w.reward(0, 10) == -0.4);
  }

  TEST_CASE("matches the correctly rounded rational value") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t total = 1 + rng() % 60, window = 1 + rng() % 25;
      RewardWindow w(window);
      std::deque<std::size_t> past;
      for (int step = 0; step < 40; ++step) {
        const std::size_t c = rng() % (total + 1);
        double expected = 0.0;
        if (!past.empty()) {
          long long sum = 0;
          for (std::size_t p : past) sum += static_cast<long long>(p);
          const long long n = static_cast<long long>(past.size());
          expected = double(n * static_cast<long long>(c) - sum) / double(n * static_cast<long long>(total));
        }
        CHECK(w.reward(c, total) == expected);
        past.push_back(c);
        if (past.size() > window) past.pop_front();
      }
    }
  }

  TEST_CASE("window one telescopes") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      RewardWindow w(1);
      const std::size_t first = rng() % 21;
      w.reward(first, 20);
      double total = 0.0;
      std::size_t last = first;
      for (int i = 0; i < 100; ++i) {
        last = rng() % 21;
        total += w.reward(last, 20);
      }
      CHECK(total == doctest::Approx((double(last) - double(first)) / 20.0).epsilon(1e-12));
    }
  }

  TEST_CASE("rejects inconsistent counts") {
    RewardWindow w(3);
    CHECK_THROWS(w.reward(3, 2));
    CHECK_THROWS(w.reward(0, 0));
    w.reward(1, 4);
    CHECK_THROWS(w.reward(1, 5));
  }
}

TEST_SUITE("replay memory") {
  TEST_CASE("FIFO eviction and distinct sampling at capacity 5") {
    ReplayMemory m(5);
    Rng rng = make_rng(1, streams::kReplay);
    for (std::size_t i = 0; i < 12; ++i) {
      m.push(experience(i));
      const std::size_t size = std::min<std::size_t>(i + 1, 5);
      REQUIRE(m.size() == size);
      for (std::size_t k = 0; k < size; ++k) CHECK(m[k].state_id == i + 1 - size + k);
      for (std::size_t batch = 1; batch <= 6; ++batch) {
        for (int rep = 0; rep < 20; ++rep) {
          const auto s = m.sample(batch, rng);
          CHECK(s.size() == std::min(batch, size));
          std::set<const Experience*> distinct(s.begin(), s.end());
          CHECK(distinct.size() == s.size());
        }
      }
    }
  }

  TEST_CASE("501st insert evicts the first") {
    ReplayMemory m;
    for (std::size_t i = 0; i < 501; ++i) m.push(experience(i));
    CHECK(m.size() == 500);
    CHECK(m[0].state_id == 1);
  }

  TEST_CASE("sampling covers every subset size uniformly") {
    ReplayMemory m(5);
    for (std::size_t i = 0; i < 5; ++i) m.push(experience(i));
    Rng rng = make_rng(4, streams::kReplay);
    std::array<int, 5> hits{};
    for (int rep = 0; rep < 20000; ++rep)
      for (const Experience* e : m.sample(2, rng)) ++hits[e->state_id];
    for (int h : hits) CHECK(std::abs(h / 40000.0 - 0.2) < 0.01);
  }

  TEST_CASE("rejects non-finite rewards") {
    ReplayMemory m(5);
    CHECK_THROWS(m.push(experience(0, 1, std::nan(""))));
  }
}

TEST_SUITE("q network") {
  TEST_CASE("shape and gradients") {
    QNetwork q(qconfig(6, 3, 5, 8));
    std::mt19937_64 rng(5);
    const Matrix states = bngnn::testing::random_matrix(4, 6, rng);
    CHECK(q.q_values(states).rows() == 4);
    CHECK(q.q_values(states).cols() == 3);
    auto params = q.parameters();
    CHECK(params.size() == 4);
    CHECK(named(q, "hidden.bias").value == Matrix(1, 8, 0.0));
    named(q, "hidden.bias").value = bngnn::testing::random_matrix(1, 8, rng);
    named(q, "output.bias").value = bngnn::testing::random_matrix(1, 3, rng);
    const auto report = grad_check(
        [&](Tape& t) { return mean_all(square(q.forward(t, t.constant(states)))); }, params);
    CHECK(report.max_relative_error <= 1e-4);
  }

  TEST_CASE("copy and compare") {
    QNetwork a(qconfig(4, 3, 1)), b(qconfig(4, 3, 2));
    CHECK_FALSE(a.same_parameters(b));
    b.copy_parameters_from(a);
    CHECK(a.same_parameters(b));
    CHECK_THROWS(b.copy_parameters_from(QNetwork(qconfig(5))));
  }
}

TEST_SUITE("policy loss") {
  TEST_CASE("TD fixture") {
    QNetwork eval = constant_net({2.5, 1.0, 0.0});
    QNetwork target = constant_net({0.5, 2.0, -1.0});
    const std::vector<Experience> one{experience(0, 2, 1.0)};
    CHECK(loss_value(eval, target, one, 0.95, TdTarget::MaxEval) == doctest::Approx(0.16).epsilon(1e-12));
    // taken action 2 predicts Q_eval(s,2) = 1.0: (1 + 1.9 - 1.0)²
    CHECK(loss_value(eval, target, one, 0.95, TdTarget::TakenAction) == doctest::Approx(3.61).epsilon(1e-12));
    const std::vector<Experience> two{experience(0, 2, 1.0), experience(0, 2, 1.0)};
    CHECK(loss_value(eval, target, two, 0.95, TdTarget::MaxEval) == loss_value(eval, target, one, 0.95, TdTarget::MaxEval));
    QNetwork zero = constant_net({0.0, 0.0, 0.0});
    const std::vector<Experience> none{experience(0, 1, 0.0)};
    CHECK(loss_value(zero, target, none, 0.0, TdTarget::MaxEval) == 0.0);
    CHECK_THROWS(loss_value(eval, target, {}, 0.95, TdTarget::MaxEval));
  }

  TEST_CASE("gradients reach q_eval only") {
    QNetwork eval(qconfig(2, 3, 1)), target(qconfig(2, 3, 2));
    const std::vector<Experience> batch{experience(0, 1, 0.3), experience(1, 3, -0.2)};
    std::vector<const Experience*> ptrs{&batch[0], &batch[1]};
    for (TdTarget form : {TdTarget::MaxEval, TdTarget::TakenAction}) {
      Tape t;
      t.backward(policy_loss(t, eval, target, ptrs, 0.95, form));
      for (Parameter* p : target.parameters()) CHECK_FALSE(p->touched);
      bool any = false;
      for (Parameter* p : eval.parameters()) any = any || p->touched;
      CHECK(any);
      for (Parameter* p : eval.parameters()) p->zero_grad();
      auto params = eval.parameters();
      const auto report =
          grad_check([&](Tape& tp) { return policy_loss(tp, eval, target, ptrs, 0.95, form); }, params);
      CHECK(report.max_relative_error <= 1e-4);
    }
  }

  TEST_CASE("parses both forms") {
    CHECK(parse_td_target("max-eval") == TdTarget::MaxEval);
    CHECK(parse_td_target("taken-action") == TdTarget::TakenAction);
    CHECK_THROWS(parse_td_target("sarsa"));
  }
}

TEST_SUITE("agent") {
  DdqnConfig agent_config(std::uint64_t seed, TdTarget form = TdTarget::MaxEval) {
    DdqnConfig c;
    c.input_dim = 2;
    c.hidden_dim = 16;
    c.batch_size = 4;
    c.sync_period = 3;
    c.td_target = form;
    c.seed = seed;
    return c;
  }

  TEST_CASE("target is frozen between syncs and equal after") {
    DdqnAgent agent(agent_config(1));
    const std::vector<double> probe{0.3, -0.7};
    CHECK(agent.q_eval().same_parameters(agent.q_target()));
    const auto frozen = agent.q_target().q_values(probe);
    agent.observe(experience(0, 1, 1.0));
    agent.observe(experience(1, 2, 0.5));
    CHECK(agent.q_target().q_values(probe) == frozen);
    CHECK_FALSE(agent.q_eval().same_parameters(agent.q_target()));
    agent.observe(experience(2, 3, 0.0));
    CHECK(agent.steps() == 3);
    CHECK(agent.q_eval().same_parameters(agent.q_target()));
    CHECK(agent.q_target().q_values(probe) == agent.q_eval().q_values(probe));
    agent.sync_target();
    agent.sync_target();
    CHECK(agent.q_eval().same_parameters(agent.q_target()));
  }

  TEST_CASE("acting consumes the schedule") {
    DdqnAgent agent(agent_config(2));
    const std::vector<double> s{1.0, 0.0};
    const std::size_t greedy = agent.greedy(s);
    for (std::size_t t = 20; t < 200; ++t) {
      const std::size_t a = agent.act(s, t);
      CHECK(a >= 1);
      CHECK(a <= 3);
    }
    std::size_t agree = 0;
    for (std::size_t t = 1000; t < 2000; ++t) agree += agent.act(s, t) == greedy;
    CHECK(agree > 900);
    const std::vector<double>* batch[] = {&s, &s};
    CHECK(agent.greedy_batch(batch) == std::vector<std::size_t>{greedy, greedy});
  }

  TEST_CASE("checkpoint restores networks, optimiser, counters and streams") {
    for (TdTarget form : {TdTarget::MaxEval, TdTarget::TakenAction}) {
      DdqnAgent agent(agent_config(3, form));
      for (std::size_t i = 0; i < 7; ++i) agent.observe(experience(i, 1 + i % 3, 0.1 * double(i)));
      std::ostringstream a;
      write_param_record(a, agent.to_record());
      auto back = DdqnAgent::from_record(agent.to_record());
      CHECK(back->steps() == 7);
      CHECK(back->config().td_target == form);
      CHECK(back->config().epsilon.horizon() == 20);
      CHECK(back->q_eval().same_parameters(agent.q_eval()));
      CHECK(back->q_target().same_parameters(agent.q_target()));
      std::ostringstream b;
      write_param_record(b, back->to_record());
      CHECK(a.str() == b.str());
      const std::vector<double> s{0.2, 0.4};
      for (std::size_t t = 1; t <= 40; ++t) CHECK(back->act(s, t) == agent.act(s, t));
    }
  }
}
