#include <doctest.h>

#include <cmath>
#include <random>

#include "support/randomview.hpp"
#include "wordcrf/common.hpp"
#include "wordcrf/inference.hpp"

using namespace wordcrf;

TEST_CASE("degenerate views") {
  FactorGraphView empty;
  const auto r = trws_minimize(empty);
  CHECK(r.labels.empty());
  CHECK(r.energy == 0);
  CHECK(r.lower_bound == 0);
  CHECK(r.converged);

  FactorGraphView one;
  one.domain = {4};
  one.unary = {{3.0, 1.0, 2.5, 9.0}};
  one.validate();
  const auto s = trws_minimize(one);
  REQUIRE(s.labels.size() == 1);
  CHECK(s.labels[0] == 1);
  CHECK(s.energy == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.lower_bound == doctest::Approx(1.0).epsilon(1e-12));

  const auto b = brute_force_minimize(one);
  CHECK(b.labels == s.labels);
  CHECK(b.energy == s.energy);
}

TEST_CASE("message passing is exact on chains") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const FactorGraphView v = testview::random_chain(rng);
    const auto mp = trws_minimize(v);
    const auto bf = brute_force_minimize(v);
    CHECK(mp.energy == doctest::Approx(bf.energy).epsilon(1e-9));
    CHECK(mp.lower_bound <= mp.energy + 1e-9);
    CHECK(mp.lower_bound == doctest::Approx(bf.energy).epsilon(1e-9));
    CHECK(v.energy_of(mp.labels) == doctest::Approx(mp.energy).epsilon(1e-12));
  }
}

TEST_CASE("the lower bound never decreases and brackets the energy") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const FactorGraphView v = testview::random_aux_instance(rng);
    std::vector<double> trace;
    TrwsOptions opt;
    opt.bound_trace = &trace;
    const auto r = trws_minimize(v, opt);
    REQUIRE(!trace.empty());
    for (size_t i = 1; i < trace.size(); ++i) {
      CHECK(trace[i] >= trace[i - 1] - 1e-10);
    }
    CHECK(trace.back() == doctest::Approx(r.lower_bound).epsilon(1e-12));
    CHECK(r.lower_bound <= r.energy + 1e-9);
    CHECK(v.energy_of(r.labels) == doctest::Approx(r.energy).epsilon(1e-12));

    const auto bf = brute_force_minimize(v);
    CHECK(r.lower_bound <= bf.energy + 1e-9);
    CHECK(bf.energy <= r.energy + 1e-9);
  }
}

TEST_CASE("structured agreement edges behave like their dense expansion") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 40; ++trial) {
    const FactorGraphView v = testview::random_aux_instance(rng);
    FactorGraphView dense = v;
    for (ViewEdge& e : dense.edges) {
      if (e.kind != ViewEdge::Kind::agreement) continue;
      const int rows = dense.domain[e.tail], cols = dense.domain[e.head];
      DenseTable t;
      t.rows = rows;
      t.cols = cols;
      t.cost.resize(static_cast<size_t>(rows) * cols);
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
          t.cost[static_cast<size_t>(r) * cols + c] = e.agree.at(r, c);
        }
      }
      e.kind = ViewEdge::Kind::dense;
      e.dense = std::move(t);
    }
    dense.validate();

    TrwsOptions opt;
    std::vector<double> trace_a, trace_b;
    opt.bound_trace = &trace_a;
    const auto ra = trws_minimize(v, opt);
    opt.bound_trace = &trace_b;
    const auto rb = trws_minimize(dense, opt);
    CHECK(ra.labels == rb.labels);
    CHECK(ra.energy == doctest::Approx(rb.energy).epsilon(1e-9));
    CHECK(ra.lower_bound == doctest::Approx(rb.lower_bound).epsilon(1e-9));
    REQUIRE(trace_a.size() == trace_b.size());
    for (size_t i = 0; i < trace_a.size(); ++i) {
      CHECK(trace_a[i] == doctest::Approx(trace_b[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("exhaustive search splits match the serial scan") {
  std::mt19937_64 rng(900);
  for (int trial = 0; trial < 30; ++trial) {
    const FactorGraphView v = trial % 2 == 0
                                  ? testview::random_chain(rng, 5, 5)
                                  : testview::random_aux_instance(rng);
    const auto par = brute_force_minimize(v);
    const auto ser = brute_force_minimize_serial(v);
    CHECK(par.labels == ser.labels);
    CHECK(par.energy == ser.energy);
  }
}

TEST_CASE("exhaustive search rejects oversized label spaces") {
  FactorGraphView v;
  v.domain = {3, 3};
  v.unary = {{0, 1, 2}, {0, 1, 2}};
  v.validate();
  CHECK_THROWS_AS(brute_force_minimize(v, 8.0), Error);
  CHECK(brute_force_minimize(v, 9.0).energy == 0.0);
}

TEST_CASE("ties resolve to the lexicographically smallest labeling") {
  FactorGraphView v;
  v.domain = {2, 2};
  v.unary = {{1.0, 1.0}, {1.0, 1.0}};
  ViewEdge e;
  e.tail = 0;
  e.head = 1;
  e.dense.rows = 2;
  e.dense.cols = 2;
  e.dense.cost = {0.5, 0.5, 0.5, 0.5};
  v.edges.push_back(e);
  v.validate();
  const auto r = brute_force_minimize(v);
  CHECK(r.labels == std::vector<int>{0, 0});
}
