#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support/testlex.hpp"
#include "wordcrf/common.hpp"
#include "wordcrf/energy.hpp"
#include "wordcrf/factor_view.hpp"

using namespace wordcrf;

namespace {

DetectionWindow at(int id, double cx, double w, std::vector<double> scores) {
  DetectionWindow win;
  win.id = id;
  win.center_x = cx;
  win.center_y = 16;
  win.width = w;
  win.height = 32;
  win.scores = std::move(scores);
  return win;
}

// Shared fixture: two-word lexicon, four windows roughly spelling CVPR.
struct Fixture {
  Alphabet a = Alphabet::case_insensitive();
  Lexicon lex;
  NGramModel model;
  AspectStats stats;
  std::vector<DetectionWindow> ws;
  CandidateGraph g;
  ExtendedLabelSet ext;
  EnergyModel em;

  explicit Fixture(int order = 3)
      : lex({"CVPR", "ICPR"}, a),
        model(NGramModel::build(lex, a, std::min(order, 5))),
        ext(order > 2 ? ExtendedLabelSet::build(lex, a, order)
                      : ExtendedLabelSet{}) {
    stats.mean.assign(a.size(), 0.8);
    stats.sigma.assign(a.size(), 0.3);
    for (int i = 0; i < 4; ++i) {
      std::vector<double> scores(a.size(), 0.05);
      scores[a.index_of("CVPR"[i])] = 0.9;
      ws.push_back(at(i, 16 + 28.0 * i, 24, std::move(scores)));
    }
    g = order_nodes(ws);
    connect_edges(g, ws, 1.0);
    if (order > 2) insert_aux_nodes(g, order);
    em.graph = &g;
    em.windows = ws;
    em.model = &model;
    em.stats = &stats;
    em.ext = order > 2 ? &ext : nullptr;
    em.image_width = 128;
    em.parts = 4;
    em.check();
  }
};

}  // namespace

TEST_CASE("unary potentials follow the stated formulas") {
  const auto w = at(0, 0, 0.7 * 32, {0.25, 0.9, 0.4});
  CHECK(unary_cost(w, 0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(unary_cost(w, 1) == doctest::Approx(0.1).epsilon(1e-12));

  AspectStats stats;
  stats.mean = {0.5, 0.6, 0.7};
  stats.sigma = {0.2, 0.25, 0.3};
  // argmax class 1: p_hat = 0.9, aspect 0.7, exponent (0.6-0.7)^2 / 0.25^2
  const double expect = 0.9 * std::exp(-0.01 / 0.0625);
  CHECK(null_unary_cost(w, stats) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("pairwise potentials follow the stated formulas") {
  PotentialParams p;
  CHECK(lexicon_pair_cost(1.0, p) ==
        doctest::Approx(2.0 * std::exp(-50.0)).epsilon(1e-9));
  CHECK(lexicon_pair_cost(0.0, p) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(overlap_pair_cost(1.0, p) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(overlap_pair_cost(0.0, p) ==
        doctest::Approx(2.0 * std::exp(-50.0)).epsilon(1e-9));

  const Alphabet a = Alphabet::case_insensitive();
  const Lexicon lex({"CVPR", "ICPR"}, a);
  const NGramModel m = NGramModel::build(lex, a, 2);
  // P(P,R) = 1 gives the minimum-cost pair
  CHECK(pairwise_lexicon_cost(a.index_of('P'), a.index_of('R'), m, p) ==
        doctest::Approx(2.0 * std::exp(-50.0)).epsilon(1e-9));
  // digit pair costs lambda_l * exp(-beta * 0.4)
  CHECK(pairwise_lexicon_cost(a.index_of('3'), a.index_of('7'), m, p) ==
        doctest::Approx(2.0 * std::exp(-20.0)).epsilon(1e-9));

  const RoiPairTable roi = RoiPairTable::build(lex, a, 4);
  CHECK(pairwise_roi_cost(a.index_of('P'), a.index_of('R'), 4, roi, p) == 0.0);
  CHECK(pairwise_roi_cost(a.index_of('P'), a.index_of('R'), 1, roi, p) == 2.0);
}

TEST_CASE("aux potentials follow the stated formulas") {
  const Alphabet a = Alphabet::case_insensitive();
  const Lexicon lex({"OPEN"}, a);
  const NGramModel m = NGramModel::build(lex, a, 3);
  const ExtendedLabelSet ext = ExtendedLabelSet::build(lex, a, 3);
  REQUIRE(ext.ngrams.size() == 2);  // OPE, PEN
  PotentialParams p;

  CHECK(aux_unary_cost(ext, ext.invalid_label(), m, p) == 5.0);
  const double p_ope = m.score_extended(ext.ngrams[0]);
  CHECK(aux_unary_cost(ext, 0, m, p) ==
        doctest::Approx(5.0 * std::exp(-50.0 * p_ope)).epsilon(1e-12));

  const int eps = a.epsilon();
  // member agrees with its slot of the ngram
  CHECK(aux_pairwise_cost(ext, 0, 0, a.index_of('O'), eps, p) == 0.0);
  CHECK(aux_pairwise_cost(ext, 0, 1, a.index_of('P'), eps, p) == 0.0);
  // mismatch pays lambda_b
  CHECK(aux_pairwise_cost(ext, 0, 0, a.index_of('P'), eps, p) == 1.0);
  // null member and invalid aux label are free
  CHECK(aux_pairwise_cost(ext, 0, 0, eps, eps, p) == 0.0);
  CHECK(aux_pairwise_cost(ext, ext.invalid_label(), 2, a.index_of('Z'), eps,
                          p) == 0.0);
}

TEST_CASE("aux unary table matches the serial reference") {
  const Alphabet a = Alphabet::case_insensitive();
  const Lexicon lex(testlex::pseudo_words(120, 31), a);
  const NGramModel m = NGramModel::build(lex, a, 4);
  const ExtendedLabelSet ext = ExtendedLabelSet::build(lex, a, 4);
  PotentialParams p;
  const auto par = build_aux_unary_costs(ext, m, p);
  const auto ser = build_aux_unary_costs_serial(ext, m, p);
  REQUIRE(par.size() == static_cast<size_t>(ext.size_with_invalid()));
  CHECK(par == ser);
  CHECK(par.back() == p.lambda_a);
  for (size_t i = 0; i + 1 < par.size(); ++i) {
    CHECK(par[i] ==
          doctest::Approx(aux_unary_cost(ext, static_cast<int>(i), m, p))
              .epsilon(1e-15));
  }
}

TEST_CASE("node regions partition the image width") {
  const Fixture f(2);
  // image width 128, T = 4: region boundaries every 32 px
  CHECK(f.em.node_part(0) == 1);  // cx 16
  CHECK(f.em.node_part(1) == 2);  // cx 44
  CHECK(f.em.node_part(2) == 3);  // cx 72
  CHECK(f.em.node_part(3) == 4);  // cx 100
}

TEST_CASE("edge costs dispatch on null labels and mode") {
  Fixture f(2);
  const Alphabet& a = f.a;
  const int eps = a.epsilon();
  const int P = a.index_of('P'), R = a.index_of('R');

  CHECK(f.em.edge_cost(0, 1, eps, eps) == 0.0);
  const std::vector<int> pr{P, R};
  CHECK(f.em.edge_cost(0, 1, P, R) ==
        doctest::Approx(lexicon_pair_cost(f.model.score(pr), f.em.params))
            .epsilon(1e-12));
  const double null_cost = f.em.edge_cost(0, 1, P, eps);
  CHECK(null_cost ==
        doctest::Approx(pairwise_null_cost(f.ws[0], f.ws[1], f.em.params))
            .epsilon(1e-12));
  CHECK(f.em.edge_cost(0, 1, eps, R) == doctest::Approx(null_cost));

  SUBCASE("roi mode consults the pair table by tail region") {
    RoiPairTable roi = RoiPairTable::build(f.lex, a, f.em.parts);
    f.em.mode = PairwiseMode::roi;
    f.em.roi = &roi;
    f.em.check();
    // node 0 sits in region 1 where (C,V) is valid but (P,R) is not
    const int C = a.index_of('C'), V = a.index_of('V');
    CHECK(f.em.edge_cost(0, 1, C, V) == 0.0);
    CHECK(f.em.edge_cost(0, 1, P, R) == f.em.params.lambda_l);
  }
}

TEST_CASE("total energy sums unary, pairwise, and aux terms") {
  Fixture f(3);
  const Alphabet& a = f.a;
  Labeling lab;
  for (int i = 0; i < 4; ++i) lab.char_labels.push_back(a.index_of("CVPR"[i]));
  lab.aux_labels = {0, 1};  // CVP, VPR

  // naive recomputation straight from the formulas
  double expect = 0;
  for (int i = 0; i < 4; ++i) expect += unary_cost(f.ws[i], lab.char_labels[i]);
  for (const auto& [i, j] : f.g.edges) {
    expect += f.em.edge_cost(i, j, lab.char_labels[i], lab.char_labels[j]);
  }
  for (size_t m = 0; m < f.g.aux.size(); ++m) {
    expect += aux_unary_cost(f.ext, lab.aux_labels[m], f.model, f.em.params);
    for (int q = 0; q < 3; ++q) {
      expect += aux_pairwise_cost(f.ext, lab.aux_labels[m], q,
                                  lab.char_labels[f.g.aux[m].first + q],
                                  a.epsilon(), f.em.params);
    }
  }
  CHECK(total_energy(f.em, lab) == doctest::Approx(expect).epsilon(1e-12));

  SUBCASE("size and range violations are rejected") {
    Labeling bad = lab;
    bad.char_labels.pop_back();
    CHECK_THROWS_AS(total_energy(f.em, bad), Error);
    bad = lab;
    bad.char_labels[0] = a.epsilon() + 1;
    CHECK_THROWS_AS(total_energy(f.em, bad), Error);
    bad = lab;
    bad.aux_labels[0] = f.ext.size_with_invalid();
    CHECK_THROWS_AS(total_energy(f.em, bad), Error);
    bad = lab;
    bad.aux_labels.pop_back();
    CHECK_THROWS_AS(total_energy(f.em, bad), Error);
  }
}

TEST_CASE("factor view energy equals the model energy") {
  std::mt19937_64 rng(71);
  for (int order : {2, 3, 4}) {
    Fixture f(order);
    const FactorGraphView view = build_factor_view(f.em);
    view.validate();
    REQUIRE(view.char_var.size() == f.g.nodes.size());
    REQUIRE(view.aux_var.size() == f.g.aux.size());
    for (int trial = 0; trial < 200; ++trial) {
      Labeling lab;
      for (size_t i = 0; i < f.g.nodes.size(); ++i) {
        lab.char_labels.push_back(static_cast<int>(rng() % (f.a.size() + 1)));
      }
      for (size_t m = 0; m < f.g.aux.size(); ++m) {
        lab.aux_labels.push_back(
            static_cast<int>(rng() % f.ext.size_with_invalid()));
      }
      std::vector<int> flat(view.num_vars());
      for (size_t i = 0; i < view.char_var.size(); ++i) {
        flat[view.char_var[i]] = lab.char_labels[i];
      }
      for (size_t m = 0; m < view.aux_var.size(); ++m) {
        flat[view.aux_var[m]] = lab.aux_labels[m];
      }
      CHECK(view.energy_of(flat) ==
            doctest::Approx(total_energy(f.em, lab)).epsilon(1e-12));
    }
  }
}

TEST_CASE("agreement tables reproduce dense member costs") {
  Fixture f(3);
  const FactorGraphView view = build_factor_view(f.em);
  bool saw_agreement = false;
  for (const ViewEdge& e : view.edges) {
    if (e.kind != ViewEdge::Kind::agreement) continue;
    saw_agreement = true;
    // locate the member slot: which char var and aux var this edge couples
    const int aux_index =
        static_cast<int>(std::find(view.aux_var.begin(), view.aux_var.end(),
                                   e.head) -
                         view.aux_var.begin());
    const int char_index =
        static_cast<int>(std::find(view.char_var.begin(), view.char_var.end(),
                                   e.tail) -
                         view.char_var.begin());
    const int q = char_index - f.g.aux[aux_index].first;
    for (int c = 0; c < view.domain[e.tail]; ++c) {
      for (int m = 0; m < view.domain[e.head]; ++m) {
        CHECK(e.agree.at(c, m) ==
              aux_pairwise_cost(f.ext, m, q, c, f.a.epsilon(), f.em.params));
      }
    }
  }
  CHECK(saw_agreement);
}

TEST_CASE("model structural checks reject inconsistent wiring") {
  Fixture f(3);
  SUBCASE("roi mode requires a table") {
    f.em.mode = PairwiseMode::roi;
    CHECK_THROWS_AS(f.em.check(), Error);
  }
  SUBCASE("extended set arity must match the graph order") {
    const ExtendedLabelSet wrong = ExtendedLabelSet::build(f.lex, f.a, 4);
    f.em.ext = &wrong;
    CHECK_THROWS_AS(f.em.check(), Error);
  }
  SUBCASE("score vectors must cover the alphabet") {
    f.ws[1].scores.pop_back();
    CHECK_THROWS_AS(f.em.check(), Error);
  }
}
