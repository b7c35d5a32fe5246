#include "wordcrf/factor_view.hpp"

#include <cmath>

#include "wordcrf/common.hpp"

namespace wordcrf {

double FactorGraphView::energy_of(std::span<const int> labels) const {
  require(static_cast<int>(labels.size()) == num_vars(),
          "view: labeling has ", labels.size(), " labels, view has ",
          num_vars(), " variables");
  for (int v = 0; v < num_vars(); ++v) {
    require(labels[v] >= 0 && labels[v] < domain[v], "view: label ",
            labels[v], " of variable ", v, " outside domain ", domain[v]);
  }
  double e = 0.0;
  for (int v = 0; v < num_vars(); ++v) e += unary[v][labels[v]];
  for (const ViewEdge& edge : edges) {
    e += edge.cost(labels[edge.tail], labels[edge.head]);
  }
  return e;
}

void FactorGraphView::validate() const {
  require(domain.size() == unary.size(), "view: ", domain.size(),
          " domains vs ", unary.size(), " unary vectors");
  for (int v = 0; v < num_vars(); ++v) {
    require(domain[v] >= 1, "view: variable ", v, " has empty domain");
    require(static_cast<int>(unary[v].size()) == domain[v],
            "view: unary size mismatch at variable ", v);
    for (double c : unary[v]) {
      require(std::isfinite(c), "view: non-finite unary at variable ", v);
    }
  }
  for (size_t i = 0; i < edges.size(); ++i) {
    const ViewEdge& e = edges[i];
    require(e.tail >= 0 && e.head < num_vars() && e.tail < e.head,
            "view: edge ", i, " endpoints (", e.tail, ",", e.head,
            ") not ordered tail < head");
    if (e.kind == ViewEdge::Kind::dense) {
      require(e.dense.rows == domain[e.tail] && e.dense.cols == domain[e.head],
              "view: edge ", i, " table is ", e.dense.rows, "x", e.dense.cols,
              ", domains are ", domain[e.tail], "x", domain[e.head]);
      require(e.dense.cost.size() ==
                  static_cast<size_t>(e.dense.rows) * e.dense.cols,
              "view: edge ", i, " table storage mismatch");
      for (double c : e.dense.cost) {
        require(std::isfinite(c), "view: non-finite table entry on edge ", i);
      }
    } else {
      require(static_cast<int>(e.agree.expected.size()) == domain[e.head],
              "view: edge ", i, " agreement size mismatch");
      require(e.agree.eps == domain[e.tail] - 1, "view: edge ", i,
              " agreement eps must be the last tail label");
      require(std::isfinite(e.agree.penalty) && e.agree.penalty >= 0.0,
              "view: edge ", i, " agreement penalty must be finite and >= 0");
      bool free_seen = false;
      for (std::int32_t x : e.agree.expected) {
        require(x >= -1 && x <= e.agree.eps, "view: edge ", i,
                " agreement expects label ", x, " outside tail domain");
        free_seen = free_seen || x < 0;
      }
      require(free_seen == e.agree.has_free, "view: edge ", i,
              " has_free flag is stale");
    }
  }
}

FactorGraphView build_factor_view(const EnergyModel& em,
                                  const FactorViewOptions& opt) {
  em.check();
  const CandidateGraph& g = *em.graph;
  const int n_nodes = static_cast<int>(g.nodes.size());
  const int n_aux = static_cast<int>(g.aux.size());
  const int k1 = em.num_classes() + 1;
  const int eps = em.epsilon();

  FactorGraphView view;
  view.char_var.assign(n_nodes, -1);
  view.aux_var.assign(n_aux, -1);

  int ext_size = 0;
  if (n_aux > 0) {
    ext_size = em.ext->size_with_invalid();
    require(ext_size <= opt.max_extended_labels, "view: extended label set (",
            ext_size, ") exceeds the cap of ", opt.max_extended_labels);
  }

  // Aux variables go right after their last member; at most one aux run
  // ends at any char node.
  std::vector<int> aux_after(n_nodes, -1);
  for (int a = 0; a < n_aux; ++a) {
    const int last = g.aux[a].first + g.order - 1;
    require(last < n_nodes, "view: aux node ", a, " spans past node list");
    require(aux_after[last] < 0, "view: two aux nodes end at node ", last);
    aux_after[last] = a;
  }

  std::vector<double> aux_unary;
  const std::vector<double>* aux_unary_src = nullptr;
  if (n_aux > 0) {
    if (opt.shared_aux_unary != nullptr) {
      require(static_cast<int>(opt.shared_aux_unary->size()) == ext_size,
              "view: shared aux unary has ", opt.shared_aux_unary->size(),
              " entries, extended set has ", ext_size);
      aux_unary_src = opt.shared_aux_unary;
    } else {
      aux_unary = build_aux_unary_costs(*em.ext, *em.model, em.params);
      aux_unary_src = &aux_unary;
    }
  }

  for (int i = 0; i < n_nodes; ++i) {
    view.char_var[i] = view.num_vars();
    view.domain.push_back(k1);
    std::vector<double> u(static_cast<size_t>(k1));
    for (int c = 0; c < k1; ++c) u[c] = em.char_unary(i, c);
    view.unary.push_back(std::move(u));
    if (aux_after[i] >= 0) {
      view.aux_var[aux_after[i]] = view.num_vars();
      view.domain.push_back(ext_size);
      view.unary.push_back(*aux_unary_src);
    }
  }

  for (const auto& [i, j] : g.edges) {
    ViewEdge e;
    e.tail = view.char_var[i];
    e.head = view.char_var[j];
    e.kind = ViewEdge::Kind::dense;
    e.dense.rows = k1;
    e.dense.cols = k1;
    e.dense.cost.resize(static_cast<size_t>(k1) * k1);
    for (int li = 0; li < k1; ++li) {
      for (int lj = 0; lj < k1; ++lj) {
        e.dense.cost[static_cast<size_t>(li) * k1 + lj] =
            em.edge_cost(i, j, li, lj);
      }
    }
    view.edges.push_back(std::move(e));
  }

  for (int a = 0; a < n_aux; ++a) {
    for (int q = 0; q < g.order; ++q) {
      ViewEdge e;
      e.tail = view.char_var[g.aux[a].first + q];
      e.head = view.aux_var[a];
      e.kind = ViewEdge::Kind::agreement;
      e.agree.penalty = em.params.lambda_b;
      e.agree.eps = eps;
      e.agree.expected.resize(static_cast<size_t>(ext_size));
      for (int m = 0; m < ext_size - 1; ++m) {
        e.agree.expected[m] = em.ext->ngrams[m][q];
      }
      e.agree.expected[ext_size - 1] = -1;  // invalid label is free
      e.agree.has_free = true;
      view.edges.push_back(std::move(e));
    }
  }

  view.validate();
  return view;
}

}  // namespace wordcrf
