#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>

#include "wordcrf/common.hpp"
#include "wordcrf/inference.hpp"

namespace wordcrf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Message state: one reusable buffer per edge, interpreted as directed
// toward whichever endpoint is about to consume it. The pass schedule keeps
// the invariant that when a variable is processed, every incident message
// is directed toward it.
//
// Agreement edges store both directions compactly over the tail (character)
// domain: a head-bound message is fully determined by one value per tail
// class (free head labels read as 0), so the head-domain-sized vector is
// never materialized. Reads on the head side go through expected[].
struct Passes {
  const FactorGraphView& view;
  std::vector<std::vector<double>> msg;
  std::vector<std::vector<int>> in_edges;   // var is head
  std::vector<std::vector<int>> out_edges;  // var is tail
  std::vector<double> gamma;
  std::vector<double> di, tmp, cls_min;
  // Agreement edges: which tail classes occur in expected[] (normalizing a
  // tail->head message minimizes over these when no free label exists).
  std::vector<std::vector<std::uint8_t>> present;

  // A variable whose incident edges are all agreement edges pointing at it
  // (an auxiliary node) takes a fused update that never materializes its
  // (large) di. Its edges' expected[] columns are interleaved into one
  // narrow stream so each pass reads the domain once.
  struct Fused {
    int E = 0;
    std::vector<std::int16_t> packed;  // domain * E; -1 = free slot
  };
  std::vector<int> fused_idx;  // per variable; -1 = generic path
  std::vector<Fused> fused_vars;
  std::vector<double> fused_cls;  // per-edge grouped minima scratch

  explicit Passes(const FactorGraphView& v) : view(v) {
    const int n = v.num_vars();
    in_edges.resize(n);
    out_edges.resize(n);
    msg.resize(v.edges.size());
    present.resize(v.edges.size());
    int max_dom = 1;
    for (int d : v.domain) max_dom = std::max(max_dom, d);
    for (size_t ei = 0; ei < v.edges.size(); ++ei) {
      const ViewEdge& e = v.edges[ei];
      if (e.kind == ViewEdge::Kind::dense) {
        msg[ei].assign(
            static_cast<size_t>(std::max(v.domain[e.tail], v.domain[e.head])),
            0.0);
      } else {
        msg[ei].assign(static_cast<size_t>(v.domain[e.tail]), 0.0);
        auto& pr = present[ei];
        pr.assign(static_cast<size_t>(v.domain[e.tail]), 0);
        for (std::int32_t x : e.agree.expected) {
          if (x >= 0) pr[static_cast<size_t>(x)] = 1;
        }
      }
      out_edges[e.tail].push_back(static_cast<int>(ei));
      in_edges[e.head].push_back(static_cast<int>(ei));
    }
    gamma.resize(n);
    int max_in = 0, max_tail_dom = 1;
    for (int i = 0; i < n; ++i) {
      const int deg = static_cast<int>(
          std::max(in_edges[i].size(), out_edges[i].size()));
      gamma[i] = 1.0 / std::max(1, deg);
      max_in = std::max(max_in, static_cast<int>(in_edges[i].size()));
    }
    for (const ViewEdge& e : v.edges) {
      if (e.kind == ViewEdge::Kind::agreement) {
        max_tail_dom = std::max(max_tail_dom, v.domain[e.tail]);
      }
    }
    di.assign(static_cast<size_t>(max_dom), 0.0);
    tmp.assign(static_cast<size_t>(max_dom), 0.0);
    cls_min.assign(static_cast<size_t>(max_dom), 0.0);
    fused_cls.assign(static_cast<size_t>(std::max(max_in, 1)) * max_tail_dom,
                     0.0);
    fused_idx.assign(static_cast<size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
      if (!fusable(i)) continue;
      Fused f;
      f.E = static_cast<int>(in_edges[i].size());
      const int d = v.domain[i];
      f.packed.resize(static_cast<size_t>(d) * f.E);
      for (int e = 0; e < f.E; ++e) {
        const auto& expected = v.edges[in_edges[i][e]].agree.expected;
        for (int mh = 0; mh < d; ++mh) {
          f.packed[static_cast<size_t>(mh) * f.E + e] =
              static_cast<std::int16_t>(expected[mh]);
        }
      }
      fused_idx[i] = static_cast<int>(fused_vars.size());
      fused_vars.push_back(std::move(f));
    }
  }

  bool fusable(int i) const {
    const auto& edges = in_edges[i];
    if (!out_edges[i].empty() || edges.empty() || edges.size() > 8) {
      return false;
    }
    for (int ei : edges) {
      const ViewEdge& e = view.edges[ei];
      if (e.kind != ViewEdge::Kind::agreement || e.head != i ||
          view.domain[e.tail] > 32767) {
        return false;
      }
    }
    return true;
  }

  // Message value seen by head label mh of an agreement edge.
  static double agree_at(const AgreementTable& t, const double* m, int mh) {
    const std::int32_t x = t.expected[mh];
    return x < 0 ? 0.0 : m[x];
  }

  // di = unary[i] + every incident message (all directed toward i).
  void gather(int i) {
    const int d = view.domain[i];
    const double* u = view.unary[i].data();
    for (int l = 0; l < d; ++l) di[l] = u[l];
    for (int ei : in_edges[i]) {
      const ViewEdge& e = view.edges[ei];
      const double* m = msg[ei].data();
      if (e.kind == ViewEdge::Kind::agreement) {
        const AgreementTable& t = e.agree;
        for (int l = 0; l < d; ++l) di[l] += agree_at(t, m, l);
      } else {
        for (int l = 0; l < d; ++l) di[l] += m[l];
      }
    }
    for (int ei : out_edges[i]) {
      // i is the tail; both message forms are indexed by tail labels.
      const double* m = msg[ei].data();
      for (int l = 0; l < d; ++l) di[l] += m[l];
    }
  }

  // Reparameterized min-convolution along edge ei away from `from`:
  //   new_msg[lt] = min_lf (g * di[lf] - old_msg[lf] + V(lf, lt)) - delta,
  // normalized so the new message's minimum is zero; returns delta.
  double send(int ei, int from, double g) {
    const ViewEdge& e = view.edges[ei];
    const bool from_tail = from == e.tail;
    const int to = from_tail ? e.head : e.tail;
    const int df = view.domain[from];
    const int dt = view.domain[to];
    std::vector<double>& m = msg[ei];

    if (e.kind == ViewEdge::Kind::dense) {
      for (int lf = 0; lf < df; ++lf) tmp[lf] = g * di[lf] - m[lf];
      double delta = kInf;
      if (from_tail) {
        for (int lt = 0; lt < dt; ++lt) {
          double best = kInf;
          for (int lf = 0; lf < df; ++lf) {
            best = std::min(best, tmp[lf] + e.dense.at(lf, lt));
          }
          m[lt] = best;
          delta = std::min(delta, best);
        }
      } else {
        for (int lt = 0; lt < dt; ++lt) {
          double best = kInf;
          for (int lf = 0; lf < df; ++lf) {
            best = std::min(best, tmp[lf] + e.dense.at(lt, lf));
          }
          m[lt] = best;
          delta = std::min(delta, best);
        }
      }
      for (int lt = 0; lt < dt; ++lt) m[lt] -= delta;
      return delta;
    }

    const AgreementTable& t = e.agree;
    if (from_tail) {
      // char -> aux, compact: the head-bound message is val[expected[mh]]
      // with free labels at 0, so only one value per tail class is stored:
      //   val[c] = min(tmp[c], tmp[eps], min_all + penalty) - delta.
      double mn = kInf;
      for (int c = 0; c < df; ++c) {
        tmp[c] = g * di[c] - m[c];
        mn = std::min(mn, tmp[c]);
      }
      const double base = std::min(tmp[t.eps], mn + t.penalty);
      if (t.has_free) {
        for (int c = 0; c < df; ++c) m[c] = std::min(tmp[c], base) - mn;
        return mn;
      }
      // No free head label: the minimum runs over classes that occur.
      double delta = base;
      const std::uint8_t* pr = present[ei].data();
      for (int c = 0; c < df; ++c) {
        if (pr[c]) delta = std::min(delta, tmp[c]);
      }
      for (int c = 0; c < df; ++c) m[c] = std::min(tmp[c], base) - delta;
      return delta;
    }
    // aux -> char: group minima over head labels by expected char; the null
    // char sees cost 0 everywhere, so min_all normalizes the message.
    const int eps = t.eps;
    for (int c = 0; c <= eps; ++c) cls_min[c] = kInf;
    double min_all = kInf, min_free = kInf;
    const double* dptr = di.data();
    const double* mptr = m.data();
    for (int mh = 0; mh < df; ++mh) {
      const std::int32_t x = t.expected[mh];
      const double v = g * dptr[mh] - (x < 0 ? 0.0 : mptr[x]);
      min_all = std::min(min_all, v);
      if (x < 0) {
        min_free = std::min(min_free, v);
      } else if (v < cls_min[x]) {
        cls_min[x] = v;
      }
    }
    const double base = std::min(min_free, min_all + t.penalty);
    for (int c = 0; c < eps; ++c) {
      m[c] = std::min(cls_min[c], base) - min_all;
    }
    m[eps] = 0.0;
    return min_all;
  }

  // Backward update of a fused variable: one pass over the domain computes
  // the variable's normalization and every outgoing grouped-minimum in
  // registers. Returns the banked bound contribution.
  template <int E>
  double fused_run(int i, const Fused& f) {
    const auto& edges = in_edges[i];
    const int df = view.domain[i];
    const double g = gamma[i];
    const double* u = view.unary[i].data();
    const std::int16_t* px = f.packed.data();

    std::array<const double*, E> cm;
    std::array<double*, E> grp;
    std::array<double, E> min_all, min_free;
    for (int e = 0; e < E; ++e) {
      const ViewEdge& ve = view.edges[edges[e]];
      cm[e] = msg[edges[e]].data();
      const int td = view.domain[ve.tail];
      grp[e] = fused_cls.data() + static_cast<size_t>(e) * td;
      for (int c = 0; c < td; ++c) grp[e][c] = kInf;
      min_all[e] = kInf;
      min_free[e] = kInf;
    }

    double delta = kInf;
    for (int mh = 0; mh < df; ++mh, px += E) {
      double d = u[mh];
      std::array<double, E> contrib;
      for (int e = 0; e < E; ++e) {
        const int x = px[e];
        contrib[e] = x < 0 ? 0.0 : cm[e][x];
        d += contrib[e];
      }
      delta = std::min(delta, d);
      const double gd = g * d;
      for (int e = 0; e < E; ++e) {
        const double v = gd - contrib[e];
        min_all[e] = std::min(min_all[e], v);
        const int x = px[e];
        if (x < 0) {
          min_free[e] = std::min(min_free[e], v);
        } else if (v < grp[e][x]) {
          grp[e][x] = v;
        }
      }
    }

    // The node's normalization is banked first, shifting every edge value
    // by g * delta — identical to subtracting delta from di before sending.
    double banked = delta;
    for (int e = 0; e < E; ++e) {
      const ViewEdge& ve = view.edges[edges[e]];
      const double shift = g * delta;
      const double ma = min_all[e] - shift;
      const double base = std::min(min_free[e] - shift, ma + ve.agree.penalty);
      double* m = msg[edges[e]].data();
      const int eps = ve.agree.eps;
      for (int c = 0; c < eps; ++c) {
        m[c] = std::min(grp[e][c] - shift, base) - ma;
      }
      m[eps] = 0.0;
      banked += ma;
    }
    return banked;
  }

  double fused_head_backward(int i) {
    const Fused& f = fused_vars[static_cast<size_t>(fused_idx[i])];
    switch (f.E) {
      case 1: return fused_run<1>(i, f);
      case 2: return fused_run<2>(i, f);
      case 3: return fused_run<3>(i, f);
      case 4: return fused_run<4>(i, f);
      case 5: return fused_run<5>(i, f);
      case 6: return fused_run<6>(i, f);
      case 7: return fused_run<7>(i, f);
      default: return fused_run<8>(i, f);
    }
  }
};

}  // namespace

InferenceResult trws_minimize(const FactorGraphView& view,
                              const TrwsOptions& opt) {
  view.validate();
  require(opt.max_iters >= 1, "trws: max_iters must be >= 1");
  require(opt.tol >= 0.0, "trws: tol must be >= 0");
  InferenceResult res;
  if (view.num_vars() == 0) {
    res.converged = true;
    return res;
  }

  Passes p(view);
  const int V = view.num_vars();
  double prev_bound = -kInf;
  std::vector<int> best_labels;
  double best_energy = kInf;

  // Extraction sweep: fixed tails enter through their pairwise column,
  // unfixed heads through the messages left by the last backward pass.
  std::vector<double> dib;
  const auto extract = [&] {
    res.labels.assign(static_cast<size_t>(V), 0);
    double direct = 0.0;
    for (int i = 0; i < V; ++i) {
      const int d = view.domain[i];
      if (p.fused_idx[i] >= 0) {
        // Streamed argmin over the (large) head domain: conditioned cost is
        // the unary plus one penalty per fixed member that disagrees.
        const auto& edges = p.in_edges[i];
        const Passes::Fused& f =
            p.fused_vars[static_cast<size_t>(p.fused_idx[i])];
        const int E = f.E;
        std::array<std::int16_t, 8> xt{};
        std::array<double, 8> pen{};
        for (int e = 0; e < E; ++e) {
          const ViewEdge& ve = view.edges[edges[e]];
          xt[e] = static_cast<std::int16_t>(res.labels[ve.tail]);
          // A null member agrees with anything, so its penalty never fires.
          pen[e] = res.labels[ve.tail] == ve.agree.eps ? 0.0
                                                       : ve.agree.penalty;
        }
        const double* u = view.unary[i].data();
        const std::int16_t* px = f.packed.data();
        int best = 0;
        double bestc = kInf;
        for (int l = 0; l < d; ++l, px += E) {
          double c = u[l];
          for (int e = 0; e < E; ++e) {
            const int x = px[e];
            if (x >= 0 && x != xt[e]) c += pen[e];
          }
          if (c < bestc) {
            bestc = c;
            best = l;
          }
        }
        res.labels[i] = best;
        direct += bestc;
        continue;
      }
      dib.assign(view.unary[i].begin(), view.unary[i].end());
      for (int ei : p.in_edges[i]) {
        const ViewEdge& e = view.edges[ei];
        const int xt = res.labels[e.tail];
        if (e.kind == ViewEdge::Kind::dense) {
          const double* row = e.dense.cost.data() +
                              static_cast<size_t>(xt) * e.dense.cols;
          for (int l = 0; l < d; ++l) dib[l] += row[l];
        } else {
          const AgreementTable& t = e.agree;
          if (xt != t.eps) {
            for (int l = 0; l < d; ++l) {
              const std::int32_t x = t.expected[l];
              if (x >= 0 && x != xt) dib[l] += t.penalty;
            }
          }
        }
      }
      for (int l = 0; l < d; ++l) p.di[l] = dib[l];
      for (int ei : p.out_edges[i]) {
        const double* m = p.msg[ei].data();
        for (int l = 0; l < d; ++l) p.di[l] += m[l];
      }
      int best = 0;
      for (int l = 1; l < d; ++l) {
        if (p.di[l] < p.di[best]) best = l;
      }
      res.labels[i] = best;
      direct += dib[best];
    }
    res.energy = view.energy_of(res.labels);
    assert(std::fabs(direct - res.energy) <=
           1e-6 * std::max(1.0, std::fabs(res.energy)));
    (void)direct;
  };

  for (int iter = 1; iter <= opt.max_iters; ++iter) {
    // Forward pass: variables with no outgoing edges have nothing to send,
    // so their (possibly huge) di is not even gathered.
    for (int i = 0; i < V; ++i) {
      if (p.out_edges[i].empty()) continue;
      p.gather(i);
      for (int ei : p.out_edges[i]) p.send(ei, i, p.gamma[i]);
    }
    // Backward pass: banks every variable's normalization plus each
    // message's normalization into the lower bound.
    double bound = 0.0;
    for (int i = V - 1; i >= 0; --i) {
      if (p.fused_idx[i] >= 0) {
        bound += p.fused_head_backward(i);
        continue;
      }
      p.gather(i);
      const int d = view.domain[i];
      double delta = kInf;
      for (int l = 0; l < d; ++l) delta = std::min(delta, p.di[l]);
      bound += delta;
      if (!p.in_edges[i].empty()) {
        for (int l = 0; l < d; ++l) p.di[l] -= delta;
        for (int ei : p.in_edges[i]) bound += p.send(ei, i, p.gamma[i]);
      }
    }
    res.iterations = iter;
    if (opt.bound_trace != nullptr) opt.bound_trace->push_back(bound);
    assert(bound >= prev_bound - 1e-10);
    res.lower_bound = bound;
    // Extraction is not monotone in the iteration count, so the best
    // labeling seen so far is kept. Early iterations extract every time
    // (cheap instances meet the certificate almost immediately); later ones
    // amortize the sweep over a fixed period.
    const bool stalled =
        iter >= 2 &&
        bound - prev_bound <= opt.tol * std::max(1.0, std::fabs(bound));
    if (iter <= 10 || iter % 5 == 0 || stalled || iter == opt.max_iters) {
      extract();
      if (res.energy < best_energy) {
        best_energy = res.energy;
        best_labels = res.labels;
      }
      // Certificate stop: the best labeling meets the lower bound, so it is
      // optimal (within tol). Otherwise stop once the bound stalls.
      if (best_energy - bound <= opt.tol * std::max(1.0, std::fabs(bound))) {
        res.converged = true;
        break;
      }
    }
    if (stalled) {
      res.converged = true;
      break;
    }
    prev_bound = bound;
  }
  res.labels = std::move(best_labels);
  res.energy = best_energy;
  return res;
}

}  // namespace wordcrf
