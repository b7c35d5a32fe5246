#include "wordcrf/energy.hpp"

#include <cmath>

#include "wordcrf/common.hpp"

namespace wordcrf {

double unary_cost(const DetectionWindow& w, int label) {
  require(label >= 0 && label < static_cast<int>(w.scores.size()),
          "energy: unary label ", label, " out of range");
  return 1.0 - w.scores[label];
}

double null_unary_cost(const DetectionWindow& w, const AspectStats& stats) {
  stats.check(static_cast<int>(w.scores.size()));
  const int c = w.argmax_class();
  const double d = stats.mean[c] - w.aspect();
  return w.scores[c] * std::exp(-(d * d) / (stats.sigma[c] * stats.sigma[c]));
}

double lexicon_pair_cost(double p, const PotentialParams& params) {
  return params.lambda_l * std::exp(-params.beta * p);
}

double overlap_pair_cost(double overlap, const PotentialParams& params) {
  const double d = 1.0 - overlap;
  return params.lambda_o * std::exp(-params.beta * d * d);
}

double pairwise_lexicon_cost(int first_label, int second_label,
                             const NGramModel& model,
                             const PotentialParams& params) {
  const int t[2] = {first_label, second_label};
  return lexicon_pair_cost(model.score(t), params);
}

double pairwise_roi_cost(int first_label, int second_label, int part,
                         const RoiPairTable& table,
                         const PotentialParams& params) {
  return table.valid(part, first_label, second_label) ? 0.0 : params.lambda_l;
}

double pairwise_null_cost(const DetectionWindow& a, const DetectionWindow& b,
                          const PotentialParams& params) {
  return overlap_pair_cost(iou(a, b), params);
}

double aux_unary_cost(const ExtendedLabelSet& ext, int ext_label,
                      const NGramModel& model, const PotentialParams& params) {
  require(ext_label >= 0 && ext_label <= ext.invalid_label(),
          "energy: extended label ", ext_label, " out of range");
  if (ext_label == ext.invalid_label()) return params.lambda_a;
  return params.lambda_a *
         std::exp(-params.beta * model.score_extended(ext.ngrams[ext_label]));
}

double aux_pairwise_cost(const ExtendedLabelSet& ext, int ext_label, int q,
                         int char_label, int epsilon,
                         const PotentialParams& params) {
  require(ext_label >= 0 && ext_label <= ext.invalid_label(),
          "energy: extended label ", ext_label, " out of range");
  require(q >= 0 && q < ext.arity, "energy: member position ", q,
          " outside [0,", ext.arity, ")");
  require(char_label >= 0 && char_label <= epsilon, "energy: char label ",
          char_label, " out of range");
  if (ext_label == ext.invalid_label()) return 0.0;
  if (char_label == epsilon) return 0.0;
  return ext.ngrams[ext_label][q] == char_label ? 0.0 : params.lambda_b;
}

static std::vector<double> aux_unary_impl(const ExtendedLabelSet& ext,
                                          const NGramModel& model,
                                          const PotentialParams& params,
                                          bool parallel) {
  const int m = static_cast<int>(ext.ngrams.size());
  std::vector<double> out(static_cast<size_t>(m) + 1);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (int i = 0; i < m; ++i) {
    out[i] = params.lambda_a *
             std::exp(-params.beta * model.score_extended(ext.ngrams[i]));
  }
  (void)parallel;
  out[m] = params.lambda_a;
  return out;
}

std::vector<double> build_aux_unary_costs(const ExtendedLabelSet& ext,
                                          const NGramModel& model,
                                          const PotentialParams& params) {
  return aux_unary_impl(ext, model, params, true);
}

std::vector<double> build_aux_unary_costs_serial(const ExtendedLabelSet& ext,
                                                 const NGramModel& model,
                                                 const PotentialParams& params) {
  return aux_unary_impl(ext, model, params, false);
}

int EnergyModel::node_part(int node) const {
  const double cx = graph->nodes[node].center_x;
  const double region = image_width / parts;
  const int t = static_cast<int>(std::ceil(cx / region));
  return std::min(std::max(t, 1), parts);
}

void EnergyModel::check() const {
  require(graph != nullptr && model != nullptr && stats != nullptr,
          "energy: model is missing graph, n-gram model, or aspect stats");
  require(mode != PairwiseMode::roi || roi != nullptr,
          "energy: roi mode needs a pair table");
  require(graph->order == 2 || ext != nullptr,
          "energy: clique order ", graph->order, " needs an extended label set");
  require(ext == nullptr || graph->order == 2 || ext->arity == graph->order,
          "energy: extended label arity ", ext ? ext->arity : 0,
          " != clique order ", graph->order);
  require(image_width > 0.0, "energy: image width must be positive");
  require(parts >= 1, "energy: parts must be >= 1");
  for (const GraphNode& n : graph->nodes) {
    require(n.window >= 0 && n.window < static_cast<int>(windows.size()),
            "energy: node window index out of range");
    require(static_cast<int>(windows[n.window].scores.size()) == num_classes(),
            "energy: window ", n.id, " has ", windows[n.window].scores.size(),
            " scores, alphabet has ", num_classes());
  }
}

double EnergyModel::char_unary(int i, int li) const {
  const DetectionWindow& w = windows[graph->nodes[i].window];
  if (li == epsilon()) return null_unary_cost(w, *stats);
  return unary_cost(w, li);
}

double EnergyModel::edge_cost(int i, int j, int li, int lj) const {
  const bool ei = li == epsilon(), ej = lj == epsilon();
  if (ei && ej) return 0.0;
  const DetectionWindow& wi = windows[graph->nodes[i].window];
  const DetectionWindow& wj = windows[graph->nodes[j].window];
  if (ei != ej) return pairwise_null_cost(wi, wj, params);
  if (mode == PairwiseMode::lexicon) {
    return pairwise_lexicon_cost(li, lj, *model, params);
  }
  return pairwise_roi_cost(li, lj, node_part(i), *roi, params);
}

double total_energy(const EnergyModel& em, const Labeling& labeling) {
  em.check();
  const CandidateGraph& g = *em.graph;
  require(labeling.char_labels.size() == g.nodes.size(),
          "energy: labeling has ", labeling.char_labels.size(),
          " char labels, graph has ", g.nodes.size(), " nodes");
  require(labeling.aux_labels.size() == g.aux.size(), "energy: labeling has ",
          labeling.aux_labels.size(), " aux labels, graph has ", g.aux.size());
  const int eps = em.epsilon();
  for (int li : labeling.char_labels) {
    require(li >= 0 && li <= eps, "energy: char label ", li, " out of range");
  }
  double e = 0.0;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    e += em.char_unary(static_cast<int>(i), labeling.char_labels[i]);
  }
  for (const auto& [i, j] : g.edges) {
    e += em.edge_cost(i, j, labeling.char_labels[i], labeling.char_labels[j]);
  }
  for (size_t a = 0; a < g.aux.size(); ++a) {
    const int m = labeling.aux_labels[a];
    e += aux_unary_cost(*em.ext, m, *em.model, em.params);
    for (int q = 0; q < g.order; ++q) {
      const int node = g.aux[a].first + q;
      e += aux_pairwise_cost(*em.ext, m, q, labeling.char_labels[node], eps,
                             em.params);
    }
  }
  return e;
}

}  // namespace wordcrf
