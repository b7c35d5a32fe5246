#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wordcrf/detection.hpp"
#include "wordcrf/graph.hpp"
#include "wordcrf/ngram_model.hpp"
#include "wordcrf/roi_table.hpp"

namespace wordcrf {

struct PotentialParams {
  double lambda_l = 2.0;  // lexicon / roi pairwise weight
  double lambda_o = 2.0;  // overlap (null pairwise) weight
  double lambda_a = 5.0;  // aux unary weight
  double lambda_b = 1.0;  // aux-member disagreement penalty
  double beta = 50.0;     // exponential sharpness
};

enum class PairwiseMode { lexicon, roi };

// Formula-level potentials.

// 1 - p(label); label is a class index.
double unary_cost(const DetectionWindow& w, int label);
// Null label: p_hat * exp(-(mu_c - aspect)^2 / sigma_c^2) for the argmax
// class c (note: sigma^2, not 2 sigma^2).
double null_unary_cost(const DetectionWindow& w, const AspectStats& stats);
// lambda_l * exp(-beta * p).
double lexicon_pair_cost(double p, const PotentialParams& params);
// lambda_o * exp(-beta * (1 - overlap)^2).
double overlap_pair_cost(double overlap, const PotentialParams& params);

// Model-bound potentials.
double pairwise_lexicon_cost(int first_label, int second_label,
                             const NGramModel& model,
                             const PotentialParams& params);
// 0 when the pair is valid in region `part`, lambda_l otherwise.
double pairwise_roi_cost(int first_label, int second_label, int part,
                         const RoiPairTable& table,
                         const PotentialParams& params);
double pairwise_null_cost(const DetectionWindow& a, const DetectionWindow& b,
                          const PotentialParams& params);
// lambda_a for the invalid label, lambda_a * exp(-beta * P(ngram)) otherwise.
double aux_unary_cost(const ExtendedLabelSet& ext, int ext_label,
                      const NGramModel& model, const PotentialParams& params);
// Member agreement: 0 if the member is null, matches position q of the
// n-gram, or the aux label is invalid; lambda_b otherwise. q is 0-based,
// epsilon is the char-side null index.
double aux_pairwise_cost(const ExtendedLabelSet& ext, int ext_label, int q,
                         int char_label, int epsilon,
                         const PotentialParams& params);

// Aux unary costs for all extended labels (size M+1, invalid last). The
// OpenMP variant splits the label range; results match the serial one.
std::vector<double> build_aux_unary_costs(const ExtendedLabelSet& ext,
                                          const NGramModel& model,
                                          const PotentialParams& params);
std::vector<double> build_aux_unary_costs_serial(const ExtendedLabelSet& ext,
                                                 const NGramModel& model,
                                                 const PotentialParams& params);

// Everything needed to evaluate the CRF energy of one image's graph.
struct EnergyModel {
  const CandidateGraph* graph = nullptr;
  std::span<const DetectionWindow> windows;
  const NGramModel* model = nullptr;
  const AspectStats* stats = nullptr;
  const RoiPairTable* roi = nullptr;        // required in roi mode
  const ExtendedLabelSet* ext = nullptr;    // required when graph->order > 2
  PotentialParams params;
  PairwiseMode mode = PairwiseMode::lexicon;
  double image_width = 0;
  int parts = 1;  // T

  int num_classes() const { return model->alphabet().size(); }
  int epsilon() const { return num_classes(); }
  // Region of a node: clamp(ceil(cx / (image_width / T)), 1, T).
  int node_part(int node) const;
  void check() const;
  // Cost of edge (i,j) given char labels (epsilon() = null).
  double edge_cost(int i, int j, int li, int lj) const;
  double char_unary(int i, int li) const;
};

struct Labeling {
  std::vector<int> char_labels;  // per node; epsilon = k
  std::vector<int> aux_labels;   // per aux node; invalid = M
};

// Full CRF energy: char unaries + edge pairwise + aux unaries + member
// agreement terms.
double total_energy(const EnergyModel& em, const Labeling& labeling);

}  // namespace wordcrf
