#pragma once

#include <vector>

#include "wordcrf/factor_view.hpp"

namespace wordcrf {

struct InferenceResult {
  std::vector<int> labels;
  double energy = 0;       // energy_of(labels), exact factor-view sum
  double lower_bound = 0;
  int iterations = 0;
  bool converged = false;
};

struct TrwsOptions {
  int max_iters = 100;
  double tol = 1e-6;  // stop when relative bound improvement drops below
  std::vector<double>* bound_trace = nullptr;  // per-iteration lower bounds
};

// Sequential tree-reweighted message passing over monotonic chains.
// Processes variables in index order (reverse on the backward pass); the
// lower bound is collected on backward passes and never decreases.
// Labelings are extracted on a fixed cadence (extraction cost is amortized
// on long runs) and the best one seen is returned; the run stops once the
// best energy meets the bound or the bound stalls.
InferenceResult trws_minimize(const FactorGraphView& view,
                              const TrwsOptions& opt = {});

// Exhaustive minimization; ties resolved toward the lexicographically
// smallest labeling. Errors when the label-space product exceeds `guard`.
// The OpenMP variant splits the flattened index space and returns exactly
// the serial result.
InferenceResult brute_force_minimize(const FactorGraphView& view,
                                     double guard = 1e7);
InferenceResult brute_force_minimize_serial(const FactorGraphView& view,
                                            double guard = 1e7);

}  // namespace wordcrf
