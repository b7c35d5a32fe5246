#include <algorithm>
#include <cmath>
#include <cstdint>

#include "wordcrf/common.hpp"
#include "wordcrf/inference.hpp"

namespace wordcrf {

namespace {

// Flat index <-> labeling with the first variable most significant, so
// ascending flat order is lexicographic and the tie rule is "first wins".
void decode(std::uint64_t idx, const std::vector<int>& domain,
            std::vector<int>& labels) {
  for (int v = static_cast<int>(domain.size()) - 1; v >= 0; --v) {
    labels[v] = static_cast<int>(idx % domain[v]);
    idx /= domain[v];
  }
}

InferenceResult brute_force_impl(const FactorGraphView& view, double guard,
                                 bool parallel) {
  view.validate();
  require(guard >= 1.0, "brute force: guard must be >= 1");
  InferenceResult res;
  res.converged = true;
  if (view.num_vars() == 0) return res;

  double product = 1.0;
  for (int d : view.domain) product *= static_cast<double>(d);
  require(product <= guard, "brute force: label space of ", product,
          " combinations exceeds the guard of ", guard);
  const std::uint64_t total = static_cast<std::uint64_t>(product);

  const int V = view.num_vars();
  double best_e = 0.0;
  std::uint64_t best_idx = 0;
  bool have_best = false;

  const std::uint64_t chunk = std::max<std::uint64_t>(1, total / 64);
  const std::int64_t n_chunks =
      static_cast<std::int64_t>((total + chunk - 1) / chunk);

#ifdef _OPENMP
#pragma omp parallel if (parallel)
#endif
  {
    std::vector<int> labels(static_cast<size_t>(V));
    double loc_e = 0.0;
    std::uint64_t loc_idx = 0;
    bool loc_have = false;
#ifdef _OPENMP
#pragma omp for schedule(dynamic) nowait
#endif
    for (std::int64_t c = 0; c < n_chunks; ++c) {
      const std::uint64_t lo = static_cast<std::uint64_t>(c) * chunk;
      const std::uint64_t hi = std::min(total, lo + chunk);
      decode(lo, view.domain, labels);
      for (std::uint64_t idx = lo; idx < hi; ++idx) {
        const double e = view.energy_of(labels);
        if (!loc_have || e < loc_e) {
          loc_have = true;
          loc_e = e;
          loc_idx = idx;
        }
        // Odometer step, least significant variable last.
        for (int v = V - 1; v >= 0; --v) {
          if (++labels[v] < view.domain[v]) break;
          labels[v] = 0;
        }
      }
    }
#ifdef _OPENMP
#pragma omp critical
#endif
    {
      if (loc_have && (!have_best || loc_e < best_e ||
                       (loc_e == best_e && loc_idx < best_idx))) {
        have_best = true;
        best_e = loc_e;
        best_idx = loc_idx;
      }
    }
  }
  (void)parallel;

  res.labels.assign(static_cast<size_t>(V), 0);
  decode(best_idx, view.domain, res.labels);
  res.energy = view.energy_of(res.labels);
  res.lower_bound = res.energy;
  return res;
}

}  // namespace

InferenceResult brute_force_minimize(const FactorGraphView& view,
                                     double guard) {
  return brute_force_impl(view, guard, true);
}

InferenceResult brute_force_minimize_serial(const FactorGraphView& view,
                                            double guard) {
  return brute_force_impl(view, guard, false);
}

}  // namespace wordcrf
