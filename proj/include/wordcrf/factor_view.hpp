#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wordcrf/energy.hpp"

namespace wordcrf {

// Flattened pairwise factor graph: variables with per-variable label
// domains, unary cost vectors, and pairwise cost tables on edges with
// tail < head in variable order. The CRF maps onto it with char nodes in
// reading order, each aux variable placed right after its last member.

struct DenseTable {
  int rows = 0, cols = 0;  // rows: tail labels, cols: head labels
  std::vector<double> cost;

  double at(int r, int c) const {
    return cost[static_cast<size_t>(r) * cols + c];
  }
};

// Structured member-agreement table (char tail, aux head):
//   cost(c, m) = 0 if expected[m] < 0 (free head label, e.g. invalid),
//                0 if c == eps (null char), 0 if expected[m] == c,
//                penalty otherwise.
// Never materialized; message updates run in O(|tail| + |head|).
struct AgreementTable {
  double penalty = 0;
  int eps = 0;                    // tail null label = tail domain - 1
  std::vector<std::int32_t> expected;  // per head label; -1 = free
  bool has_free = false;

  double at(int c, int m) const {
    if (expected[m] < 0 || c == eps || expected[m] == c) return 0.0;
    return penalty;
  }
};

struct ViewEdge {
  enum class Kind { dense, agreement };
  int tail = 0, head = 0;
  Kind kind = Kind::dense;
  DenseTable dense;
  AgreementTable agree;

  double cost(int lt, int lh) const {
    return kind == Kind::dense ? dense.at(lt, lh) : agree.at(lt, lh);
  }
};

struct FactorGraphView {
  std::vector<int> domain;
  std::vector<std::vector<double>> unary;
  std::vector<ViewEdge> edges;
  // Mapping back to the CRF; empty for hand-built views.
  std::vector<int> char_var;
  std::vector<int> aux_var;

  int num_vars() const { return static_cast<int>(domain.size()); }
  double energy_of(std::span<const int> labels) const;
  // Structural checks: domain/unary/table sizes, finite costs,
  // non-negative agreement penalties, tail < head.
  void validate() const;
};

struct FactorViewOptions {
  int max_extended_labels = 200000;
  // Optional precomputed aux unary vector (size M+1) shared across images.
  const std::vector<double>* shared_aux_unary = nullptr;
};

FactorGraphView build_factor_view(const EnergyModel& em,
                                  const FactorViewOptions& opt = {});

}  // namespace wordcrf
