#pragma once

#include <span>
#include <string>
#include <vector>

#include "wordcrf/alphabet.hpp"
#include "wordcrf/detection.hpp"
#include "wordcrf/lexicon.hpp"

namespace wordcrf {

// One CRF character node, backed by a detection window.
struct GraphNode {
  int window = 0;  // index into the window span the graph was built from
  int id = 0;
  double center_x = 0, left = 0, right = 0, width = 0;
};

// Higher-order clique over n consecutive character nodes, decomposed via an
// auxiliary node whose labels are dictionary n-grams plus one invalid label.
struct AuxNode {
  int first = 0;  // members are nodes first .. first+order-1
};

struct CandidateGraph {
  std::vector<GraphNode> nodes;  // ascending center_x, ties by id
  std::vector<std::pair<int, int>> edges;  // node index pairs, i < j
  int order = 2;                           // clique order; 2 = pairwise only
  std::vector<AuxNode> aux;
};

// Nodes sorted left to right (center_x, ties by id, then window index).
CandidateGraph order_nodes(std::span<const DetectionWindow> windows);

// Connects every node pair whose horizontal extent gap is at most
// proximity * (mean window width); overlapping extents always connect.
void connect_edges(CandidateGraph& g, std::span<const DetectionWindow> windows,
                   double proximity = 1.0);

// T = round(image_width / mean window width), at least 1.
int estimate_char_count(std::span<const DetectionWindow> windows,
                        double image_width);

// One aux node per run of n consecutive nodes: max(0, N - n + 1) of them.
void insert_aux_nodes(CandidateGraph& g, int order);

// Distinct lexicon n-grams in first-occurrence order; label M is invalid.
struct ExtendedLabelSet {
  int arity = 0;
  std::vector<std::vector<int>> ngrams;

  int size_with_invalid() const { return static_cast<int>(ngrams.size()) + 1; }
  int invalid_label() const { return static_cast<int>(ngrams.size()); }

  static ExtendedLabelSet build(const Lexicon& lexicon,
                                const Alphabet& alphabet, int arity);
};

// Human-readable adjacency listing for debugging.
std::string dump_graph(const CandidateGraph& g);

}  // namespace wordcrf
