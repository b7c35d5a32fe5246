#include "wordcrf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "wordcrf/common.hpp"

namespace wordcrf {

CandidateGraph order_nodes(std::span<const DetectionWindow> windows) {
  CandidateGraph g;
  g.nodes.reserve(windows.size());
  for (size_t i = 0; i < windows.size(); ++i) {
    const DetectionWindow& w = windows[i];
    GraphNode n;
    n.window = static_cast<int>(i);
    n.id = w.id;
    n.center_x = w.center_x;
    n.left = w.left();
    n.right = w.right();
    n.width = w.width;
    g.nodes.push_back(n);
  }
  std::sort(g.nodes.begin(), g.nodes.end(),
            [](const GraphNode& a, const GraphNode& b) {
              if (a.center_x != b.center_x) return a.center_x < b.center_x;
              if (a.id != b.id) return a.id < b.id;
              return a.window < b.window;
            });
  return g;
}

void connect_edges(CandidateGraph& g, std::span<const DetectionWindow> windows,
                   double proximity) {
  require(proximity >= 0.0, "graph: proximity must be non-negative");
  g.edges.clear();
  if (g.nodes.size() < 2) return;
  double mean_w = 0.0;
  for (const DetectionWindow& w : windows) mean_w += w.width;
  mean_w /= static_cast<double>(windows.size());
  const double reach = proximity * mean_w;
  const int n = static_cast<int>(g.nodes.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double gap = g.nodes[j].left - g.nodes[i].right;
      if (gap <= reach) g.edges.emplace_back(i, j);
    }
  }
}

int estimate_char_count(std::span<const DetectionWindow> windows,
                        double image_width) {
  require(image_width > 0.0, "graph: image width must be positive");
  require(!windows.empty(), "graph: character count needs detections");
  double mean_w = 0.0;
  for (const DetectionWindow& w : windows) mean_w += w.width;
  mean_w /= static_cast<double>(windows.size());
  const int t = static_cast<int>(std::lround(image_width / mean_w));
  return std::max(1, t);
}

void insert_aux_nodes(CandidateGraph& g, int order) {
  require(order >= 2 && order <= 6, "graph: clique order ", order,
          " outside {2..6}");
  g.order = order;
  g.aux.clear();
  if (order == 2) return;
  const int n = static_cast<int>(g.nodes.size());
  for (int first = 0; first + order <= n; ++first) {
    g.aux.push_back(AuxNode{first});
  }
}

ExtendedLabelSet ExtendedLabelSet::build(const Lexicon& lexicon,
                                         const Alphabet& alphabet, int arity) {
  require(arity >= 3 && arity <= 6, "extended label set: arity ", arity,
          " outside {3..6}");
  ExtendedLabelSet s;
  s.arity = arity;
  std::set<std::string> seen;
  for (const std::string& w : lexicon.words()) {
    if (static_cast<int>(w.size()) < arity) continue;
    for (size_t p = 0; p + arity <= w.size(); ++p) {
      std::string sub = w.substr(p, arity);
      if (!seen.insert(sub).second) continue;
      std::vector<int> t(arity);
      for (int q = 0; q < arity; ++q) t[q] = alphabet.index_of(sub[q]);
      s.ngrams.push_back(std::move(t));
    }
  }
  return s;
}

std::string dump_graph(const CandidateGraph& g) {
  std::ostringstream os;
  char buf[128];
  os << "nodes " << g.nodes.size() << "\n";
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const GraphNode& n = g.nodes[i];
    std::snprintf(buf, sizeof buf, "%zu id=%d cx=%.6g [%.6g,%.6g]\n", i, n.id,
                  n.center_x, n.left, n.right);
    os << buf;
  }
  os << "edges " << g.edges.size() << "\n";
  for (const auto& [i, j] : g.edges) os << i << "-" << j << "\n";
  os << "order " << g.order << "\n";
  os << "aux " << g.aux.size() << "\n";
  for (size_t a = 0; a < g.aux.size(); ++a) {
    os << a << ":[";
    for (int q = 0; q < g.order; ++q) {
      if (q) os << ",";
      os << g.aux[a].first + q;
    }
    os << "]\n";
  }
  return os.str();
}

}  // namespace wordcrf
