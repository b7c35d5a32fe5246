#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wordcrf/detection.hpp"
#include "wordcrf/energy.hpp"
#include "wordcrf/factor_view.hpp"
#include "wordcrf/graph.hpp"
#include "wordcrf/inference.hpp"
#include "wordcrf/lexicon.hpp"
#include "wordcrf/ngram_model.hpp"

namespace wordcrf {

enum class VocabMode { closed, open };

struct RecognitionConfig {
  VocabMode mode = VocabMode::closed;
  bool case_sensitive = false;
  int order = 4;  // clique order, 2..6; 2 = pairwise only
  PotentialParams params;
  // lambda_a auto-switches to 1 in closed mode with a lexicon of at most
  // 1000 words unless explicitly set.
  bool lambda_a_set = false;
  PairwiseMode pairwise = PairwiseMode::lexicon;
  double proximity = 1.0;
  double gs_threshold = 0.1;
  double nms_threshold = 0.4;
  std::string lexicon_path;        // closed-mode prior + correction target
  std::string large_lexicon_path;  // open-mode prior
  std::string stats_path;          // empty: built-in font statistics
  int max_extended_labels = 200000;
  int trws_max_iters = 100;
  double trws_tol = 1e-6;
};

struct RecognitionResult {
  std::string word;      // corrected in closed mode
  std::string raw_word;  // plain label read-out
  double energy = 0;
  double lower_bound = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<int> node_labels;  // per node, epsilon = k
  std::vector<int> node_ids;     // window ids in node order
  int windows_in = 0, windows_kept = 0;
  double millis = 0;  // per-word path: prune through read-out
};

// Non-null labels concatenated in node order.
std::string read_out_word(const CandidateGraph& g,
                          std::span<const int> char_labels,
                          const Alphabet& alphabet);

// Nearest lexicon word by edit distance; ties resolve to the earliest
// lexicon entry. The lexicon must be non-empty.
std::string edit_distance_correct(const std::string& raw,
                                  const Lexicon& lexicon);

// Shared per-lexicon state (n-gram model, extended labels, aux unary table,
// aspect stats); read-only after construction, safe to share across threads.
class Recognizer {
 public:
  // Loads the prior lexicon from the config paths.
  explicit Recognizer(const RecognitionConfig& cfg);
  // Uses the given prior lexicon (already folded) instead of loading one.
  Recognizer(const RecognitionConfig& cfg, Lexicon prior);

  const Alphabet& alphabet() const { return alphabet_; }
  const Lexicon& prior_lexicon() const { return prior_; }
  const AspectStats& stats() const { return stats_; }
  const PotentialParams& resolved_params() const { return params_; }

  RecognitionResult recognize(const DetectionFile& detections,
                              double image_width) const;

 private:
  void finish_setup();

  RecognitionConfig cfg_;
  Alphabet alphabet_;
  Lexicon prior_;
  AspectStats stats_;
  PotentialParams params_;
  std::unique_ptr<NGramModel> model_;
  ExtendedLabelSet ext_;
  std::vector<double> aux_unary_;
};

}  // namespace wordcrf
