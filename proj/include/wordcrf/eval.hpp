#pragma once

#include <string>
#include <vector>

#include "wordcrf/recognizer.hpp"

namespace wordcrf {

struct CorpusEntry {
  std::string detections_path;
  int image_width = 0;
  std::string ground_truth;
  std::string lexicon_path;  // optional per-entry prior
};

// Manifest lines: <detections> <image_width> <ground_truth> [lexicon]
// Paths are resolved relative to the manifest's directory.
std::vector<CorpusEntry> load_manifest(const std::string& path);

struct EvalEntryResult {
  std::string truth;
  std::string word;
  std::string raw_word;
  bool correct = false;
  bool in_dictionary = false;
  double millis = 0;
  double energy = 0;
  double lower_bound = 0;
};

struct EvalReport {
  int total = 0;
  int correct = 0;
  double accuracy = 0;  // percent
  int dict_total = 0;
  int dict_correct = 0;
  int nondict_total = 0;
  int nondict_correct = 0;
  double mean_ms = 0;
  double p50_ms = 0;
  double p90_ms = 0;
  double p99_ms = 0;
  std::vector<EvalEntryResult> entries;
};

// Runs the recognizer over every entry. Per-entry priors are loaded once
// per distinct lexicon path. With workers > 1 the entries are processed in
// an OpenMP pool; the report is identical for any worker count.
EvalReport evaluate(const std::vector<CorpusEntry>& entries,
                    const RecognitionConfig& cfg, int workers = 1);

std::string report_to_json(const EvalReport& report);

struct AblationRow {
  std::string name;  // unary, pairwise, order3..order6
  int order = 0;
  int total = 0;
  int correct = 0;
  double accuracy = 0;  // percent
};

// Re-runs the corpus with the prior progressively enabled: unary only,
// adjacency pairwise, then full chains of order 3..6. All rows run in
// open-vocabulary mode so accuracy reflects the energy model alone.
std::vector<AblationRow> ablation(const std::vector<CorpusEntry>& entries,
                                  const RecognitionConfig& base_cfg,
                                  int workers = 1);

std::string ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace wordcrf
