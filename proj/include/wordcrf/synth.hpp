#pragma once

#include <cstdint>
#include <string>

#include "wordcrf/alphabet.hpp"
#include "wordcrf/lexicon.hpp"

namespace wordcrf {

// Synthetic word-image corpus rendered with the built-in glyphs and scored
// by the template classifier. Per entry: a detections file with one true
// window per character plus injected inter-character false positives
// (glyph-straddle windows at fp_rate per gap, near-blank gap windows at
// fp_rate/2), and a .truth sidecar with the word and true boxes.
// `corruption` is the per-window probability of swapping the top score onto
// a random class. Output is byte-deterministic for a given seed.
struct SynthOptions {
  int count = 200;
  double corruption = 0.0;
  double fp_rate = 0.3;
  std::uint64_t seed = 1;
  int height = 32;
  int gap = 4;
  int margin = 4;
};

struct SynthSummary {
  std::string manifest_path;
  int entries = 0;
  int true_windows = 0;
  int fp_windows = 0;
};

// Writes entry_%04d.det / .truth, stats.txt, lexicon.txt, manifest.txt
// into out_dir (created if missing). Words are sampled with replacement.
SynthSummary synth_corpus(const Lexicon& lexicon, const Alphabet& alphabet,
                          const SynthOptions& opt, const std::string& out_dir);

struct TruthSidecar {
  std::string word;
  // Reuses the glyph cell geometry: c, center_x, center_y, width, height.
  struct Box {
    char c = 0;
    double center_x = 0, center_y = 0, width = 0, height = 0;
  };
  std::vector<Box> boxes;
};

TruthSidecar load_truth_sidecar(const std::string& path);

}  // namespace wordcrf
