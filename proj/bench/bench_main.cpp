// Times each OpenMP kernel against its serial reference and checks that the
// outputs agree. Not a correctness gate; numbers depend on the machine.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "../tests/support/randomview.hpp"
#include "../tests/support/testlex.hpp"
#include "wordcrf/detection.hpp"
#include "wordcrf/energy.hpp"
#include "wordcrf/eval.hpp"
#include "wordcrf/font.hpp"
#include "wordcrf/inference.hpp"
#include "wordcrf/lexicon.hpp"
#include "wordcrf/ngram_model.hpp"
#include "wordcrf/synth.hpp"

using namespace wordcrf;

namespace {

template <typename F>
double time_ms(F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void row(const char* name, double serial_ms, double parallel_ms, bool equal) {
  std::printf("%-24s serial %9.2f ms   openmp %9.2f ms   speedup %5.2fx   %s\n",
              name, serial_ms, parallel_ms,
              parallel_ms > 0 ? serial_ms / parallel_ms : 0.0,
              equal ? "outputs equal" : "OUTPUTS DIFFER");
}

void bench_sliding_window() {
  const Alphabet a = Alphabet::case_insensitive();
  const WordRender render = render_word("BENCHMARKINGWINDOWS", 48, 6, 8);
  const TemplateScoreProvider provider(a);
  const std::vector<WindowSize> scales = {{32, 48}, {40, 48}, {48, 48}};

  std::vector<DetectionWindow> serial, parallel;
  const double ts = time_ms([&] {
    serial = sliding_window_detect_serial(render.image, provider, scales, 4);
  });
  const double tp = time_ms([&] {
    parallel = sliding_window_detect(render.image, provider, scales, 4);
  });
  bool equal = serial.size() == parallel.size();
  for (size_t i = 0; equal && i < serial.size(); ++i) {
    equal = serial[i].id == parallel[i].id &&
            serial[i].center_x == parallel[i].center_x &&
            serial[i].scores == parallel[i].scores;
  }
  row("sliding-window", ts, tp, equal);
}

void bench_brute_force() {
  std::mt19937_64 rng(11);
  const FactorGraphView view =
      testview::random_aux_instance(rng, 5, 5, 5, 3, 5e6);
  InferenceResult serial, parallel;
  const double ts =
      time_ms([&] { serial = brute_force_minimize_serial(view, 1e7); });
  const double tp = time_ms([&] { parallel = brute_force_minimize(view, 1e7); });
  const bool equal =
      serial.energy == parallel.energy && serial.labels == parallel.labels;
  row("brute-force", ts, tp, equal);
}

void bench_aux_unary() {
  const Alphabet a = Alphabet::case_insensitive();
  const Lexicon lex(testlex::pseudo_words(20000, 21), a);
  const NGramModel model = NGramModel::build(lex, a, 4);
  const ExtendedLabelSet ext = ExtendedLabelSet::build(lex, a, 4);
  const PotentialParams params;

  std::vector<double> serial, parallel;
  const double ts = time_ms(
      [&] { serial = build_aux_unary_costs_serial(ext, model, params); });
  const double tp =
      time_ms([&] { parallel = build_aux_unary_costs(ext, model, params); });
  row("aux-unary-table", ts, tp, serial == parallel);
  std::printf("%-24s (%zu extended labels)\n", "", serial.size());
}

void bench_evaluate() {
  const Alphabet a = Alphabet::case_insensitive();
  const Lexicon lex(testlex::corpus_words(), a);
  const auto dir = testlex::fresh_dir("bench_eval");
  SynthOptions opt;
  opt.count = 60;
  opt.corruption = 0.25;
  opt.fp_rate = 0.25;
  opt.seed = 31;
  const auto sum = synth_corpus(lex, a, opt, (dir / "corpus").string());
  const auto entries = load_manifest(sum.manifest_path);

  RecognitionConfig cfg;
  cfg.mode = VocabMode::closed;
  cfg.order = 4;

  EvalReport serial, parallel;
  const double ts = time_ms([&] { serial = evaluate(entries, cfg, 1); });
  const double tp = time_ms([&] { parallel = evaluate(entries, cfg, 4); });
  bool equal = serial.correct == parallel.correct &&
               serial.entries.size() == parallel.entries.size();
  for (size_t i = 0; equal && i < serial.entries.size(); ++i) {
    equal = serial.entries[i].word == parallel.entries[i].word &&
            serial.entries[i].energy == parallel.entries[i].energy;
  }
  row("evaluate-corpus", ts, tp, equal);
  std::filesystem::remove_all(dir);
}

}  // namespace

int main() {
  bench_sliding_window();
  bench_brute_force();
  bench_aux_unary();
  bench_evaluate();
  return 0;
}
