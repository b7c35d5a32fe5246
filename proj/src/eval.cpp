#include "wordcrf/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "wordcrf/common.hpp"

namespace fs = std::filesystem;

namespace wordcrf {

namespace {

std::string resolve(const fs::path& base_dir, const std::string& p) {
  fs::path q(p);
  if (q.is_absolute()) return q.lexically_normal().string();
  return (base_dir / q).lexically_normal().string();
}

// Nearest-rank percentile over an ascending sample.
double nearest_rank(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0;
  const size_t n = sorted.size();
  size_t rank = static_cast<size_t>(std::ceil(q / 100.0 * n));
  rank = std::clamp<size_t>(rank, 1, n);
  return sorted[rank - 1];
}

std::string prior_path_for(const CorpusEntry& e, const RecognitionConfig& cfg) {
  if (cfg.mode == VocabMode::closed) {
    if (!e.lexicon_path.empty()) return e.lexicon_path;
    if (!cfg.lexicon_path.empty()) return cfg.lexicon_path;
    fail("closed-vocabulary evaluation needs a lexicon for ",
         e.detections_path);
  }
  if (!cfg.large_lexicon_path.empty()) return cfg.large_lexicon_path;
  if (!e.lexicon_path.empty()) return e.lexicon_path;
  fail("open-vocabulary evaluation needs a large lexicon for ",
       e.detections_path);
}

}  // namespace

std::vector<CorpusEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open manifest: ", path);
  const fs::path base = fs::path(path).parent_path();
  std::vector<CorpusEntry> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string det;
    ss >> det;
    if (det.empty() || det[0] == '#') continue;
    CorpusEntry e;
    ss >> e.image_width >> e.ground_truth;
    require(!ss.fail() && !e.ground_truth.empty(), path, ":", line_no,
            ": expected <detections> <image_width> <ground_truth> [lexicon]");
    require(e.image_width > 0, path, ":", line_no,
            ": image width must be positive");
    std::string lex;
    if (ss >> lex) {
      std::string extra;
      require(!(ss >> extra), path, ":", line_no, ": trailing tokens");
    }
    e.detections_path = resolve(base, det);
    if (!lex.empty()) e.lexicon_path = resolve(base, lex);
    out.push_back(std::move(e));
  }
  return out;
}

EvalReport evaluate(const std::vector<CorpusEntry>& entries,
                    const RecognitionConfig& cfg, int workers) {
  require(workers >= 1, "evaluate: workers must be >= 1");
  EvalReport rep;
  rep.entries.resize(entries.size());
  if (entries.empty()) return rep;

  // One recognizer per distinct prior path; built serially, shared read-only
  // by the worker pool.
  std::map<std::string, std::unique_ptr<Recognizer>> pool;
  std::vector<const Recognizer*> rec(entries.size(), nullptr);
  for (size_t i = 0; i < entries.size(); ++i) {
    const std::string p = prior_path_for(entries[i], cfg);
    auto it = pool.find(p);
    if (it == pool.end()) {
      RecognitionConfig c = cfg;
      if (cfg.mode == VocabMode::closed) {
        c.lexicon_path = p;
      } else {
        c.large_lexicon_path = p;
      }
      it = pool.emplace(p, std::make_unique<Recognizer>(c)).first;
    }
    rec[i] = it->second.get();
  }

  // Dictionary membership is judged against the large lexicon when one is
  // configured, otherwise against each entry's own prior.
  const Lexicon* dict_global = nullptr;
  std::unique_ptr<Lexicon> dict_owned;
  if (!cfg.large_lexicon_path.empty()) {
    if (cfg.mode == VocabMode::open) {
      dict_global = &rec[0]->prior_lexicon();
    } else {
      dict_owned = std::make_unique<Lexicon>(
          load_lexicon(cfg.large_lexicon_path, rec[0]->alphabet()));
      dict_global = dict_owned.get();
    }
  }

  std::vector<std::string> errors(entries.size());
  std::atomic<bool> failed{false};
  const int n = static_cast<int>(entries.size());
#pragma omp parallel for schedule(dynamic) num_threads(workers) \
    if (workers > 1)
  for (int i = 0; i < n; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      const CorpusEntry& e = entries[i];
      const Recognizer& r = *rec[i];
      const std::string truth = r.alphabet().fold_word(e.ground_truth);
      for (char c : truth) {
        require(r.alphabet().index_of(c) >= 0, "ground truth '",
                e.ground_truth, "' has a symbol outside the alphabet");
      }
      const DetectionFile det = ingest_detections(e.detections_path);
      const RecognitionResult res = r.recognize(det, e.image_width);
      EvalEntryResult& out = rep.entries[i];
      out.truth = truth;
      out.word = res.word;
      out.raw_word = res.raw_word;
      out.correct = (res.word == truth);
      const Lexicon& dict = dict_global ? *dict_global : r.prior_lexicon();
      out.in_dictionary = dict.contains(truth);
      out.millis = res.millis;
      out.energy = res.energy;
      out.lower_bound = res.lower_bound;
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
      failed.store(true, std::memory_order_relaxed);
    }
  }
  if (failed.load()) {
    for (const std::string& m : errors) {
      if (!m.empty()) fail(m);
    }
  }

  std::vector<double> ms;
  ms.reserve(entries.size());
  for (const EvalEntryResult& e : rep.entries) {
    ++rep.total;
    rep.correct += e.correct ? 1 : 0;
    if (e.in_dictionary) {
      ++rep.dict_total;
      rep.dict_correct += e.correct ? 1 : 0;
    } else {
      ++rep.nondict_total;
      rep.nondict_correct += e.correct ? 1 : 0;
    }
    rep.mean_ms += e.millis;
    ms.push_back(e.millis);
  }
  rep.accuracy = 100.0 * rep.correct / rep.total;
  rep.mean_ms /= rep.total;
  std::sort(ms.begin(), ms.end());
  rep.p50_ms = nearest_rank(ms, 50);
  rep.p90_ms = nearest_rank(ms, 90);
  rep.p99_ms = nearest_rank(ms, 99);
  return rep;
}

std::string report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["total"] = r.total;
  j["correct"] = r.correct;
  j["accuracy"] = r.accuracy;
  j["dictionary"] = {{"total", r.dict_total}, {"correct", r.dict_correct}};
  j["non_dictionary"] = {{"total", r.nondict_total},
                         {"correct", r.nondict_correct}};
  j["timing_ms"] = {{"mean", r.mean_ms},
                    {"p50", r.p50_ms},
                    {"p90", r.p90_ms},
                    {"p99", r.p99_ms}};
  auto arr = nlohmann::ordered_json::array();
  for (const EvalEntryResult& e : r.entries) {
    arr.push_back({{"truth", e.truth},
                   {"word", e.word},
                   {"raw_word", e.raw_word},
                   {"correct", e.correct},
                   {"in_dictionary", e.in_dictionary},
                   {"millis", e.millis},
                   {"energy", e.energy},
                   {"lower_bound", e.lower_bound}});
  }
  j["entries"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::vector<AblationRow> ablation(const std::vector<CorpusEntry>& entries,
                                  const RecognitionConfig& base_cfg,
                                  int workers) {
  struct Variant {
    const char* name;
    int order;
    bool zero_pairwise;
  };
  static constexpr Variant kVariants[] = {
      {"unary", 2, true},    {"pairwise", 2, false}, {"order3", 3, false},
      {"order4", 4, false},  {"order5", 5, false},   {"order6", 6, false},
  };
  std::vector<AblationRow> rows;
  for (const Variant& v : kVariants) {
    RecognitionConfig cfg = base_cfg;
    cfg.mode = VocabMode::open;
    cfg.order = v.order;
    if (v.zero_pairwise) {
      cfg.params.lambda_l = 0;
      cfg.params.lambda_o = 0;
    }
    const EvalReport rep = evaluate(entries, cfg, workers);
    AblationRow row;
    row.name = v.name;
    row.order = v.order;
    row.total = rep.total;
    row.correct = rep.correct;
    row.accuracy = rep.total ? 100.0 * rep.correct / rep.total : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "mode,order,total,correct,accuracy\n";
  char buf[64];
  for (const AblationRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.4f", r.accuracy);
    out << r.name << "," << r.order << "," << r.total << "," << r.correct
        << "," << buf << "\n";
  }
  return out.str();
}

}  // namespace wordcrf
