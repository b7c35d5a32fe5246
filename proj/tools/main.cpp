#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wordcrf/common.hpp"
#include "wordcrf/eval.hpp"
#include "wordcrf/synth.hpp"

namespace {

using nlohmann::json;
using namespace wordcrf;

VocabMode parse_mode(const std::string& s) {
  if (s == "closed") return VocabMode::closed;
  if (s == "open") return VocabMode::open;
  fail("mode must be 'closed' or 'open', got '", s, "'");
}

PairwiseMode parse_pairwise(const std::string& s) {
  if (s == "lexicon") return PairwiseMode::lexicon;
  if (s == "roi") return PairwiseMode::roi;
  fail("pairwise mode must be 'lexicon' or 'roi', got '", s, "'");
}

struct ConfigFile {
  RecognitionConfig cfg;
  int workers = 1;
  bool has_workers = false;
};

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open config: ", path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    fail("config ", path, ": ", ex.what());
  }
  require(j.is_object(), "config ", path, ": expected a JSON object");
  ConfigFile out;
  RecognitionConfig& c = out.cfg;
  for (const auto& [key, val] : j.items()) {
    try {
      if (key == "mode") {
        c.mode = parse_mode(val.get<std::string>());
      } else if (key == "order") {
        c.order = val.get<int>();
      } else if (key == "lambda_l") {
        c.params.lambda_l = val.get<double>();
      } else if (key == "lambda_o") {
        c.params.lambda_o = val.get<double>();
      } else if (key == "lambda_a") {
        c.params.lambda_a = val.get<double>();
        c.lambda_a_set = true;
      } else if (key == "lambda_b") {
        c.params.lambda_b = val.get<double>();
      } else if (key == "beta") {
        c.params.beta = val.get<double>();
      } else if (key == "pairwise_mode") {
        c.pairwise = parse_pairwise(val.get<std::string>());
      } else if (key == "case_sensitive") {
        c.case_sensitive = val.get<bool>();
      } else if (key == "proximity") {
        c.proximity = val.get<double>();
      } else if (key == "gs_threshold") {
        c.gs_threshold = val.get<double>();
      } else if (key == "nms_threshold") {
        c.nms_threshold = val.get<double>();
      } else if (key == "lexicon") {
        c.lexicon_path = val.get<std::string>();
      } else if (key == "large_lexicon") {
        c.large_lexicon_path = val.get<std::string>();
      } else if (key == "stats") {
        c.stats_path = val.get<std::string>();
      } else if (key == "trws_max_iters") {
        c.trws_max_iters = val.get<int>();
      } else if (key == "trws_tol") {
        c.trws_tol = val.get<double>();
      } else if (key == "max_extended_labels") {
        c.max_extended_labels = val.get<int>();
      } else if (key == "workers") {
        out.workers = val.get<int>();
        out.has_workers = true;
      } else {
        fail("config ", path, ": unknown key '", key, "'");
      }
    } catch (const json::exception& ex) {
      fail("config ", path, ": key '", key, "': ", ex.what());
    }
  }
  return out;
}

// Shared recognition flags; each records whether it was passed so flags
// override config values.
struct RecognitionFlags {
  std::string config_path;
  std::string mode, pairwise;
  std::string lexicon, large_lexicon, stats;
  int order = 0;
  double lambda_l = 0, lambda_o = 0, lambda_a = 0, lambda_b = 0, beta = 0;
  bool case_sensitive = false;
  double proximity = 0, gs_threshold = 0, nms_threshold = 0;
  int max_iters = 0;
  double tol = 0;
  int max_extended_labels = 0;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--mode", mode, "closed or open vocabulary");
    app.add_option("--lexicon", lexicon, "closed-mode lexicon path");
    app.add_option("--large-lexicon", large_lexicon,
                   "open-mode lexicon path");
    app.add_option("--stats", stats, "aspect statistics path");
    app.add_option("--order", order, "clique order, 2..6");
    app.add_option("--lambda-l", lambda_l, "pairwise prior weight");
    app.add_option("--lambda-o", lambda_o, "overlap weight");
    app.add_option("--lambda-a", lambda_a, "auxiliary unary weight");
    app.add_option("--lambda-b", lambda_b, "agreement penalty");
    app.add_option("--beta", beta, "exponential sharpness");
    app.add_option("--pairwise", pairwise, "lexicon or roi");
    app.add_flag("--case-sensitive", case_sensitive,
                 "62-class alphabet instead of case-folded 36");
    app.add_option("--proximity", proximity, "edge gap in mean widths");
    app.add_option("--gs-threshold", gs_threshold, "goodness cutoff");
    app.add_option("--nms-threshold", nms_threshold, "suppression overlap");
    app.add_option("--max-iters", max_iters, "message passing iterations");
    app.add_option("--tol", tol, "bound convergence tolerance");
    app.add_option("--max-extended-labels", max_extended_labels,
                   "extended label set cap");
  }

  // Config file first, passed flags on top.
  ConfigFile resolve(const CLI::App& app) const {
    ConfigFile out;
    if (!config_path.empty()) out = load_config(config_path);
    RecognitionConfig& c = out.cfg;
    if (app.count("--mode")) c.mode = parse_mode(mode);
    if (app.count("--lexicon")) c.lexicon_path = lexicon;
    if (app.count("--large-lexicon")) c.large_lexicon_path = large_lexicon;
    if (app.count("--stats")) c.stats_path = stats;
    if (app.count("--order")) c.order = order;
    if (app.count("--lambda-l")) c.params.lambda_l = lambda_l;
    if (app.count("--lambda-o")) c.params.lambda_o = lambda_o;
    if (app.count("--lambda-a")) {
      c.params.lambda_a = lambda_a;
      c.lambda_a_set = true;
    }
    if (app.count("--lambda-b")) c.params.lambda_b = lambda_b;
    if (app.count("--beta")) c.params.beta = beta;
    if (app.count("--pairwise")) c.pairwise = parse_pairwise(pairwise);
    if (app.count("--case-sensitive")) c.case_sensitive = true;
    if (app.count("--proximity")) c.proximity = proximity;
    if (app.count("--gs-threshold")) c.gs_threshold = gs_threshold;
    if (app.count("--nms-threshold")) c.nms_threshold = nms_threshold;
    if (app.count("--max-iters")) c.trws_max_iters = max_iters;
    if (app.count("--tol")) c.trws_tol = tol;
    if (app.count("--max-extended-labels"))
      c.max_extended_labels = max_extended_labels;
    return out;
  }
};

void write_or_print(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  require(out.good(), "cannot write ", out_path);
  out << text;
}

int run(int argc, char** argv) {
  CLI::App app{"Word recognition over character detections"};
  app.require_subcommand(1);

  auto* rec_cmd = app.add_subcommand("recognize", "Recognize a single word");
  RecognitionFlags rec_flags;
  std::string rec_detections;
  double rec_image_width = 0;
  rec_cmd->add_option("--detections", rec_detections, "detection file")
      ->required();
  rec_cmd->add_option("--image-width", rec_image_width, "image width")
      ->required();
  rec_flags.attach(*rec_cmd);

  auto* eval_cmd = app.add_subcommand("evaluate", "Score a corpus manifest");
  RecognitionFlags eval_flags;
  std::string eval_manifest, eval_out;
  int eval_workers = 0;
  eval_cmd->add_option("--manifest", eval_manifest, "corpus manifest")
      ->required();
  eval_cmd->add_option("--workers", eval_workers, "parallel workers");
  eval_cmd->add_option("--out", eval_out, "report path (default stdout)");
  eval_flags.attach(*eval_cmd);

  auto* synth_cmd =
      app.add_subcommand("synth", "Render a synthetic detection corpus");
  std::string synth_lexicon, synth_out;
  SynthOptions synth_opt;
  bool synth_case_sensitive = false;
  synth_cmd->add_option("--lexicon", synth_lexicon, "word list to draw from")
      ->required();
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--count", synth_opt.count, "entries to generate");
  synth_cmd->add_option("--corruption", synth_opt.corruption,
                        "score corruption rate, 0..1");
  synth_cmd->add_option("--fp-rate", synth_opt.fp_rate,
                        "false positive rate, 0..1");
  synth_cmd->add_option("--seed", synth_opt.seed, "generator seed");
  synth_cmd->add_option("--height", synth_opt.height, "glyph height in px");
  synth_cmd->add_flag("--case-sensitive", synth_case_sensitive,
                      "62-class alphabet");

  auto* abl_cmd =
      app.add_subcommand("ablate", "Prior ablation sweep over a corpus");
  RecognitionFlags abl_flags;
  std::string abl_manifest, abl_out;
  int abl_workers = 0;
  abl_cmd->add_option("--manifest", abl_manifest, "corpus manifest")
      ->required();
  abl_cmd->add_option("--workers", abl_workers, "parallel workers");
  abl_cmd->add_option("--out", abl_out, "CSV path (default stdout)");
  abl_flags.attach(*abl_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (rec_cmd->parsed()) {
    const RecognitionConfig cfg = rec_flags.resolve(*rec_cmd).cfg;
    Recognizer recognizer(cfg);
    const DetectionFile det = ingest_detections(rec_detections);
    const RecognitionResult res = recognizer.recognize(det, rec_image_width);
    nlohmann::ordered_json j;
    j["word"] = res.word;
    j["raw_word"] = res.raw_word;
    j["energy"] = res.energy;
    j["lower_bound"] = res.lower_bound;
    j["iterations"] = res.iterations;
    j["converged"] = res.converged;
    j["windows_in"] = res.windows_in;
    j["windows_kept"] = res.windows_kept;
    auto nodes = nlohmann::ordered_json::array();
    const Alphabet& a = recognizer.alphabet();
    for (size_t i = 0; i < res.node_labels.size(); ++i) {
      const int lab = res.node_labels[i];
      nodes.push_back({{"id", res.node_ids[i]},
                       {"label", lab == a.epsilon()
                                     ? std::string("<null>")
                                     : std::string(1, a.label(lab))}});
    }
    j["nodes"] = std::move(nodes);
    j["timing_ms"] = res.millis;
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (eval_cmd->parsed()) {
    const ConfigFile cf = eval_flags.resolve(*eval_cmd);
    int workers = cf.has_workers ? cf.workers : 1;
    if (eval_cmd->count("--workers")) workers = eval_workers;
    const auto entries = load_manifest(eval_manifest);
    const EvalReport rep = evaluate(entries, cf.cfg, workers);
    write_or_print(eval_out, report_to_json(rep));
    std::cerr << "entries " << rep.total << " correct " << rep.correct
              << " accuracy " << rep.accuracy << "%\n";
    return 0;
  }

  if (synth_cmd->parsed()) {
    const Alphabet alphabet = synth_case_sensitive
                                  ? Alphabet::case_sensitive()
                                  : Alphabet::case_insensitive();
    const Lexicon lexicon = load_lexicon(synth_lexicon, alphabet);
    const SynthSummary sum =
        synth_corpus(lexicon, alphabet, synth_opt, synth_out);
    std::cout << "manifest " << sum.manifest_path << "\n"
              << "entries " << sum.entries << "\n"
              << "true_windows " << sum.true_windows << "\n"
              << "fp_windows " << sum.fp_windows << "\n";
    return 0;
  }

  const ConfigFile cf = abl_flags.resolve(*abl_cmd);
  int workers = cf.has_workers ? cf.workers : 1;
  if (abl_cmd->count("--workers")) workers = abl_workers;
  const auto entries = load_manifest(abl_manifest);
  const auto rows = ablation(entries, cf.cfg, workers);
  write_or_print(abl_out, ablation_csv(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
}
