#include "wordcrf/recognizer.hpp"

#include <chrono>
#include <cmath>

#include "wordcrf/common.hpp"
#include "wordcrf/font.hpp"

namespace wordcrf {

std::string read_out_word(const CandidateGraph& g,
                          std::span<const int> char_labels,
                          const Alphabet& alphabet) {
  require(char_labels.size() == g.nodes.size(), "read out: ",
          char_labels.size(), " labels for ", g.nodes.size(), " nodes");
  std::string w;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const int l = char_labels[i];
    require(l >= 0 && l <= alphabet.size(), "read out: label ", l,
            " out of range");
    if (l < alphabet.size()) w += alphabet.label(l);
  }
  return w;
}

std::string edit_distance_correct(const std::string& raw,
                                  const Lexicon& lexicon) {
  require(!lexicon.empty(), "correction: empty lexicon");
  if (lexicon.contains(raw)) return raw;
  int best_d = 0;
  const std::string* best = nullptr;
  for (const std::string& w : lexicon.words()) {
    const int d = edit_distance(raw, w);
    if (best == nullptr || d < best_d) {
      best = &w;
      best_d = d;
    }
  }
  return *best;
}

static void validate_params(const PotentialParams& p) {
  for (double v : {p.lambda_l, p.lambda_o, p.lambda_a, p.lambda_b, p.beta}) {
    require(std::isfinite(v) && v >= 0.0,
            "config: potential weights must be finite and >= 0");
  }
}

Recognizer::Recognizer(const RecognitionConfig& cfg)
    : cfg_(cfg),
      alphabet_(cfg.case_sensitive ? Alphabet::case_sensitive()
                                   : Alphabet::case_insensitive()) {
  const std::string& path = cfg_.mode == VocabMode::closed
                                ? cfg_.lexicon_path
                                : cfg_.large_lexicon_path;
  require(!path.empty(), "config: ",
          cfg_.mode == VocabMode::closed
              ? "closed mode needs an image lexicon"
              : "open mode needs the large lexicon");
  prior_ = load_lexicon(path, alphabet_);
  finish_setup();
}

Recognizer::Recognizer(const RecognitionConfig& cfg, Lexicon prior)
    : cfg_(cfg),
      alphabet_(cfg.case_sensitive ? Alphabet::case_sensitive()
                                   : Alphabet::case_insensitive()),
      prior_(std::move(prior)) {
  finish_setup();
}

void Recognizer::finish_setup() {
  require(cfg_.order >= 2 && cfg_.order <= 6, "config: order ", cfg_.order,
          " outside {2..6}");
  require(cfg_.proximity >= 0.0, "config: proximity must be >= 0");
  require(cfg_.mode == VocabMode::open || !prior_.empty(),
          "config: closed mode needs a non-empty lexicon");
  validate_params(cfg_.params);

  params_ = cfg_.params;
  if (!cfg_.lambda_a_set && cfg_.mode == VocabMode::closed &&
      prior_.size() <= 1000) {
    params_.lambda_a = 1.0;
  }

  stats_ = cfg_.stats_path.empty() ? font_aspect_stats(alphabet_)
                                   : AspectStats::load(cfg_.stats_path,
                                                       alphabet_);
  stats_.check(alphabet_.size());

  model_ = std::make_unique<NGramModel>(
      NGramModel::build(prior_, alphabet_, std::min(cfg_.order, 5)));
  if (cfg_.order >= 3) {
    ext_ = ExtendedLabelSet::build(prior_, alphabet_, cfg_.order);
    require(ext_.size_with_invalid() <= cfg_.max_extended_labels,
            "config: extended label set (", ext_.size_with_invalid(),
            ") exceeds the cap of ", cfg_.max_extended_labels);
    aux_unary_ = build_aux_unary_costs(ext_, *model_, params_);
  }
}

RecognitionResult Recognizer::recognize(const DetectionFile& detections,
                                        double image_width) const {
  require(detections.class_labels == alphabet_.labels(),
          "recognize: detection classes '", detections.class_labels,
          "' do not match the alphabet");
  require(image_width > 0.0, "recognize: image width must be positive");

  const auto t0 = std::chrono::steady_clock::now();
  RecognitionResult res;
  res.windows_in = static_cast<int>(detections.windows.size());

  std::vector<DetectionWindow> kept =
      prune_by_goodness(detections.windows, stats_, cfg_.gs_threshold);
  kept = nms_character_specific(kept, cfg_.nms_threshold);
  res.windows_kept = static_cast<int>(kept.size());

  if (kept.empty()) {
    // Degenerate input: empty word, zero energy, no correction.
    res.converged = true;
    res.millis = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
    return res;
  }

  CandidateGraph graph = order_nodes(kept);
  connect_edges(graph, kept, cfg_.proximity);
  insert_aux_nodes(graph, cfg_.order);
  const int parts = estimate_char_count(kept, image_width);

  RoiPairTable roi;
  EnergyModel em;
  em.graph = &graph;
  em.windows = kept;
  em.model = model_.get();
  em.stats = &stats_;
  em.params = params_;
  em.mode = cfg_.pairwise;
  em.image_width = image_width;
  em.parts = parts;
  if (cfg_.pairwise == PairwiseMode::roi) {
    roi = RoiPairTable::build(prior_, alphabet_, parts);
    em.roi = &roi;
  }
  if (cfg_.order >= 3) em.ext = &ext_;

  FactorViewOptions vopt;
  vopt.max_extended_labels = cfg_.max_extended_labels;
  if (cfg_.order >= 3) vopt.shared_aux_unary = &aux_unary_;
  FactorGraphView view = build_factor_view(em, vopt);

  TrwsOptions topt;
  topt.max_iters = cfg_.trws_max_iters;
  topt.tol = cfg_.trws_tol;
  InferenceResult inf = trws_minimize(view, topt);

  res.energy = inf.energy;
  res.lower_bound = inf.lower_bound;
  res.iterations = inf.iterations;
  res.converged = inf.converged;
  res.node_labels.resize(graph.nodes.size());
  res.node_ids.resize(graph.nodes.size());
  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    res.node_labels[i] = inf.labels[view.char_var[i]];
    res.node_ids[i] = graph.nodes[i].id;
  }
  res.raw_word = read_out_word(graph, res.node_labels, alphabet_);
  res.word = cfg_.mode == VocabMode::closed
                 ? edit_distance_correct(res.raw_word, prior_)
                 : res.raw_word;
  res.millis = std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - t0)
                   .count();
  return res;
}

}  // namespace wordcrf
