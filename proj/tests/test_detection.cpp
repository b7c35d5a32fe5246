#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support/testlex.hpp"
#include "wordcrf/common.hpp"
#include "wordcrf/detection.hpp"
#include "wordcrf/font.hpp"
#include "wordcrf/roi_table.hpp"

using namespace wordcrf;

namespace {

DetectionWindow make_window(int id, double cx, double cy, double w, double h,
                            std::vector<double> scores) {
  DetectionWindow win;
  win.id = id;
  win.center_x = cx;
  win.center_y = cy;
  win.width = w;
  win.height = h;
  win.scores = std::move(scores);
  return win;
}

AspectStats uniform_stats(int k, double mean, double sigma) {
  AspectStats s;
  s.mean.assign(k, mean);
  s.sigma.assign(k, sigma);
  return s;
}

// Constant-score provider for geometry-only sliding window checks.
class FlatProvider : public ScoreProvider {
 public:
  explicit FlatProvider(int k) : k_(k) {}
  int num_classes() const override { return k_; }
  std::vector<double> scores(const GrayImage&) const override {
    return std::vector<double>(k_, 0.5);
  }

 private:
  int k_;
};

}  // namespace

TEST_CASE("window geometry accessors") {
  const auto w = make_window(3, 10, 20, 4, 8, {0.2, 0.9, 0.9});
  CHECK(w.aspect() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w.left() == 8);
  CHECK(w.right() == 12);
  CHECK(w.top() == 16);
  CHECK(w.bottom() == 24);
  CHECK(w.argmax_class() == 1);  // tie between 1 and 2 keeps the lower index
  CHECK(w.top_score() == 0.9);
}

TEST_CASE("iou reference values") {
  const auto a = make_window(0, 1, 1, 2, 2, {1});
  const auto b = make_window(1, 2, 1, 2, 2, {1});
  const auto c = make_window(2, 10, 10, 2, 2, {1});
  CHECK(iou(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(iou(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(iou(a, c) == 0.0);
  CHECK(iou(a, b) == iou(b, a));
}

TEST_CASE("goodness score matches the closed form") {
  // S = 0.8 and aspect one sigma from the mean give 0.8 * exp(-1/2).
  AspectStats stats = uniform_stats(2, 0.5, 0.2);
  const auto w = make_window(0, 0, 0, 0.7 * 10, 10, {0.8, 0.1});
  CHECK(goodness_score(w, stats) ==
        doctest::Approx(0.8 * std::exp(-0.5)).epsilon(1e-9));

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double mu = unit(rng), sigma = unit(rng);
    const double s0 = unit(rng), s1 = unit(rng);
    const double aspect = unit(rng) * 2;
    const auto v =
        make_window(i, 50, 50, aspect * 10, 10, {s0, s1});
    const AspectStats st = uniform_stats(2, mu, sigma);
    const double expect =
        std::max(s0, s1) * std::exp(-(mu - aspect) * (mu - aspect) /
                                    (2 * sigma * sigma));
    CHECK(goodness_score(v, st) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("goodness pruning keeps the threshold boundary") {
  AspectStats stats = uniform_stats(1, 1.0, 0.5);
  std::vector<DetectionWindow> ws;
  ws.push_back(make_window(0, 0, 0, 10, 10, {0.1}));   // GS exactly 0.1
  ws.push_back(make_window(1, 0, 0, 10, 10, {0.09}));  // below
  ws.push_back(make_window(2, 0, 0, 10, 10, {0.95}));  // above
  const auto kept = prune_by_goodness(ws, stats, 0.1);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].id == 0);
  CHECK(kept[1].id == 2);
}

TEST_CASE("character-specific suppression") {
  // Same class, heavy overlap: the higher score wins.
  std::vector<DetectionWindow> ws;
  ws.push_back(make_window(0, 10, 10, 10, 10, {0.6, 0.1}));
  ws.push_back(make_window(1, 11, 10, 10, 10, {0.8, 0.1}));
  auto out = nms_character_specific(ws, 0.4);
  REQUIRE(out.size() == 1);
  CHECK(out[0].id == 1);

  SUBCASE("different argmax classes never suppress each other") {
    ws[1].scores = {0.1, 0.8};
    out = nms_character_specific(ws, 0.4);
    CHECK(out.size() == 2);
  }

  SUBCASE("overlap exactly at the threshold is kept") {
    // 10x10 squares with a 4-wide x overlap: iou = 40/160 = 0.25 exactly.
    ws[1] = make_window(1, 16, 10, 10, 10, {0.8, 0.1});
    CHECK(iou(ws[0], ws[1]) == 0.25);
    out = nms_character_specific(ws, 0.25);
    CHECK(out.size() == 2);
    out = nms_character_specific(ws, 0.2499);
    CHECK(out.size() == 1);
  }

  SUBCASE("score ties suppress the higher id") {
    ws[1].scores = ws[0].scores;
    out = nms_character_specific(ws, 0.4);
    REQUIRE(out.size() == 1);
    CHECK(out[0].id == 0);
  }
}

TEST_CASE("suppression is idempotent and permutation invariant") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0, 1);
  std::vector<DetectionWindow> ws;
  for (int i = 0; i < 60; ++i) {
    ws.push_back(make_window(i, unit(rng) * 60, unit(rng) * 10 + 10,
                             unit(rng) * 15 + 5, unit(rng) * 15 + 5,
                             {unit(rng), unit(rng), unit(rng)}));
  }
  const auto once = nms_character_specific(ws, 0.4);
  const auto twice = nms_character_specific(once, 0.4);
  REQUIRE(once.size() == twice.size());
  for (size_t i = 0; i < once.size(); ++i) CHECK(once[i].id == twice[i].id);
  CHECK(std::is_sorted(once.begin(), once.end(),
                       [](const auto& a, const auto& b) { return a.id < b.id; }));

  auto shuffled = ws;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto out = nms_character_specific(shuffled, 0.4);
  REQUIRE(out.size() == once.size());
  for (size_t i = 0; i < out.size(); ++i) CHECK(out[i].id == once[i].id);
}

TEST_CASE("sliding window covers the stride grid") {
  // 96x48 image, one 48x48 scale, stride 24: centers x in {24, 48, 72}.
  GrayImage img = GrayImage::blank(96, 48);
  FlatProvider provider(2);
  const WindowSize scale{48, 48};
  const auto out = sliding_window_detect(img, provider, {{scale}}, 24);
  REQUIRE(out.size() == 3);
  for (size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].id == static_cast<int>(i));
    CHECK(out[i].center_x == doctest::Approx(24.0 + 24.0 * i));
    CHECK(out[i].center_y == doctest::Approx(24.0));
    CHECK(out[i].width == 48);
    CHECK(out[i].scores.size() == 2);
  }

  SUBCASE("aspect-filtered scales contribute nothing") {
    const WindowSize thin{2, 48};  // aspect 1/24 below the default range
    const auto filtered =
        sliding_window_detect(img, provider, {{thin}}, 24);
    CHECK(filtered.empty());
  }

  SUBCASE("parallel and serial scans agree exactly") {
    const std::vector<WindowSize> scales = {{48, 48}, {24, 48}, {32, 32}};
    const auto par = sliding_window_detect(img, provider, scales, 8);
    const auto ser = sliding_window_detect_serial(img, provider, scales, 8);
    REQUIRE(par.size() == ser.size());
    for (size_t i = 0; i < par.size(); ++i) {
      CHECK(par[i].id == ser[i].id);
      CHECK(par[i].center_x == ser[i].center_x);
      CHECK(par[i].center_y == ser[i].center_y);
      CHECK(par[i].scores == ser[i].scores);
    }
  }
}

TEST_CASE("detection file round trip and ingest validation") {
  const auto dir = testlex::fresh_dir("det");
  DetectionFile file;
  file.class_labels = "AB";
  file.windows.push_back(make_window(0, 1.5, 2.25, 3, 4, {0.125, 0.5}));
  file.windows.push_back(make_window(7, 10, 20, 30, 40, {1.0, 0.0}));
  const auto path = (dir / "ok.det").string();
  write_detections(path, file);
  const DetectionFile back = ingest_detections(path);
  CHECK(back.class_labels == "AB");
  REQUIRE(back.windows.size() == 2);
  CHECK(back.windows[0].center_x == 1.5);
  CHECK(back.windows[0].scores[0] == 0.125);
  CHECK(back.windows[1].id == 7);

  auto bad = [&](const char* name, const std::vector<std::string>& lines) {
    return testlex::write_lines(dir / name, lines);
  };
  CHECK_THROWS_AS(ingest_detections((dir / "missing.det").string()), Error);
  CHECK_THROWS_AS(
      ingest_detections(bad("h1.det", {"k=2 classes=AB,CD", "0 1 1 1 1 0 0"})),
      Error);
  CHECK_THROWS_AS(
      ingest_detections(bad("h2.det", {"k=3 classes=A,B", "0 1 1 1 1 0 0 0"})),
      Error);
  CHECK_THROWS_AS(
      ingest_detections(bad("r1.det", {"k=2 classes=A,B", "0 1 1 1 1 0.5"})),
      Error);
  CHECK_THROWS_AS(ingest_detections(
                      bad("r2.det", {"k=2 classes=A,B", "0 1 1 1 1 0.5 1.5"})),
                  Error);
  CHECK_THROWS_AS(ingest_detections(
                      bad("r3.det", {"k=2 classes=A,B", "0 1 1 0 1 0.5 0.5"})),
                  Error);
  CHECK_THROWS_AS(
      ingest_detections(
          bad("r4.det", {"k=2 classes=A,B", "0 1 1 1 1 0.5 0.5 9"})),
      Error);
  // comments and blank lines are fine
  const DetectionFile ok = ingest_detections(
      bad("ok2.det", {"# comment", "k=1 classes=Z", "", "4 1 2 3 4 0.25"}));
  CHECK(ok.windows.size() == 1);
  CHECK(ok.windows[0].id == 4);
}

TEST_CASE("aspect stats io requires every class") {
  const Alphabet a = Alphabet::case_insensitive();
  const auto dir = testlex::fresh_dir("stats");
  const AspectStats stats = font_aspect_stats(a);
  const auto path = (dir / "stats.txt").string();
  stats.save(path, a);
  const AspectStats back = AspectStats::load(path, a);
  REQUIRE(back.mean.size() == static_cast<size_t>(a.size()));
  for (int i = 0; i < a.size(); ++i) {
    CHECK(back.mean[i] == stats.mean[i]);
    CHECK(back.sigma[i] == stats.sigma[i]);
  }
  const auto partial =
      testlex::write_lines(dir / "partial.txt", {"A 0.5 0.1", "B 0.5 0.1"});
  CHECK_THROWS_AS(AspectStats::load(partial, a), Error);
}

TEST_CASE("roi table reproduces the two-word worked example") {
  const Alphabet a = Alphabet::case_insensitive();
  const Lexicon lex({"CVPR", "ICPR"}, a);
  const RoiPairTable table = RoiPairTable::build(lex, a, 4);
  const int P = a.index_of('P'), R = a.index_of('R');
  // (P,R) starts at position 3 in both words: regions 2..4 only.
  CHECK_FALSE(table.valid(1, P, R));
  CHECK(table.valid(2, P, R));
  CHECK(table.valid(3, P, R));
  CHECK(table.valid(4, P, R));
  // (C,V) starts at 1 in CVPR: regions 1..2.
  const int C = a.index_of('C'), V = a.index_of('V');
  CHECK(table.valid(1, C, V));
  CHECK(table.valid(2, C, V));
  CHECK_FALSE(table.valid(3, C, V));
  CHECK_FALSE(table.valid(4, C, V));
  CHECK_FALSE(table.valid(1, R, P));  // reversed pair never occurs
  CHECK(table.entry_count() > 0);
  CHECK_THROWS_AS(table.valid(0, P, R), Error);
  CHECK_THROWS_AS(table.valid(5, P, R), Error);
}

TEST_CASE("roi table equals brute-force position enumeration") {
  const Alphabet a = Alphabet::case_insensitive();
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto words = testlex::pseudo_words(20 + trial * 7, 100 + trial);
    const Lexicon lex(words, a);
    const int T = 1 + static_cast<int>(rng() % 7);
    const RoiPairTable table = RoiPairTable::build(lex, a, T);
    for (int t = 1; t <= T; ++t) {
      for (int x = 0; x < a.size(); ++x) {
        for (int y = 0; y < a.size(); ++y) {
          bool expect = false;
          for (const std::string& w : lex.words()) {
            for (size_t p = 1; p + 1 <= w.size() && !expect; ++p) {
              expect = a.index_of(w[p - 1]) == x &&
                       a.index_of(w[p]) == y &&
                       std::abs(static_cast<int>(p) - t) <= 1;
            }
          }
          CHECK(table.valid(t, x, y) == expect);
        }
      }
    }
  }
}

TEST_CASE("glyphs identify themselves through the template classifier") {
  const Alphabet a = Alphabet::case_insensitive();
  const TemplateScoreProvider provider(a);
  for (int c = 0; c < a.size(); ++c) {
    const GrayImage patch = render_glyph(a.label(c), 32);
    const auto s = provider.scores(patch);
    REQUIRE(static_cast<int>(s.size()) == a.size());
    const int best =
        static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
    CHECK(best == c);
    CHECK(s[c] > 0.6);
  }
  // blank patches carry no evidence
  const auto zero = provider.scores(GrayImage::blank(16, 16));
  for (double v : zero) CHECK(v == 0.0);
}
