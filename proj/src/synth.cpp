#include "wordcrf/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "wordcrf/common.hpp"
#include "wordcrf/detection.hpp"
#include "wordcrf/font.hpp"

namespace wordcrf {

namespace {

DetectionWindow make_window(const GrayImage& image,
                            const TemplateScoreProvider& provider, double cx,
                            double cy, double w, double h) {
  DetectionWindow win;
  win.center_x = cx;
  win.center_y = cy;
  win.width = w;
  win.height = h;
  GrayImage patch = crop(image, static_cast<int>(std::lround(cx - w / 2)),
                         static_cast<int>(std::lround(cy - h / 2)),
                         static_cast<int>(std::lround(w)),
                         static_cast<int>(std::lround(h)));
  win.scores = provider.scores(patch);
  return win;
}

}  // namespace

SynthSummary synth_corpus(const Lexicon& lexicon, const Alphabet& alphabet,
                          const SynthOptions& opt, const std::string& out_dir) {
  require(!lexicon.empty(), "synth: empty lexicon");
  require(opt.count >= 1, "synth: count must be >= 1");
  require(opt.corruption >= 0.0 && opt.corruption <= 1.0,
          "synth: corruption outside [0,1]");
  require(opt.fp_rate >= 0.0 && opt.fp_rate <= 1.0,
          "synth: fp rate outside [0,1]");
  require(opt.height >= 8, "synth: height must be >= 8");

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  const TemplateScoreProvider provider(alphabet);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SynthSummary sum;

  AspectStats stats = font_aspect_stats(alphabet);
  stats.save((fs::path(out_dir) / "stats.txt").string(), alphabet);
  {
    std::ofstream lex((fs::path(out_dir) / "lexicon.txt").string());
    require(lex.good(), "synth: cannot write lexicon copy");
    for (const std::string& w : lexicon.words()) lex << w << "\n";
  }

  const std::string manifest_path =
      (fs::path(out_dir) / "manifest.txt").string();
  std::ofstream manifest(manifest_path);
  require(manifest.good(), "synth: cannot write ", manifest_path);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "# synthetic corpus count=%d corruption=%.3f fp=%.3f seed=%llu",
                opt.count, opt.corruption, opt.fp_rate,
                static_cast<unsigned long long>(opt.seed));
  manifest << buf << "\n";

  for (int e = 0; e < opt.count; ++e) {
    const std::string& word = lexicon.words()[static_cast<size_t>(
        rng() % lexicon.size())];
    WordRender wr = render_word(word, opt.height, opt.gap, opt.margin);

    DetectionFile file;
    file.class_labels = alphabet.labels();
    // True windows, one per glyph cell.
    for (const CharBox& b : wr.boxes) {
      file.windows.push_back(make_window(wr.image, provider, b.center_x,
                                         b.center_y, b.width, b.height));
      ++sum.true_windows;
    }
    // Inter-character false positives, three flavors: a straddler over two
    // neighboring half-glyphs (a hard confusion that survives pruning), a
    // narrow stroke sliver at a glyph edge, and a thin gap slice. The latter
    // two land below the goodness threshold, as detector clutter does.
    for (size_t i = 0; i + 1 < wr.boxes.size(); ++i) {
      const CharBox& a = wr.boxes[i];
      const CharBox& b = wr.boxes[i + 1];
      const double mid =
          ((a.center_x + a.width / 2) + (b.center_x - b.width / 2)) / 2;
      if (unit(rng) < opt.fp_rate / 4) {
        file.windows.push_back(make_window(wr.image, provider, mid,
                                           a.center_y,
                                           (a.width + b.width) / 2,
                                           opt.height));
        ++sum.fp_windows;
      }
      if (unit(rng) < opt.fp_rate / 2) {
        const bool left = unit(rng) < 0.5;
        const double w = std::max(3.0, a.width / 4);
        file.windows.push_back(make_window(
            wr.image, provider, a.center_x + (left ? -w / 2 : w / 2),
            a.center_y, w, opt.height));
        ++sum.fp_windows;
      }
      if (unit(rng) < opt.fp_rate / 2) {
        file.windows.push_back(make_window(wr.image, provider, mid,
                                           a.center_y, opt.gap + 2.0,
                                           opt.height));
        ++sum.fp_windows;
      }
    }
    // Score corruption: swap the top score onto a random other class.
    for (DetectionWindow& w : file.windows) {
      if (unit(rng) < opt.corruption) {
        const int top = w.argmax_class();
        const int other = static_cast<int>(
            rng() % static_cast<std::uint64_t>(alphabet.size() - 1));
        const int j = other >= top ? other + 1 : other;
        std::swap(w.scores[top], w.scores[j]);
      }
    }
    for (size_t i = 0; i < file.windows.size(); ++i) {
      file.windows[i].id = static_cast<int>(i);
    }

    std::snprintf(buf, sizeof buf, "entry_%04d", e);
    const std::string base = buf;
    write_detections((fs::path(out_dir) / (base + ".det")).string(), file);
    {
      std::ofstream truth((fs::path(out_dir) / (base + ".truth")).string());
      require(truth.good(), "synth: cannot write truth sidecar");
      truth << "word " << word << "\n";
      for (const CharBox& b : wr.boxes) {
        std::snprintf(buf, sizeof buf, "char %c %.9g %.9g %.9g %.9g\n", b.c,
                      b.center_x, b.center_y, b.width, b.height);
        truth << buf;
      }
    }
    manifest << base << ".det " << wr.image.width << " " << word
             << " lexicon.txt\n";
    ++sum.entries;
  }
  sum.manifest_path = manifest_path;
  return sum;
}

TruthSidecar load_truth_sidecar(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open truth sidecar: ", path);
  TruthSidecar out;
  std::string line;
  int line_no = 0;
  bool saw_word = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "word") {
      require(!saw_word, path, ":", line_no, ": duplicate word line");
      ss >> out.word;
      require(!out.word.empty(), path, ":", line_no, ": missing word");
      saw_word = true;
    } else if (tag == "char") {
      TruthSidecar::Box b;
      ss >> b.c >> b.center_x >> b.center_y >> b.width >> b.height;
      require(!ss.fail(), path, ":", line_no, ": malformed char line");
      out.boxes.push_back(b);
    } else {
      fail(path, ":", line_no, ": unknown tag '", tag, "'");
    }
  }
  require(saw_word, path, ": missing word line");
  return out;
}

}  // namespace wordcrf
