#include "wordcrf/detection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wordcrf/common.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wordcrf {

int DetectionWindow::argmax_class() const {
  require(!scores.empty(), "window ", id, ": empty score vector");
  int best = 0;
  for (int c = 1; c < static_cast<int>(scores.size()); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return best;
}

double DetectionWindow::top_score() const { return scores[argmax_class()]; }

double iou(const DetectionWindow& a, const DetectionWindow& b) {
  const double ix = std::max(
      0.0, std::min(a.right(), b.right()) - std::max(a.left(), b.left()));
  const double iy = std::max(
      0.0, std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top()));
  const double inter = ix * iy;
  const double uni = a.width * a.height + b.width * b.height - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

void AspectStats::check(int num_classes) const {
  require(static_cast<int>(mean.size()) == num_classes &&
              static_cast<int>(sigma.size()) == num_classes,
          "aspect stats: expected ", num_classes, " classes, have ",
          mean.size());
  for (int c = 0; c < num_classes; ++c) {
    require(std::isfinite(mean[c]) && mean[c] > 0.0, "aspect stats: class ", c,
            " has non-positive mean");
    require(std::isfinite(sigma[c]) && sigma[c] > 0.0, "aspect stats: class ",
            c, " has non-positive sigma");
  }
}

AspectStats AspectStats::load(const std::string& path,
                              const Alphabet& alphabet) {
  std::ifstream in(path);
  require(in.good(), "aspect stats: cannot open ", path);
  AspectStats s;
  s.mean.assign(alphabet.size(), 0.0);
  s.sigma.assign(alphabet.size(), 0.0);
  std::vector<bool> seen(alphabet.size(), false);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string label;
    if (!(ls >> label)) continue;
    if (label[0] == '#') continue;
    require(label.size() == 1, path, ":", lineno, ": label '", label,
            "' is not a single symbol");
    const int c = alphabet.index_of(label[0]);
    require(c >= 0, path, ":", lineno, ": label '", label,
            "' outside alphabet");
    double mu = 0, sg = 0;
    require(static_cast<bool>(ls >> mu >> sg), path, ":", lineno,
            ": expected '<label> <mean> <sigma>'");
    s.mean[c] = mu;
    s.sigma[c] = sg;
    seen[c] = true;
  }
  for (int c = 0; c < alphabet.size(); ++c) {
    require(seen[c], "aspect stats: ", path, " has no entry for class '",
            alphabet.label(c), "'");
  }
  s.check(alphabet.size());
  return s;
}

void AspectStats::save(const std::string& path,
                       const Alphabet& alphabet) const {
  check(alphabet.size());
  std::ofstream out(path);
  require(out.good(), "aspect stats: cannot write ", path);
  char buf[96];
  for (int c = 0; c < alphabet.size(); ++c) {
    std::snprintf(buf, sizeof buf, "%c %.17g %.17g\n", alphabet.label(c),
                  mean[c], sigma[c]);
    out << buf;
  }
}

namespace {

struct ScalePlan {
  WindowSize size;
  int nx = 0, ny = 0;
  int id_base = 0;
};

std::vector<ScalePlan> plan_scales(const GrayImage& image,
                                   std::span<const WindowSize> scales,
                                   int stride, const AspectRange& range,
                                   int num_classes) {
  require(!scales.empty(), "sliding window: empty scale list");
  require(stride >= 1, "sliding window: stride must be >= 1");
  require(num_classes >= 1, "sliding window: provider has no classes");
  std::vector<ScalePlan> plans;
  int next_id = 0;
  for (const WindowSize& s : scales) {
    require(s.width > 0 && s.height > 0, "sliding window: bad scale ",
            s.width, "x", s.height);
    ScalePlan p;
    p.size = s;
    const double a = static_cast<double>(s.width) / s.height;
    if (a < range.lo || a > range.hi) {
      p.nx = p.ny = 0;
    } else {
      p.nx = s.width <= image.width ? (image.width - s.width) / stride + 1 : 0;
      p.ny =
          s.height <= image.height ? (image.height - s.height) / stride + 1 : 0;
    }
    p.id_base = next_id;
    next_id += p.nx * p.ny;
    plans.push_back(p);
  }
  return plans;
}

}  // namespace

static std::vector<DetectionWindow> sliding_window_impl(
    const GrayImage& image, const ScoreProvider& provider,
    std::span<const WindowSize> scales, int stride, const AspectRange& range,
    bool parallel) {
  const int k = provider.num_classes();
  const auto plans = plan_scales(image, scales, stride, range, k);
  int total = 0;
  for (const auto& p : plans) total += p.nx * p.ny;
  std::vector<DetectionWindow> out(static_cast<size_t>(total));

  std::string first_error;
  const int num_plans = static_cast<int>(plans.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int s = 0; s < num_plans; ++s) {
    const ScalePlan& p = plans[s];
    for (int iy = 0; iy < p.ny; ++iy) {
      for (int ix = 0; ix < p.nx; ++ix) {
        DetectionWindow w;
        w.id = p.id_base + iy * p.nx + ix;
        const int x0 = ix * stride, y0 = iy * stride;
        w.width = p.size.width;
        w.height = p.size.height;
        w.center_x = x0 + w.width / 2;
        w.center_y = y0 + w.height / 2;
        GrayImage patch = crop(image, x0, y0, p.size.width, p.size.height);
        std::vector<double> sc = provider.scores(patch);
        if (static_cast<int>(sc.size()) != k) {
          std::string msg = cat("sliding window: provider returned ",
                                sc.size(), " scores, expected ", k);
#ifdef _OPENMP
#pragma omp critical
#endif
          if (first_error.empty()) first_error = msg;
          continue;
        }
        w.scores = std::move(sc);
        out[static_cast<size_t>(w.id)] = std::move(w);
      }
    }
  }
  if (!first_error.empty()) throw Error(first_error);
  return out;
}

std::vector<DetectionWindow> sliding_window_detect(
    const GrayImage& image, const ScoreProvider& provider,
    std::span<const WindowSize> scales, int stride, const AspectRange& range) {
  return sliding_window_impl(image, provider, scales, stride, range, true);
}

std::vector<DetectionWindow> sliding_window_detect_serial(
    const GrayImage& image, const ScoreProvider& provider,
    std::span<const WindowSize> scales, int stride, const AspectRange& range) {
  return sliding_window_impl(image, provider, scales, stride, range, false);
}

double goodness_score(const DetectionWindow& w, const AspectStats& stats) {
  stats.check(static_cast<int>(w.scores.size()));
  const int c = w.argmax_class();
  const double d = stats.mean[c] - w.aspect();
  return w.scores[c] * std::exp(-(d * d) / (2.0 * stats.sigma[c] * stats.sigma[c]));
}

std::vector<DetectionWindow> prune_by_goodness(
    std::span<const DetectionWindow> windows, const AspectStats& stats,
    double threshold) {
  std::vector<DetectionWindow> out;
  out.reserve(windows.size());
  for (const DetectionWindow& w : windows) {
    if (goodness_score(w, stats) >= threshold) out.push_back(w);
  }
  return out;
}

std::vector<DetectionWindow> nms_character_specific(
    std::span<const DetectionWindow> windows, double overlap_threshold) {
  // Total order independent of input permutation: better score first, then
  // lower id, then geometry.
  auto better = [](const DetectionWindow& a, const DetectionWindow& b) {
    const double sa = a.top_score(), sb = b.top_score();
    if (sa != sb) return sa > sb;
    if (a.id != b.id) return a.id < b.id;
    if (a.center_x != b.center_x) return a.center_x < b.center_x;
    if (a.center_y != b.center_y) return a.center_y < b.center_y;
    if (a.width != b.width) return a.width < b.width;
    return a.height < b.height;
  };
  std::vector<size_t> idx(windows.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    const int ca = windows[a].argmax_class(), cb = windows[b].argmax_class();
    if (ca != cb) return ca < cb;
    return better(windows[a], windows[b]);
  });
  std::vector<char> alive(windows.size(), 1);
  for (size_t i = 0; i < idx.size(); ++i) {
    if (!alive[idx[i]]) continue;
    const DetectionWindow& keep = windows[idx[i]];
    const int cls = keep.argmax_class();
    for (size_t j = i + 1; j < idx.size(); ++j) {
      if (!alive[idx[j]]) continue;
      const DetectionWindow& other = windows[idx[j]];
      if (other.argmax_class() != cls) break;  // sorted by class
      if (iou(keep, other) > overlap_threshold) alive[idx[j]] = 0;
    }
  }
  std::vector<DetectionWindow> out;
  for (size_t i = 0; i < windows.size(); ++i) {
    if (alive[i]) out.push_back(windows[i]);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.id != b.id) return a.id < b.id;
    return a.center_x < b.center_x;
  });
  return out;
}

DetectionFile ingest_detections(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "detections: cannot open ", path);
  DetectionFile file;
  std::string line;
  int lineno = 0;
  int k = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (k < 0) {
      // Header: k=<int> classes=<c,c,..>
      std::istringstream ls(line);
      std::string ktok, ctok;
      require(static_cast<bool>(ls >> ktok >> ctok) &&
                  ktok.rfind("k=", 0) == 0 && ctok.rfind("classes=", 0) == 0,
              path, ":", lineno, ": expected 'k=<int> classes=<c,c,..>'");
      try {
        k = std::stoi(ktok.substr(2));
      } catch (const std::exception&) {
        fail(path, ":", lineno, ": bad class count '", ktok, "'");
      }
      require(k >= 1, path, ":", lineno, ": class count must be >= 1");
      const std::string cls = ctok.substr(8);
      std::string labels;
      size_t pos = 0;
      while (pos <= cls.size()) {
        size_t comma = cls.find(',', pos);
        std::string item = cls.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        require(item.size() == 1, path, ":", lineno, ": class '", item,
                "' is not a single symbol");
        labels += item[0];
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      require(static_cast<int>(labels.size()) == k, path, ":", lineno,
              ": header lists ", labels.size(), " classes, k=", k);
      file.class_labels = labels;
      continue;
    }
    std::istringstream ls(line);
    DetectionWindow w;
    require(static_cast<bool>(ls >> w.id >> w.center_x >> w.center_y >>
                              w.width >> w.height),
            path, ":", lineno, ": expected 'id cx cy w h s_1 .. s_k'");
    require(std::isfinite(w.width) && w.width > 0 && std::isfinite(w.height) &&
                w.height > 0,
            path, ":", lineno, ": width and height must be positive");
    require(std::isfinite(w.center_x) && std::isfinite(w.center_y), path, ":",
            lineno, ": non-finite center");
    w.scores.resize(k);
    for (int c = 0; c < k; ++c) {
      require(static_cast<bool>(ls >> w.scores[c]), path, ":", lineno,
              ": row has fewer than k=", k, " scores");
      require(std::isfinite(w.scores[c]) && w.scores[c] >= 0.0 &&
                  w.scores[c] <= 1.0,
              path, ":", lineno, ": score ", c + 1, " outside [0,1]");
    }
    std::string extra;
    require(!(ls >> extra), path, ":", lineno, ": trailing token '", extra,
            "'");
    file.windows.push_back(std::move(w));
  }
  require(k >= 0, "detections: ", path, " has no header line");
  return file;
}

void write_detections(const std::string& path, const DetectionFile& file) {
  std::ofstream out(path);
  require(out.good(), "detections: cannot write ", path);
  out << "k=" << file.class_labels.size() << " classes=";
  for (size_t i = 0; i < file.class_labels.size(); ++i) {
    if (i) out << ',';
    out << file.class_labels[i];
  }
  out << "\n";
  char buf[64];
  for (const DetectionWindow& w : file.windows) {
    out << w.id;
    for (double v : {w.center_x, w.center_y, w.width, w.height}) {
      std::snprintf(buf, sizeof buf, " %.9g", v);
      out << buf;
    }
    for (double s : w.scores) {
      std::snprintf(buf, sizeof buf, " %.9g", s);
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace wordcrf
