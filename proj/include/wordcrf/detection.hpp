#pragma once

#include <span>
#include <string>
#include <vector>

#include "wordcrf/alphabet.hpp"
#include "wordcrf/raster.hpp"

namespace wordcrf {

// One candidate character detection: axis-aligned box (center + size) with a
// per-class likelihood vector in [0,1].
struct DetectionWindow {
  int id = 0;
  double center_x = 0, center_y = 0, width = 0, height = 0;
  std::vector<double> scores;

  double aspect() const { return width / height; }
  double left() const { return center_x - width / 2; }
  double right() const { return center_x + width / 2; }
  double top() const { return center_y - height / 2; }
  double bottom() const { return center_y + height / 2; }
  // Highest-scoring class; lowest index wins ties.
  int argmax_class() const;
  double top_score() const;
};

double iou(const DetectionWindow& a, const DetectionWindow& b);

// Per-class aspect-ratio statistics (mean, sigma > 0).
struct AspectStats {
  std::vector<double> mean;
  std::vector<double> sigma;

  static AspectStats load(const std::string& path, const Alphabet& alphabet);
  void save(const std::string& path, const Alphabet& alphabet) const;
  void check(int num_classes) const;
};

// Classifier contract: normalized per-class scores for a grayscale patch.
class ScoreProvider {
 public:
  virtual ~ScoreProvider() = default;
  virtual int num_classes() const = 0;
  virtual std::vector<double> scores(const GrayImage& patch) const = 0;
};

struct WindowSize {
  int width = 0;
  int height = 0;
};

struct AspectRange {
  double lo = 0.1;
  double hi = 2.5;
};

// Dense multi-scale scan. Windows are placed at every (x,y) on the stride
// grid per scale, filtered by aspect range, scored by the provider, and
// returned with ids in scale-major raster order. The OpenMP variant scores
// scales concurrently and merges in id order; output equals the serial one.
std::vector<DetectionWindow> sliding_window_detect(
    const GrayImage& image, const ScoreProvider& provider,
    std::span<const WindowSize> scales, int stride,
    const AspectRange& range = {});
std::vector<DetectionWindow> sliding_window_detect_serial(
    const GrayImage& image, const ScoreProvider& provider,
    std::span<const WindowSize> scales, int stride,
    const AspectRange& range = {});

// GS(w) = max_score * exp(-(mu_c - aspect)^2 / (2 sigma_c^2)) for the
// argmax class c.
double goodness_score(const DetectionWindow& w, const AspectStats& stats);

// Keeps windows with GS >= threshold, input order preserved.
std::vector<DetectionWindow> prune_by_goodness(
    std::span<const DetectionWindow> windows, const AspectStats& stats,
    double threshold = 0.1);

// Character-specific NMS: within each argmax class, greedily keep the best
// top_score window (ties: lower id) and drop others overlapping it with
// IoU > threshold. Survivors are returned in ascending id order.
std::vector<DetectionWindow> nms_character_specific(
    std::span<const DetectionWindow> windows, double overlap_threshold = 0.4);

// Detection file: "k=<int> classes=<c,c,..>" header then one row per window:
// id cx cy w h s_1 .. s_k.
struct DetectionFile {
  std::string class_labels;
  std::vector<DetectionWindow> windows;
};

DetectionFile ingest_detections(const std::string& path);
void write_detections(const std::string& path, const DetectionFile& file);

}  // namespace wordcrf
