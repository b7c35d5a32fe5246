#pragma once

#include <string>
#include <vector>

#include "wordcrf/alphabet.hpp"
#include "wordcrf/detection.hpp"
#include "wordcrf/raster.hpp"

namespace wordcrf {

// Built-in 8x8 reference glyphs (A-Z, 0-9) backing the synthetic pipeline
// and the template classifier. Lowercase letters reuse uppercase shapes.

// Glyph ink scaled to the given height; width follows the glyph's aspect.
GrayImage render_glyph(char c, int height);

// Glyph ink bounding-box aspect (width/height of the 8x8 ink box).
double glyph_aspect(char c);

struct CharBox {
  char c = 0;
  double center_x = 0, center_y = 0, width = 0, height = 0;
};

struct WordRender {
  GrayImage image;
  std::vector<CharBox> boxes;
};

// One line of text: each glyph scaled to `height`, `gap` background columns
// between cells, `margin` background border.
WordRender render_word(const std::string& word, int height, int gap,
                       int margin);

// Per-class aspect statistics of the built-in glyphs: mean = glyph aspect,
// sigma = max(0.35 * mean, 0.08).
AspectStats font_aspect_stats(const Alphabet& alphabet);

// Nearest-template classifier: patches and glyph templates are binarized,
// ink-bbox-normalized to 16x16, and compared with Jaccard overlap (ink
// intersection over union), giving scores in [0,1].
class TemplateScoreProvider : public ScoreProvider {
 public:
  explicit TemplateScoreProvider(const Alphabet& alphabet);
  int num_classes() const override { return alphabet_.size(); }
  std::vector<double> scores(const GrayImage& patch) const override;

 private:
  Alphabet alphabet_;
  std::vector<std::vector<std::uint8_t>> templates_;  // 16x16 ink masks
};

}  // namespace wordcrf
