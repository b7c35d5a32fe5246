#include "wordcrf/font.hpp"

#include <algorithm>
#include <cmath>

#include "wordcrf/common.hpp"

namespace wordcrf {

namespace {

// 8x8 glyphs, 7 ink rows, '#' = ink. A fixed-pitch display face: every glyph
// fills the full 5-column cell (serifed I, based 1, barred J, condensed M and
// W), so class aspect carries no information between characters — odd aspect
// ratios are evidence of clutter, not of any particular letter.
struct GlyphDef {
  char c;
  const char* rows[7];
};

const GlyphDef kGlyphs[] = {
    {'A', {".###....", "#...#...", "#...#...", "#####...", "#...#...",
           "#...#...", "#...#..."}},
    {'B', {"####....", "#...#...", "#...#...", "####....", "#...#...",
           "#...#...", "####...."}},
    {'C', {".###....", "#...#...", "#.......", "#.......", "#.......",
           "#...#...", ".###...."}},
    {'D', {"####....", "#...#...", "#...#...", "#...#...", "#...#...",
           "#...#...", "####...."}},
    {'E', {"#####...", "#.......", "#.......", "####....", "#.......",
           "#.......", "#####..."}},
    {'F', {"#####...", "#.......", "#.......", "####....", "#.......",
           "#.......", "#......."}},
    {'G', {".###....", "#...#...", "#.......", "#..##...", "#...#...",
           "#...#...", ".###...."}},
    {'H', {"#...#...", "#...#...", "#...#...", "#####...", "#...#...",
           "#...#...", "#...#..."}},
    {'I', {"#####...", "..#.....", "..#.....", "..#.....", "..#.....",
           "..#.....", "#####..."}},
    {'J', {"#####...", "...#....", "...#....", "...#....", "...#....",
           "#..#....", ".##....."}},
    {'K', {"#...#...", "#..#....", "#.#.....", "##......", "#.#.....",
           "#..#....", "#...#..."}},
    {'L', {"#.......", "#.......", "#.......", "#.......", "#.......",
           "#.......", "#####..."}},
    {'M', {"#...#...", "##.##...", "#.#.#...", "#...#...", "#...#...",
           "#...#...", "#...#..."}},
    {'N', {"#...#...", "##..#...", "#.#.#...", "#..##...", "#...#...",
           "#...#...", "#...#..."}},
    {'O', {".###....", "#...#...", "#...#...", "#...#...", "#...#...",
           "#...#...", ".###...."}},
    {'P', {"####....", "#...#...", "#...#...", "####....", "#.......",
           "#.......", "#......."}},
    {'Q', {".###....", "#...#...", "#...#...", "#...#...", "#.#.#...",
           "#..#....", ".##.#..."}},
    {'R', {"####....", "#...#...", "#...#...", "####....", "#.#.....",
           "#..#....", "#...#..."}},
    {'S', {".####...", "#.......", "#.......", ".###....", "....#...",
           "....#...", "####...."}},
    {'T', {"#####...", "..#.....", "..#.....", "..#.....", "..#.....",
           "..#.....", "..#....."}},
    {'U', {"#...#...", "#...#...", "#...#...", "#...#...", "#...#...",
           "#...#...", ".###...."}},
    {'V', {"#...#...", "#...#...", "#...#...", "#...#...", "#...#...",
           ".#.#....", "..#....."}},
    {'W', {"#...#...", "#...#...", "#...#...", "#...#...", "#.#.#...",
           "##.##...", "#...#..."}},
    {'X', {"#...#...", "#...#...", ".#.#....", "..#.....", ".#.#....",
           "#...#...", "#...#..."}},
    {'Y', {"#...#...", "#...#...", ".#.#....", "..#.....", "..#.....",
           "..#.....", "..#....."}},
    {'Z', {"#####...", "....#...", "...#....", "..#.....", ".#......",
           "#.......", "#####..."}},
    {'0', {".###....", "#...#...", "#..##...", "#.#.#...", "##..#...",
           "#...#...", ".###...."}},
    {'1', {"..#.....", ".##.....", "..#.....", "..#.....", "..#.....",
           "..#.....", "#####..."}},
    {'2', {".###....", "#...#...", "....#...", "...#....", "..#.....",
           ".#......", "#####..."}},
    {'3', {"####....", "....#...", "....#...", ".###....", "....#...",
           "....#...", "####...."}},
    {'4', {"...#....", "..##....", ".#.#....", "#..#....", "#####...",
           "...#....", "...#...."}},
    {'5', {"#####...", "#.......", "####....", "....#...", "....#...",
           "#...#...", ".###...."}},
    {'6', {"..##....", ".#......", "#.......", "####....", "#...#...",
           "#...#...", ".###...."}},
    {'7', {"#####...", "....#...", "...#....", "...#....", "..#.....",
           "..#.....", "..#....."}},
    {'8', {".###....", "#...#...", "#...#...", ".###....", "#...#...",
           "#...#...", ".###...."}},
    {'9', {".###....", "#...#...", "#...#...", ".####...", "....#...",
           "...#....", ".##....."}},
};

const GlyphDef* find_glyph(char c) {
  if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  for (const GlyphDef& g : kGlyphs) {
    if (g.c == c) return &g;
  }
  return nullptr;
}

GrayImage glyph_ink(const GlyphDef& g) {
  GrayImage img = GrayImage::blank(8, 8);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 8; ++x) {
      if (g.rows[y][x] == '#') img.set(x, y, 255);
    }
  }
  int x0, y0, w, h;
  const bool has = ink_bbox(img, x0, y0, w, h);
  require(has, "font: glyph '", g.c, "' has no ink");
  return crop(img, x0, y0, w, h);
}

}  // namespace

double glyph_aspect(char c) {
  const GlyphDef* g = find_glyph(c);
  require(g != nullptr, "font: no glyph for '", c, "'");
  GrayImage ink = glyph_ink(*g);
  return static_cast<double>(ink.width) / ink.height;
}

GrayImage render_glyph(char c, int height) {
  const GlyphDef* g = find_glyph(c);
  require(g != nullptr, "font: no glyph for '", c, "'");
  require(height >= 4, "font: glyph height ", height, " too small");
  GrayImage ink = glyph_ink(*g);
  const int w = std::max(
      2, static_cast<int>(std::lround(height * static_cast<double>(ink.width) /
                                      ink.height)));
  return resize_nearest(ink, w, height);
}

WordRender render_word(const std::string& word, int height, int gap,
                       int margin) {
  require(!word.empty(), "font: empty word");
  std::vector<GrayImage> glyphs;
  glyphs.reserve(word.size());
  int total_w = 2 * margin + gap * (static_cast<int>(word.size()) - 1);
  for (char c : word) {
    glyphs.push_back(render_glyph(c, height));
    total_w += glyphs.back().width;
  }
  WordRender wr;
  wr.image = GrayImage::blank(total_w, height + 2 * margin);
  int x = margin;
  for (size_t i = 0; i < word.size(); ++i) {
    const GrayImage& g = glyphs[i];
    for (int yy = 0; yy < g.height; ++yy) {
      for (int xx = 0; xx < g.width; ++xx) {
        if (g.at(xx, yy)) wr.image.set(x + xx, margin + yy, g.at(xx, yy));
      }
    }
    CharBox b;
    b.c = word[i];
    b.width = g.width;
    b.height = height;
    b.center_x = x + g.width / 2.0;
    b.center_y = margin + height / 2.0;
    wr.boxes.push_back(b);
    x += g.width + gap;
  }
  return wr;
}

AspectStats font_aspect_stats(const Alphabet& alphabet) {
  AspectStats s;
  s.mean.resize(alphabet.size());
  s.sigma.resize(alphabet.size());
  for (int c = 0; c < alphabet.size(); ++c) {
    const double mu = glyph_aspect(alphabet.label(c));
    s.mean[c] = mu;
    s.sigma[c] = std::max(0.35 * mu, 0.08);
  }
  return s;
}

TemplateScoreProvider::TemplateScoreProvider(const Alphabet& alphabet)
    : alphabet_(alphabet) {
  templates_.resize(alphabet_.size());
  for (int c = 0; c < alphabet_.size(); ++c) {
    const GlyphDef* g = find_glyph(alphabet_.label(c));
    require(g != nullptr, "font: no glyph for class '", alphabet_.label(c),
            "'");
    GrayImage norm = resize_nearest(glyph_ink(*g), 16, 16);
    std::vector<std::uint8_t> mask(16 * 16, 0);
    for (int i = 0; i < 16 * 16; ++i) mask[i] = norm.pix[i] >= 128;
    templates_[c] = std::move(mask);
  }
}

std::vector<double> TemplateScoreProvider::scores(
    const GrayImage& patch) const {
  std::vector<double> out(alphabet_.size(), 0.0);
  int x0, y0, w, h;
  if (!ink_bbox(patch, x0, y0, w, h)) return out;  // blank patch
  GrayImage norm = resize_nearest(crop(patch, x0, y0, w, h), 16, 16);
  std::vector<std::uint8_t> mask(16 * 16, 0);
  for (int i = 0; i < 16 * 16; ++i) mask[i] = norm.pix[i] >= 128;
  for (int c = 0; c < alphabet_.size(); ++c) {
    int inter = 0, uni = 0;
    const auto& t = templates_[c];
    for (int i = 0; i < 16 * 16; ++i) {
      inter += mask[i] & t[i];
      uni += mask[i] | t[i];
    }
    out[c] = uni > 0 ? static_cast<double>(inter) / uni : 0.0;
  }
  return out;
}

}  // namespace wordcrf
