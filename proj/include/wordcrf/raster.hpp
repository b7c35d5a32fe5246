#pragma once

#include <cstdint>
#include <vector>

namespace wordcrf {

// Row-major 8-bit grayscale raster; 0 background, 255 full ink.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pix;

  static GrayImage blank(int w, int h);
  std::uint8_t at(int x, int y) const {
    return pix[static_cast<size_t>(y) * width + x];
  }
  void set(int x, int y, std::uint8_t v) {
    pix[static_cast<size_t>(y) * width + x] = v;
  }
};

// Crop clamped to bounds; pixels outside the image read as background.
GrayImage crop(const GrayImage& img, int x0, int y0, int w, int h);

// Nearest-neighbour resample (floor mapping, deterministic).
GrayImage resize_nearest(const GrayImage& img, int w, int h);

// Tight bounding box of pixels >= 128; returns false when there is no ink.
bool ink_bbox(const GrayImage& img, int& x0, int& y0, int& w, int& h);

}  // namespace wordcrf
