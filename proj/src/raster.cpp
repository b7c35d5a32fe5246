#include "wordcrf/raster.hpp"

#include <algorithm>

#include "wordcrf/common.hpp"

namespace wordcrf {

GrayImage GrayImage::blank(int w, int h) {
  require(w > 0 && h > 0, "raster: blank(", w, ",", h, ") needs positive size");
  GrayImage g;
  g.width = w;
  g.height = h;
  g.pix.assign(static_cast<size_t>(w) * h, 0);
  return g;
}

GrayImage crop(const GrayImage& img, int x0, int y0, int w, int h) {
  GrayImage out = GrayImage::blank(w, h);
  for (int y = 0; y < h; ++y) {
    const int sy = y0 + y;
    if (sy < 0 || sy >= img.height) continue;
    for (int x = 0; x < w; ++x) {
      const int sx = x0 + x;
      if (sx < 0 || sx >= img.width) continue;
      out.set(x, y, img.at(sx, sy));
    }
  }
  return out;
}

GrayImage resize_nearest(const GrayImage& img, int w, int h) {
  require(img.width > 0 && img.height > 0, "raster: resize of empty image");
  GrayImage out = GrayImage::blank(w, h);
  for (int y = 0; y < h; ++y) {
    const int sy = static_cast<int>(static_cast<long long>(y) * img.height / h);
    for (int x = 0; x < w; ++x) {
      const int sx = static_cast<int>(static_cast<long long>(x) * img.width / w);
      out.set(x, y, img.at(sx, sy));
    }
  }
  return out;
}

bool ink_bbox(const GrayImage& img, int& x0, int& y0, int& w, int& h) {
  int minx = img.width, miny = img.height, maxx = -1, maxy = -1;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (img.at(x, y) >= 128) {
        minx = std::min(minx, x);
        miny = std::min(miny, y);
        maxx = std::max(maxx, x);
        maxy = std::max(maxy, y);
      }
    }
  }
  if (maxx < 0) return false;
  x0 = minx;
  y0 = miny;
  w = maxx - minx + 1;
  h = maxy - miny + 1;
  return true;
}

}  // namespace wordcrf
