#include "wordcrf/roi_table.hpp"

#include <algorithm>

#include "wordcrf/common.hpp"

namespace wordcrf {

RoiPairTable RoiPairTable::build(const Lexicon& lexicon,
                                 const Alphabet& alphabet, int parts) {
  require(parts >= 1, "roi table: parts must be >= 1, got ", parts);
  RoiPairTable t;
  t.parts_ = parts;
  t.k_ = alphabet.size();
  t.bits_.assign(static_cast<size_t>(parts) * t.k_ * t.k_, 0);
  for (const std::string& w : lexicon.words()) {
    for (size_t i = 0; i + 1 < w.size(); ++i) {
      const int a = alphabet.index_of(w[i]);
      const int b = alphabet.index_of(w[i + 1]);
      const int p = static_cast<int>(i) + 1;  // 1-based pair start
      const int lo = std::max(1, p - 1);
      const int hi = std::min(parts, p + 1);
      for (int part = lo; part <= hi; ++part) {
        t.bits_[((static_cast<size_t>(part) - 1) * t.k_ + a) * t.k_ + b] = 1;
      }
    }
  }
  return t;
}

bool RoiPairTable::valid(int part, int first_label, int second_label) const {
  require(part >= 1 && part <= parts_, "roi table: part ", part,
          " outside [1,", parts_, "]");
  require(first_label >= 0 && first_label < k_ && second_label >= 0 &&
              second_label < k_,
          "roi table: label out of range");
  return bits_[((static_cast<size_t>(part) - 1) * k_ + first_label) * k_ +
               second_label] != 0;
}

std::size_t RoiPairTable::entry_count() const {
  std::size_t n = 0;
  for (std::uint8_t b : bits_) n += b;
  return n;
}

}  // namespace wordcrf
