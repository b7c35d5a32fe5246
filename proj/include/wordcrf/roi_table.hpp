#pragma once

#include <cstdint>
#include <vector>

#include "wordcrf/alphabet.hpp"
#include "wordcrf/lexicon.hpp"

namespace wordcrf {

// Position-dependent pair validity. The image is split into `parts` regions
// t = 1..T; pair (a,b) is valid in region t when some lexicon word contains
// the adjacent pair starting at a 1-based position p with |p - t| <= 1.
class RoiPairTable {
 public:
  static RoiPairTable build(const Lexicon& lexicon, const Alphabet& alphabet,
                            int parts);

  int parts() const { return parts_; }
  bool valid(int part, int first_label, int second_label) const;
  std::size_t entry_count() const;

 private:
  int parts_ = 0;
  int k_ = 0;
  std::vector<std::uint8_t> bits_;
};

}  // namespace wordcrf
