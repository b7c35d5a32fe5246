#pragma once

#include <array>
#include <string>

namespace wordcrf {

// Character label set. Labels are dense indices 0..size()-1; index size() is
// reserved for the null (epsilon) label in k+1 unary/pairwise domains.
class Alphabet {
 public:
  // A-Z a-z 0-9, k = 62.
  static Alphabet case_sensitive();
  // A-Z 0-9, k = 36; lowercase input folds to uppercase.
  static Alphabet case_insensitive();

  int size() const { return static_cast<int>(labels_.size()); }
  int epsilon() const { return size(); }
  bool folds_case() const { return fold_; }

  // Folded form of c under this alphabet's case rule.
  char fold(char c) const;
  // Label index of c after folding, or -1 if c is outside the alphabet.
  int index_of(char c) const;
  char label(int idx) const;
  bool is_digit(int idx) const;
  const std::string& labels() const { return labels_; }
  // Case-rule-aware string fold (identity for the case-sensitive alphabet).
  std::string fold_word(const std::string& w) const;

  bool operator==(const Alphabet& o) const {
    return labels_ == o.labels_ && fold_ == o.fold_;
  }

 private:
  Alphabet(std::string labels, bool fold);

  std::string labels_;
  std::array<int, 256> lut_{};
  bool fold_ = false;
};

}  // namespace wordcrf
