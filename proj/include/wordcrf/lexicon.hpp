#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "wordcrf/alphabet.hpp"

namespace wordcrf {

// A word list. Words are stored folded under the alphabet's case rule,
// deduplicated, first-occurrence order preserved.
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::vector<std::string> words, const Alphabet& alphabet);

  const std::vector<std::string>& words() const { return words_; }
  bool contains(const std::string& w) const { return set_.count(w) != 0; }
  bool empty() const { return words_.empty(); }
  size_t size() const { return words_.size(); }

 private:
  std::vector<std::string> words_;
  std::unordered_set<std::string> set_;
};

// Loads one word per line. Blank lines are skipped; an out-of-alphabet
// symbol is an error naming the path and line.
Lexicon load_lexicon(const std::string& path, const Alphabet& alphabet);

// Levenshtein distance over byte strings.
int edit_distance(const std::string& a, const std::string& b);

}  // namespace wordcrf
