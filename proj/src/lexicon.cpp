#include "wordcrf/lexicon.hpp"

#include <algorithm>
#include <fstream>

#include "wordcrf/common.hpp"

namespace wordcrf {

Lexicon::Lexicon(std::vector<std::string> words, const Alphabet& alphabet) {
  words_.reserve(words.size());
  for (auto& w : words) {
    std::string f = alphabet.fold_word(w);
    for (char c : f) {
      require(alphabet.index_of(c) >= 0, "lexicon: symbol '", c,
              "' in word \"", w, "\" is outside the alphabet");
    }
    if (f.empty()) continue;
    if (set_.insert(f).second) words_.push_back(std::move(f));
  }
}

Lexicon load_lexicon(const std::string& path, const Alphabet& alphabet) {
  std::ifstream in(path);
  require(in.good(), "lexicon: cannot open ", path);
  std::vector<std::string> raw;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Trim surrounding spaces; a line of only whitespace is blank.
    size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    size_t e = line.find_last_not_of(" \t");
    std::string w = line.substr(b, e - b + 1);
    for (char c : w) {
      require(alphabet.index_of(c) >= 0, path, ":", lineno, ": symbol '", c,
              "' is outside the alphabet");
    }
    raw.push_back(std::move(w));
  }
  return Lexicon(std::move(raw), alphabet);
}

int edit_distance(const std::string& a, const std::string& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<int> row(m + 1);
  for (size_t j = 0; j <= m; ++j) row[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    int diag = row[0];
    row[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      int sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      diag = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
    }
  }
  return row[m];
}

}  // namespace wordcrf
