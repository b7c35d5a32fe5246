#include "wordcrf/alphabet.hpp"

#include <cctype>

#include "wordcrf/common.hpp"

namespace wordcrf {

Alphabet::Alphabet(std::string labels, bool fold)
    : labels_(std::move(labels)), fold_(fold) {
  lut_.fill(-1);
  for (int i = 0; i < static_cast<int>(labels_.size()); ++i) {
    lut_[static_cast<unsigned char>(labels_[i])] = i;
  }
}

Alphabet Alphabet::case_sensitive() {
  std::string l;
  for (char c = 'A'; c <= 'Z'; ++c) l += c;
  for (char c = 'a'; c <= 'z'; ++c) l += c;
  for (char c = '0'; c <= '9'; ++c) l += c;
  return Alphabet(std::move(l), false);
}

Alphabet Alphabet::case_insensitive() {
  std::string l;
  for (char c = 'A'; c <= 'Z'; ++c) l += c;
  for (char c = '0'; c <= '9'; ++c) l += c;
  return Alphabet(std::move(l), true);
}

char Alphabet::fold(char c) const {
  if (fold_ && c >= 'a' && c <= 'z') return static_cast<char>(c - 'a' + 'A');
  return c;
}

int Alphabet::index_of(char c) const {
  return lut_[static_cast<unsigned char>(fold(c))];
}

char Alphabet::label(int idx) const {
  require(idx >= 0 && idx < size(), "alphabet: label index ", idx,
          " out of range [0,", size(), ")");
  return labels_[static_cast<size_t>(idx)];
}

bool Alphabet::is_digit(int idx) const {
  char c = label(idx);
  return c >= '0' && c <= '9';
}

std::string Alphabet::fold_word(const std::string& w) const {
  std::string out = w;
  for (char& c : out) c = fold(c);
  return out;
}

}  // namespace wordcrf
