#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "wordcrf/alphabet.hpp"
#include "wordcrf/lexicon.hpp"

namespace wordcrf {

// Character-level backoff n-gram model over a lexicon.
//
// Tuples are in reading order: t = (u, s_1, .., s_{m-1}) where s is the
// successor context of u. conditional(t) is the probability of u given s,
// normalized over u:
//   m = 1:            C(u) / total
//   C(u + s) > 0:     C(u + s) / C(s)
//   otherwise:        alpha(s) * conditional(u + parent(s))
// where parent(s) drops the last (most distant) context label. alpha(s)
// spreads the mass a context reserves at word starts over its unseen
// continuations,
//   alpha(s) = (C(s) - sum_u C(u + s)) / C(s)  /  sum_unseen conditional,
// and unseen contexts pass through with alpha = 1. Observed tuples keep
// exact count ratios, and each conditional family sums to one whenever a
// context with reserved mass has at least one unseen continuation of
// positive parent probability (any lexicon that leaves part of the
// alphabet unused before each context, e.g. digit-free words).
//
// score() layers the query-time rules on top: all-digit tuples short-circuit
// to digit_constant, and zero probabilities are floored.
class NGramModel {
 public:
  static constexpr double kScoreFloor = 1e-6;
  static constexpr double kDigitConstant = 0.4;

  // order in {2,3,4,5}.
  static NGramModel build(const Lexicon& lexicon, const Alphabet& alphabet,
                          int order, double digit_constant = kDigitConstant);

  int order() const { return order_; }
  double digit_constant() const { return digit_constant_; }
  const Alphabet& alphabet() const { return alphabet_; }

  // Raw substring count; tuple length in [1, order].
  std::uint64_t count(std::span<const int> tuple) const;
  std::uint64_t total_unigrams() const { return total_; }

  // Smoothed conditional, no digit override, no floor. Length in [1, order].
  double conditional(std::span<const int> tuple) const;
  // sum over u of conditional(u + context); context length in [0, order-1].
  double family_sum(std::span<const int> context) const;
  // Backoff weight of a context; length in [1, order-1]. 1 for unseen.
  double backoff_weight(std::span<const int> context) const;

  // Query-time score; tuple length in [1, order].
  double score(std::span<const int> tuple) const;
  // score() extended to longer tuples: a tuple of length > order is scored
  // by its first `order` labels (backoff with weight 1 past the table).
  double score_extended(std::span<const int> tuple) const;

  // Canonical text dump; save(load(save(m))) is byte-identical to save(m).
  void save(std::ostream& out) const;
  static NGramModel load(std::istream& in, const Alphabet& alphabet);

 private:
  explicit NGramModel(const Alphabet& alphabet) : alphabet_(alphabet) {}

  static std::uint64_t pack(std::span<const int> tuple);
  void check_tuple(std::span<const int> tuple, int min_len, int max_len) const;

  Alphabet alphabet_;
  int order_ = 0;
  double digit_constant_ = kDigitConstant;
  std::uint64_t total_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> counts_;
  std::unordered_map<std::uint64_t, double> alphas_;
};

}  // namespace wordcrf
