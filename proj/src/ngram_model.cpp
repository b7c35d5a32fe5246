#include "wordcrf/ngram_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>

#include "wordcrf/common.hpp"

namespace wordcrf {

namespace {
constexpr int kBitsPerLabel = 7;  // label index + 1 fits 7 bits for k <= 126

std::string tuple_chars(std::span<const int> t, const Alphabet& a) {
  std::string s;
  for (int idx : t) s += a.label(idx);
  return s;
}

double parse_hexfloat(const std::string& tok, const char* what) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  require(end && *end == '\0', "ngram load: bad ", what, " value '", tok, "'");
  return v;
}
}  // namespace

std::uint64_t NGramModel::pack(std::span<const int> tuple) {
  std::uint64_t key = 0;
  for (size_t i = 0; i < tuple.size(); ++i) {
    key |= static_cast<std::uint64_t>(tuple[i] + 1) << (kBitsPerLabel * i);
  }
  return key;
}

void NGramModel::check_tuple(std::span<const int> tuple, int min_len,
                             int max_len) const {
  require(static_cast<int>(tuple.size()) >= min_len &&
              static_cast<int>(tuple.size()) <= max_len,
          "ngram: tuple length ", tuple.size(), " outside [", min_len, ",",
          max_len, "]");
  for (int idx : tuple) {
    require(idx >= 0 && idx < alphabet_.size(), "ngram: label index ", idx,
            " outside alphabet (null label is not scorable)");
  }
}

NGramModel NGramModel::build(const Lexicon& lexicon, const Alphabet& alphabet,
                             int order, double digit_constant) {
  require(order >= 2 && order <= 5, "ngram build: order ", order,
          " outside {2,3,4,5}");
  NGramModel m(alphabet);
  m.order_ = order;
  m.digit_constant_ = digit_constant;

  std::vector<int> idx;
  for (const std::string& w : lexicon.words()) {
    idx.clear();
    for (char c : w) idx.push_back(alphabet.index_of(c));
    const int L = static_cast<int>(idx.size());
    for (int len = 1; len <= order; ++len) {
      for (int p = 0; p + len <= L; ++p) {
        ++m.counts_[pack(std::span<const int>(idx).subspan(p, len))];
      }
    }
    m.total_ += static_cast<std::uint64_t>(L);
  }

  // Backoff weights, shortest contexts first so each level only needs the
  // conditionals of the level below it.
  std::vector<std::vector<std::uint64_t>> by_len(order);
  std::vector<int> unpacked;
  for (const auto& [key, cnt] : m.counts_) {
    (void)cnt;
    int len = 0;
    for (std::uint64_t k = key; k != 0; k >>= kBitsPerLabel) ++len;
    if (len <= order - 1) by_len[len].push_back(key);
  }
  std::vector<int> ctx, child;
  for (int len = 1; len <= order - 1; ++len) {
    std::sort(by_len[len].begin(), by_len[len].end());
    for (std::uint64_t key : by_len[len]) {
      ctx.assign(len, 0);
      std::uint64_t k = key;
      for (int i = 0; i < len; ++i) {
        ctx[i] = static_cast<int>(k & ((1u << kBitsPerLabel) - 1)) - 1;
        k >>= kBitsPerLabel;
      }
      const std::uint64_t c_ctx = m.counts_.at(key);
      std::uint64_t c_children = 0;
      double unseen_base = 0.0;
      child.assign(len + 1, 0);
      std::copy(ctx.begin(), ctx.end(), child.begin() + 1);
      for (int u = 0; u < alphabet.size(); ++u) {
        child[0] = u;
        auto it = m.counts_.find(pack(child));
        if (it != m.counts_.end()) {
          c_children += it->second;
        } else {
          unseen_base += m.conditional(
              std::span<const int>(child).subspan(0, child.size() - 1));
        }
      }
      const double reserved =
          static_cast<double>(c_ctx - c_children) / static_cast<double>(c_ctx);
      const double alpha = unseen_base > 0.0 ? reserved / unseen_base : 0.0;
      m.alphas_.emplace(key, alpha);
    }
  }
  return m;
}

std::uint64_t NGramModel::count(std::span<const int> tuple) const {
  check_tuple(tuple, 1, order_);
  auto it = counts_.find(pack(tuple));
  return it == counts_.end() ? 0 : it->second;
}

double NGramModel::conditional(std::span<const int> tuple) const {
  check_tuple(tuple, 1, order_);
  if (tuple.size() == 1) {
    if (total_ == 0) return 0.0;
    auto it = counts_.find(pack(tuple));
    return it == counts_.end()
               ? 0.0
               : static_cast<double>(it->second) / static_cast<double>(total_);
  }
  auto context = tuple.subspan(1);
  auto ctx_it = counts_.find(pack(context));
  if (ctx_it != counts_.end()) {
    auto it = counts_.find(pack(tuple));
    if (it != counts_.end()) {
      return static_cast<double>(it->second) /
             static_cast<double>(ctx_it->second);
    }
  }
  return backoff_weight(context) * conditional(tuple.first(tuple.size() - 1));
}

double NGramModel::family_sum(std::span<const int> context) const {
  require(static_cast<int>(context.size()) <= order_ - 1,
          "ngram: context length ", context.size(), " outside [0,", order_ - 1,
          "]");
  std::vector<int> t(context.size() + 1, 0);
  std::copy(context.begin(), context.end(), t.begin() + 1);
  double s = 0.0;
  for (int u = 0; u < alphabet_.size(); ++u) {
    t[0] = u;
    s += conditional(t);
  }
  return s;
}

double NGramModel::backoff_weight(std::span<const int> context) const {
  check_tuple(context, 1, order_ - 1);
  auto it = alphas_.find(pack(context));
  return it == alphas_.end() ? 1.0 : it->second;
}

double NGramModel::score(std::span<const int> tuple) const {
  check_tuple(tuple, 1, order_);
  bool digits = true;
  for (int idx : tuple) digits = digits && alphabet_.is_digit(idx);
  if (digits) return digit_constant_;
  double p = conditional(tuple);
  return p > 0.0 ? p : kScoreFloor;
}

double NGramModel::score_extended(std::span<const int> tuple) const {
  require(!tuple.empty(), "ngram: empty tuple");
  if (static_cast<int>(tuple.size()) <= order_) return score(tuple);
  bool digits = true;
  for (int idx : tuple) {
    require(idx >= 0 && idx < alphabet_.size(), "ngram: label index ", idx,
            " outside alphabet");
    digits = digits && alphabet_.is_digit(idx);
  }
  if (digits) return digit_constant_;
  return score(tuple.first(static_cast<size_t>(order_)));
}

void NGramModel::save(std::ostream& out) const {
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  counts.reserve(counts_.size());
  std::vector<int> t;
  for (const auto& [key, cnt] : counts_) {
    t.clear();
    for (std::uint64_t k = key; k != 0; k >>= kBitsPerLabel) {
      t.push_back(static_cast<int>(k & ((1u << kBitsPerLabel) - 1)) - 1);
    }
    counts.emplace_back(tuple_chars(t, alphabet_), cnt);
  }
  auto by_len_then_lex = [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  };
  std::sort(counts.begin(), counts.end(), by_len_then_lex);

  std::vector<std::pair<std::string, double>> alphas;
  alphas.reserve(alphas_.size());
  for (const auto& [key, a] : alphas_) {
    t.clear();
    for (std::uint64_t k = key; k != 0; k >>= kBitsPerLabel) {
      t.push_back(static_cast<int>(k & ((1u << kBitsPerLabel) - 1)) - 1);
    }
    alphas.emplace_back(tuple_chars(t, alphabet_), a);
  }
  std::sort(alphas.begin(), alphas.end(), by_len_then_lex);

  char buf[64];
  auto hex = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%a", v);
    return std::string(buf);
  };
  out << "wordcrf-ngram-v1\n";
  out << "alphabet " << alphabet_.labels() << "\n";
  out << "fold " << (alphabet_.folds_case() ? 1 : 0) << "\n";
  out << "order " << order_ << "\n";
  out << "digit_constant " << hex(digit_constant_) << "\n";
  out << "discount " << hex(0.0) << "\n";
  out << "floor " << hex(kScoreFloor) << "\n";
  out << "total " << total_ << "\n";
  out << "counts " << counts.size() << "\n";
  for (const auto& [chars, cnt] : counts) out << chars << " " << cnt << "\n";
  out << "alphas " << alphas.size() << "\n";
  for (const auto& [chars, a] : alphas) out << chars << " " << hex(a) << "\n";
  out << "end\n";
}

NGramModel NGramModel::load(std::istream& in, const Alphabet& alphabet) {
  NGramModel m(alphabet);
  std::string tok;
  auto expect = [&in, &tok](const char* kw) {
    require(static_cast<bool>(in >> tok) && tok == kw,
            "ngram load: expected '", kw, "', got '", tok, "'");
  };
  expect("wordcrf-ngram-v1");
  expect("alphabet");
  in >> tok;
  require(tok == alphabet.labels(), "ngram load: alphabet mismatch");
  expect("fold");
  int fold = 0;
  in >> fold;
  require((fold != 0) == alphabet.folds_case(),
          "ngram load: case rule mismatch");
  expect("order");
  in >> m.order_;
  require(m.order_ >= 2 && m.order_ <= 5, "ngram load: bad order ", m.order_);
  expect("digit_constant");
  in >> tok;
  m.digit_constant_ = parse_hexfloat(tok, "digit_constant");
  expect("discount");
  in >> tok;
  (void)parse_hexfloat(tok, "discount");
  expect("floor");
  in >> tok;
  (void)parse_hexfloat(tok, "floor");
  expect("total");
  in >> m.total_;
  expect("counts");
  size_t n = 0;
  in >> n;
  std::vector<int> t;
  for (size_t i = 0; i < n; ++i) {
    std::string chars;
    std::uint64_t cnt = 0;
    require(static_cast<bool>(in >> chars >> cnt), "ngram load: truncated counts");
    t.clear();
    for (char c : chars) {
      int idx = alphabet.index_of(c);
      require(idx >= 0, "ngram load: symbol '", c, "' outside alphabet");
      t.push_back(idx);
    }
    require(!t.empty() && static_cast<int>(t.size()) <= m.order_,
            "ngram load: tuple length out of range");
    m.counts_.emplace(pack(t), cnt);
  }
  expect("alphas");
  in >> n;
  for (size_t i = 0; i < n; ++i) {
    std::string chars;
    require(static_cast<bool>(in >> chars >> tok), "ngram load: truncated alphas");
    t.clear();
    for (char c : chars) {
      int idx = alphabet.index_of(c);
      require(idx >= 0, "ngram load: symbol '", c, "' outside alphabet");
      t.push_back(idx);
    }
    m.alphas_.emplace(pack(t), parse_hexfloat(tok, "alpha"));
  }
  expect("end");
  return m;
}

}  // namespace wordcrf
