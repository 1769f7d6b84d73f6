// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lingeval/error.hpp"
#include "lingeval/unicode.hpp"

namespace lingeval {

// ---------------------------------------------------------------------------
// Answer extraction and exact match
// ---------------------------------------------------------------------------

struct NormalizedText {
  std::string original;
  std::string normalized;
};

namespace detail {

inline std::vector<std::string> normalized_tokens(std::string_view text) {
  std::string folded = unicode::nfc(unicode::to_lower(unicode::nfc(text)));
  std::vector<std::string> tokens;
  for (const std::string& raw : unicode::split_whitespace(folded)) {
    std::u32string cps = unicode::code_points(raw);
    size_t begin = 0;
    size_t end = cps.size();
    while (begin < end && unicode::is_punct(cps[begin])) ++begin;
    while (end > begin && unicode::is_punct(cps[end - 1])) --end;
    if (begin < end) tokens.push_back(unicode::to_utf8(std::u32string_view(cps).substr(begin, end - begin)));
  }
  return tokens;
}

inline std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

/// Answer groups found left to right without overlap, plus the text with every group's
/// markers replaced by spaces. Each group's content is the text between its closing "]**" and
/// the nearest "**[" before it, so content never contains either marker.
struct AnswerScan {
  std::vector<std::string> answers;
  std::string unmarked;
};

inline AnswerScan scan_answers(std::string_view text) {
  static constexpr std::string_view kOpen = "**[";
  static constexpr std::string_view kClose = "]**";
  AnswerScan scan;
  size_t pos = 0;
  while (true) {
    size_t open = text.find(kOpen, pos);
    if (open == std::string_view::npos) break;
    size_t close = text.find(kClose, open + kOpen.size());
    if (close == std::string_view::npos) break;
    size_t inner = text.rfind(kOpen, close - kOpen.size());
    std::string_view content = text.substr(inner + kOpen.size(), close - inner - kOpen.size());
    scan.unmarked.append(text.substr(pos, inner - pos));
    scan.unmarked += ' ';
    scan.unmarked.append(content);
    scan.unmarked += ' ';
    scan.answers.emplace_back(content);
    pos = close + kClose.size();
  }
  scan.unmarked.append(text.substr(std::min(pos, text.size())));
  return scan;
}

inline bool contains_tokens(const std::vector<std::string>& haystack, const std::vector<std::string>& needle) {
  if (needle.empty()) return true;
  if (needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

}  // namespace detail

/// NFC, lowercase, whitespace collapsed, punctuation stripped from token edges only, so
/// internal apostrophes ("tike'a") survive. Idempotent.
inline std::string normalize_text(std::string_view text) { return detail::join_tokens(detail::normalized_tokens(text)); }

inline NormalizedText normalize(std::string_view text) { return {std::string(text), normalize_text(text)}; }

/// Content of the last well-formed **[...]** group.
inline std::optional<std::string> extract_answer(std::string_view completion_text) {
  detail::AnswerScan scan = detail::scan_answers(completion_text);
  if (scan.answers.empty()) return std::nullopt;
  return scan.answers.back();
}

enum class MatchMode { Strict, Lenient };

inline bool exact_match(std::string_view completion_text, std::span<const std::string> gold_answers, MatchMode mode) {
  if (gold_answers.empty()) throw Error(ErrorCode::InvalidArgument, "gold_answers must be non-empty");
  detail::AnswerScan scan = detail::scan_answers(completion_text);
  if (mode == MatchMode::Strict) {
    if (scan.answers.empty()) return false;
    std::string answer = normalize_text(scan.answers.back());
    return std::any_of(gold_answers.begin(), gold_answers.end(),
                       [&](const std::string& gold) { return normalize_text(gold) == answer; });
  }
  std::vector<std::string> haystack = detail::normalized_tokens(scan.unmarked);
  return std::any_of(gold_answers.begin(), gold_answers.end(), [&](const std::string& gold) {
    return detail::contains_tokens(haystack, detail::normalized_tokens(gold));
  });
}

// ---------------------------------------------------------------------------
// chrF
// ---------------------------------------------------------------------------

inline constexpr double kChrfBeta = 2.0;
inline constexpr int kChrfMaxOrder = 6;

struct OrderCounts {
  uint64_t matched = 0;
  uint64_t hypothesis = 0;
  uint64_t reference = 0;

  OrderCounts& operator+=(const OrderCounts& o) {
    matched += o.matched;
    hypothesis += o.hypothesis;
    reference += o.reference;
    return *this;
  }
};

/// Per-order clipped match, hypothesis and reference n-gram totals (index 0 is order 1).
struct NGramStats {
  std::vector<OrderCounts> orders;

  explicit NGramStats(int max_order = kChrfMaxOrder) : orders(static_cast<size_t>(max_order)) {}

  NGramStats& operator+=(const NGramStats& o) {
    if (o.orders.size() != orders.size()) throw Error(ErrorCode::InvalidArgument, "n-gram order mismatch");
    for (size_t i = 0; i < orders.size(); ++i) orders[i] += o.orders[i];
    return *this;
  }
};

namespace detail {

inline std::u32string strip_whitespace(std::string_view text) {
  std::u32string out;
  for (char32_t cp : unicode::code_points(text))
    if (!unicode::is_space(cp)) out.push_back(cp);
  return out;
}

inline std::unordered_map<std::u32string, uint64_t> char_ngrams(const std::u32string& s, size_t n) {
  std::unordered_map<std::u32string, uint64_t> counts;
  if (s.size() < n) return counts;
  for (size_t i = 0; i + n <= s.size(); ++i) ++counts[s.substr(i, n)];
  return counts;
}

}  // namespace detail

inline NGramStats char_ngram_stats(std::string_view hypothesis, std::string_view reference,
                                   int max_order = kChrfMaxOrder) {
  if (max_order < 1) throw Error(ErrorCode::InvalidArgument, "max_order must be positive");
  std::u32string hyp = detail::strip_whitespace(hypothesis);
  std::u32string ref = detail::strip_whitespace(reference);
  NGramStats stats(max_order);
  for (int n = 1; n <= max_order; ++n) {
    auto hyp_counts = detail::char_ngrams(hyp, static_cast<size_t>(n));
    auto ref_counts = detail::char_ngrams(ref, static_cast<size_t>(n));
    OrderCounts& c = stats.orders[static_cast<size_t>(n - 1)];
    for (const auto& [gram, count] : hyp_counts) {
      c.hypothesis += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) c.matched += std::min(count, it->second);
    }
    for (const auto& [gram, count] : ref_counts) c.reference += count;
  }
  return stats;
}

/// Mean per-order F_beta over orders with at least one hypothesis or reference n-gram, x100.
inline double chrf_from_stats(const NGramStats& stats, double beta = kChrfBeta) {
  const double b2 = beta * beta;
  double total = 0.0;
  int effective = 0;
  for (const OrderCounts& c : stats.orders) {
    if (c.hypothesis == 0 && c.reference == 0) continue;
    ++effective;
    double p = c.hypothesis > 0 ? static_cast<double>(c.matched) / static_cast<double>(c.hypothesis) : 0.0;
    double r = c.reference > 0 ? static_cast<double>(c.matched) / static_cast<double>(c.reference) : 0.0;
    if (p + r == 0.0) continue;
    total += (1.0 + b2) * p * r / (b2 * p + r);
  }
  return effective == 0 ? 0.0 : 100.0 * total / effective;
}

inline double chrf(std::string_view hypothesis, std::string_view reference, double beta = kChrfBeta,
                   int max_order = kChrfMaxOrder) {
  if (detail::strip_whitespace(reference).empty()) throw Error(ErrorCode::EmptyReference, "reference is empty");
  return chrf_from_stats(char_ngram_stats(hypothesis, reference, max_order), beta);
}

inline double chrf2(std::string_view hypothesis, std::string_view reference) {
  return chrf(hypothesis, reference, kChrfBeta, kChrfMaxOrder);
}

using TextPair = std::pair<std::string, std::string>;  // (hypothesis, reference)

/// Pools n-gram counts over the corpus, then applies the chrF formula once.
inline double corpus_chrf(std::span<const TextPair> pairs, double beta = kChrfBeta, int max_order = kChrfMaxOrder) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus_chrf needs at least one pair");
  NGramStats pooled(max_order);
  for (const auto& [hyp, ref] : pairs) pooled += char_ngram_stats(hyp, ref, max_order);
  return chrf_from_stats(pooled, beta);
}

inline double corpus_chrf2(std::span<const TextPair> pairs) { return corpus_chrf(pairs, kChrfBeta, kChrfMaxOrder); }

// ---------------------------------------------------------------------------
// Corpus BLEU
// ---------------------------------------------------------------------------

inline constexpr int kBleuMaxOrder = 4;

struct BleuOptions {
  /// 0 disables smoothing. Otherwise a zero-match order uses epsilon / total; diagnostics only.
  double smoothing_epsilon = 0.0;
};

using Tokens = std::vector<std::string>;
using TokenPair = std::pair<Tokens, Tokens>;  // (hypothesis, reference)

/// Whitespace split after NFC.
inline Tokens bleu_tokenize(std::string_view text) { return unicode::split_whitespace(unicode::nfc(text)); }

struct BleuStats {
  std::array<uint64_t, kBleuMaxOrder> matched{};
  std::array<uint64_t, kBleuMaxOrder> total{};
  uint64_t hypothesis_length = 0;
  uint64_t reference_length = 0;

  BleuStats& operator+=(const BleuStats& o) {
    for (size_t i = 0; i < matched.size(); ++i) {
      matched[i] += o.matched[i];
      total[i] += o.total[i];
    }
    hypothesis_length += o.hypothesis_length;
    reference_length += o.reference_length;
    return *this;
  }
};

inline BleuStats bleu_stats(const Tokens& hypothesis, const Tokens& reference) {
  BleuStats s;
  s.hypothesis_length = hypothesis.size();
  s.reference_length = reference.size();
  for (size_t n = 1; n <= kBleuMaxOrder; ++n) {
    std::map<std::vector<std::string>, uint64_t> ref_counts;
    if (reference.size() >= n)
      for (size_t i = 0; i + n <= reference.size(); ++i)
        ++ref_counts[std::vector<std::string>(reference.begin() + i, reference.begin() + i + n)];
    std::map<std::vector<std::string>, uint64_t> hyp_counts;
    if (hypothesis.size() >= n)
      for (size_t i = 0; i + n <= hypothesis.size(); ++i)
        ++hyp_counts[std::vector<std::string>(hypothesis.begin() + i, hypothesis.begin() + i + n)];
    for (const auto& [gram, count] : hyp_counts) {
      s.total[n - 1] += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) s.matched[n - 1] += std::min(count, it->second);
    }
  }
  return s;
}

inline double bleu_from_stats(const BleuStats& s, const BleuOptions& options = {}) {
  if (s.hypothesis_length == 0) return 0.0;
  double log_sum = 0.0;
  for (size_t i = 0; i < kBleuMaxOrder; ++i) {
    if (s.total[i] == 0) return 0.0;
    double p;
    if (s.matched[i] == 0) {
      if (options.smoothing_epsilon <= 0.0) return 0.0;
      p = options.smoothing_epsilon / static_cast<double>(s.total[i]);
    } else {
      p = static_cast<double>(s.matched[i]) / static_cast<double>(s.total[i]);
    }
    log_sum += std::log(p) / kBleuMaxOrder;
  }
  double c = static_cast<double>(s.hypothesis_length);
  double r = static_cast<double>(s.reference_length);
  double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return 100.0 * bp * std::exp(log_sum);
}

inline double corpus_bleu(std::span<const TokenPair> pairs, const BleuOptions& options = {}) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus_bleu needs at least one pair");
  BleuStats pooled;
  for (const auto& [hyp, ref] : pairs) pooled += bleu_stats(hyp, ref);
  return bleu_from_stats(pooled, options);
}

}  // namespace lingeval
