// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include <json.hpp>

#include "lingeval/metrics.hpp"
#include "oracle.hpp"
#include "test_support.hpp"

namespace lingeval {
namespace {

using testing::error_code_of;

const std::vector<std::string> kGold{"ŋau manu koe"};

nlohmann::json metric_fixture() { return nlohmann::json::parse(testing::fixture_text("metric_oracle.json")); }

std::vector<TokenPair> tokenized(const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::vector<TokenPair> out;
  for (const auto& [h, r] : pairs) out.emplace_back(bleu_tokenize(h), bleu_tokenize(r));
  return out;
}

TEST(Extract, LastWellFormedGroup) {
  EXPECT_EQ(extract_answer("…reasoning… **[ŋau manu koe]**"), "ŋau manu koe");
  EXPECT_EQ(extract_answer("no brackets here"), std::nullopt);
  EXPECT_EQ(extract_answer("**[a]** then **[b]**"), "b");
  EXPECT_EQ(extract_answer("**[a]** then **[b"), "a");
  EXPECT_EQ(extract_answer("**[outer **[inner]** tail]**"), "inner");
  EXPECT_EQ(extract_answer("**[]**"), "");
  EXPECT_EQ(extract_answer("**[multi\nline]**"), "multi\nline");
}

TEST(ExactMatch, PaperStyleCases) {
  EXPECT_TRUE(exact_match("**[ŋau manu koe]**", kGold, MatchMode::Strict));
  EXPECT_TRUE(exact_match("**[ŋau manu koe]**", kGold, MatchMode::Lenient));
  EXPECT_FALSE(exact_match("The answer is ŋau manu koe.", kGold, MatchMode::Strict));
  EXPECT_TRUE(exact_match("The answer is ŋau manu koe.", kGold, MatchMode::Lenient));
  const std::string refusal = "It is impossible to determine the translation from these examples.";
  EXPECT_FALSE(exact_match(refusal, kGold, MatchMode::Strict));
  EXPECT_FALSE(exact_match(refusal, kGold, MatchMode::Lenient));
}

TEST(ExactMatch, Normalization) {
  EXPECT_TRUE(exact_match("**[  ŊAU   Manu\tkoe. ]**", kGold, MatchMode::Strict));
  EXPECT_TRUE(exact_match("**[\"ŋau manu koe\"]**", kGold, MatchMode::Strict));
  EXPECT_FALSE(exact_match("**[ŋau koe manu]**", kGold, MatchMode::Strict));
  // Internal apostrophes are part of the word.
  const std::vector<std::string> gold{"tike'a au koe"};
  EXPECT_TRUE(exact_match("**[Tike'a au koe!]**", gold, MatchMode::Strict));
  EXPECT_FALSE(exact_match("**[tikea au koe]**", gold, MatchMode::Strict));
  // NFC: decomposed tātou equals precomposed.
  const std::vector<std::string> nfc_gold{"tātou"};
  EXPECT_TRUE(exact_match("**[ta\xCC\x84tou]**", nfc_gold, MatchMode::Strict));
  // Lenient requires whole tokens.
  EXPECT_FALSE(exact_match("xŋau manu koe", kGold, MatchMode::Lenient));
  EXPECT_TRUE(exact_match("first **[ŋau]** manu koe", kGold, MatchMode::Lenient));
  EXPECT_EQ(error_code_of([] { exact_match("x", std::vector<std::string>{}, MatchMode::Strict); }),
            ErrorCode::InvalidArgument);
}

TEST(ExactMatch, AnyGoldAccepted) {
  const std::vector<std::string> golds{"ŋau manu koe", "manu ŋau koe"};
  EXPECT_TRUE(exact_match("**[manu ŋau koe]**", golds, MatchMode::Strict));
}

TEST(ExactMatch, NormalizeIsIdempotent) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    std::string s = oracle::random_text(rng, 30) + " “Ŋ.” " + oracle::random_text(rng, 10);
    std::string once = normalize_text(s);
    EXPECT_EQ(normalize_text(once), once);
  }
}

TEST(ExactMatch, StrictImpliesLenientFuzz) {
  std::mt19937_64 rng(2026);
  const std::vector<std::string> pieces = {"ŋau", "manu", "koe", "**[", "]**", " ", ".", "\"", "Ŋau", "x'y",
                                           "**", "[", "]", "\n", "tātou", "ta\xCC\x84tou", ","};
  std::uniform_int_distribution<size_t> pick(0, pieces.size() - 1), len(0, 14);
  size_t strict_hits = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string completion, gold;
    for (size_t k = 0, n = len(rng); k < n; ++k) completion += pieces[pick(rng)];
    for (size_t k = 0, n = 1 + len(rng) % 3; k < n; ++k) gold += (k ? " " : "") + pieces[pick(rng)];
    if (i % 3 == 0) completion += "**[" + gold + "]**";
    std::vector<std::string> golds{gold};
    bool strict = exact_match(completion, golds, MatchMode::Strict);
    strict_hits += strict;
    if (strict) {
      EXPECT_TRUE(exact_match(completion, golds, MatchMode::Lenient)) << completion << " | " << gold;
    }
  }
  EXPECT_GT(strict_hits, 100u);
}

TEST(Chrf, IdentityAndDisjoint) {
  EXPECT_EQ(chrf2("ŋau manu koe", "ŋau manu koe"), 100.0);
  EXPECT_EQ(chrf2("a", "a"), 100.0);
  EXPECT_EQ(chrf2("abc", "xyz"), 0.0);
  EXPECT_EQ(chrf2("", "xyz"), 0.0);
  // Whitespace is removed before counting.
  EXPECT_EQ(chrf2("ŋaumanukoe", "ŋau manu koe"), 100.0);
  EXPECT_EQ(error_code_of([] { chrf2("abc", ""); }), ErrorCode::EmptyReference);
  EXPECT_EQ(error_code_of([] { chrf2("abc", " \t "); }), ErrorCode::EmptyReference);
}

TEST(Chrf, PinnedFixtureValues) {
  auto fx = metric_fixture();
  EXPECT_NEAR(chrf2("ŋau koe manu", "ŋau manu koe"), fx["chrf2_reordered"].get<double>(), 1e-12);
  std::vector<TextPair> pairs;
  for (size_t i = 0; i < fx["chrf_pairs"].size(); ++i) {
    auto h = fx["chrf_pairs"][i][0].get<std::string>(), r = fx["chrf_pairs"][i][1].get<std::string>();
    EXPECT_NEAR(chrf2(h, r), fx["chrf2_sentence"][i].get<double>(), 1e-12);
    pairs.emplace_back(h, r);
  }
  double pooled = corpus_chrf2(pairs);
  EXPECT_NEAR(pooled, fx["chrf2_corpus"].get<double>(), 1e-12);
  double mean = (fx["chrf2_sentence"][0].get<double>() + fx["chrf2_sentence"][1].get<double>()) / 2;
  EXPECT_GT(std::abs(pooled - mean), 1e-3);
}

TEST(Chrf, MatchesBruteForceOracle) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 400; ++i) {
    std::string h = oracle::random_text(rng, 40), r = oracle::random_text(rng, 40);
    if (oracle::chrf_counts(r, r).ref[0] == 0) continue;
    EXPECT_NEAR(chrf2(h, r), oracle::chrf(h, r), 1e-9) << h << " | " << r;
    EXPECT_NEAR(chrf(h, r, 1.0), oracle::chrf(h, r, 1.0), 1e-9);
  }
}

TEST(Chrf, BetaDuality) {
  std::mt19937_64 rng(99);
  int checked = 0;
  while (checked < 100) {
    std::string h = oracle::random_text(rng, 30), r = oracle::random_text(rng, 30);
    if (oracle::chrf_counts(h, h).ref[0] == 0 || oracle::chrf_counts(r, r).ref[0] == 0) continue;
    for (double beta : {2.0, 0.5, 3.0})
      EXPECT_NEAR(chrf(h, r, beta), chrf(r, h, 1.0 / beta), 1e-9);
    ++checked;
  }
}

TEST(Chrf, RecallWeighted) {
  // Short hypothesis covering part of the reference: beta 2 rewards recall over precision.
  EXPECT_LT(chrf("ŋau", "ŋau manu koe", 2.0), chrf("ŋau", "ŋau manu koe", 0.5));
}

TEST(Chrf, BoundsAndPermutation) {
  std::mt19937_64 rng(5);
  std::vector<TextPair> pairs;
  for (int i = 0; i < 50; ++i) {
    std::string h = oracle::random_text(rng, 25), r = oracle::random_text(rng, 25) + "k";
    double v = chrf2(h, r);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 100.0);
    pairs.emplace_back(h, r);
  }
  double a = corpus_chrf2(pairs);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  EXPECT_NEAR(corpus_chrf2(pairs), a, 1e-12);
}

TEST(CorpusChrf, PoolingRules) {
  std::vector<TextPair> one{{"ŋau koe manu", "ŋau manu koe"}};
  EXPECT_NEAR(corpus_chrf2(one), chrf2("ŋau koe manu", "ŋau manu koe"), 1e-12);
  std::vector<TextPair> same{{"ŋau", "ŋau"}, {"tike'a au koe", "tike'a au koe"}};
  EXPECT_EQ(corpus_chrf2(same), 100.0);
  EXPECT_EQ(error_code_of([] { corpus_chrf2(std::vector<TextPair>{}); }), ErrorCode::EmptyCorpus);
}

TEST(CorpusChrf, MatchesOracle) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (int i = 0; i < 5; ++i) pairs.emplace_back(oracle::random_text(rng, 30), oracle::random_text(rng, 30));
    std::vector<TextPair> lib(pairs.begin(), pairs.end());
    EXPECT_NEAR(corpus_chrf2(lib), oracle::corpus_chrf(pairs), 1e-9);
  }
}

TEST(Bleu, Basics) {
  std::vector<std::pair<std::string, std::string>> identical{{"the bird bites you", "the bird bites you"},
                                                             {"we hit the bird now", "we hit the bird now"}};
  EXPECT_NEAR(corpus_bleu(tokenized(identical)), 100.0, 1e-12);
  std::vector<std::pair<std::string, std::string>> short_one{{"ŋau manu koe", "ŋau manu koe"}};
  EXPECT_EQ(corpus_bleu(tokenized(short_one)), 0.0);
  BleuOptions smooth;
  smooth.smoothing_epsilon = 0.1;
  EXPECT_EQ(corpus_bleu(tokenized(short_one), smooth), 0.0);  // no 4-grams at all
  std::vector<std::pair<std::string, std::string>> empty_hyp{{"", "the bird bites you"}};
  EXPECT_EQ(corpus_bleu(tokenized(empty_hyp)), 0.0);
  EXPECT_EQ(error_code_of([] { corpus_bleu(std::vector<TokenPair>{}); }), ErrorCode::EmptyCorpus);
}

TEST(Bleu, PinnedFixtureValue) {
  auto fx = metric_fixture();
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& p : fx["bleu_pairs"]) pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
  EXPECT_NEAR(corpus_bleu(tokenized(pairs)), fx["bleu_corpus"].get<double>(), 1e-9);
}

TEST(Bleu, BrevityPenalty) {
  std::vector<std::pair<std::string, std::string>> shorter{{"we hit the bird", "we hit the bird now"}};
  EXPECT_NEAR(corpus_bleu(tokenized(shorter)), 100.0 * std::exp(1.0 - 5.0 / 4.0), 1e-9);
}

TEST(Bleu, MatchesBruteForceOracle) {
  std::mt19937_64 rng(3);
  int nonzero = 0;
  for (int t = 0; t < 300; ++t) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (int i = 0; i < 4; ++i) {
      std::string r = oracle::random_sentence(rng, 9);
      std::string h = (t % 2) ? r + " " + oracle::random_sentence(rng, 2) : oracle::random_sentence(rng, 9);
      pairs.emplace_back(h, r);
    }
    double expected = oracle::corpus_bleu(pairs);
    nonzero += expected > 0;
    EXPECT_NEAR(corpus_bleu(tokenized(pairs)), expected, 1e-9);
  }
  EXPECT_GT(nonzero, 50);
}

}  // namespace
}  // namespace lingeval
