// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>

#include <json.hpp>

#include "lingeval/corpus.hpp"
#include "lingeval/error.hpp"
#include "lingeval/hash.hpp"
#include "lingeval/metrics.hpp"
#include "lingeval/unicode.hpp"

namespace lingeval {

struct RunKey {
  std::string instance_id;
  std::string setting_fingerprint;
  std::optional<std::string> generator_id;
  std::string deducer_id;
  int repetition = 0;

  bool operator==(const RunKey&) const = default;

  auto tie() const { return std::tie(generator_id, deducer_id, instance_id, repetition, setting_fingerprint); }
  bool operator<(const RunKey& o) const { return tie() < o.tie(); }

  std::string hash() const {
    Sha256 h;
    h.field(instance_id).field(setting_fingerprint);
    h.field(generator_id ? "generator:" + *generator_id : std::string("generator:none"));
    h.field(deducer_id).field(std::to_string(repetition));
    return h.hex();
  }
};

inline ordered_json to_json(const RunKey& key) {
  return ordered_json{{"instance_id", key.instance_id},
                      {"setting_fingerprint", key.setting_fingerprint},
                      {"generator", key.generator_id ? ordered_json(*key.generator_id) : ordered_json(nullptr)},
                      {"deducer", key.deducer_id},
                      {"repetition", key.repetition}};
}

inline RunKey run_key_from_json(const nlohmann::json& j) {
  RunKey key;
  key.instance_id = j.at("instance_id").get<std::string>();
  key.setting_fingerprint = j.at("setting_fingerprint").get<std::string>();
  if (!j.at("generator").is_null()) key.generator_id = j.at("generator").get<std::string>();
  key.deducer_id = j.at("deducer").get<std::string>();
  key.repetition = j.at("repetition").get<int>();
  return key;
}

struct Scores {
  bool em_strict = false;
  bool em_lenient = false;
  double chrf2 = 0.0;  // sentence-level, extracted answer vs first gold

  bool operator==(const Scores&) const = default;
};

struct RunRecord {
  RunKey key;
  std::string setting_label;
  std::optional<std::string> stage1_text;
  std::string final_text;
  std::optional<std::string> extracted_answer;
  Scores scores;
  int64_t stage1_latency_ms = 0;
  int64_t final_latency_ms = 0;
  int attempts = 0;
  bool truncated = false;
  std::optional<std::string> error;  // set when the cell failed; such records are never cached

  bool ok() const noexcept { return !error.has_value(); }
  bool operator==(const RunRecord&) const = default;
};

inline ordered_json to_json(const RunRecord& r) {
  auto opt = [](const std::optional<std::string>& s) { return s ? ordered_json(*s) : ordered_json(nullptr); };
  return ordered_json{
      {"key", to_json(r.key)},
      {"setting", r.setting_label},
      {"stage1_text", opt(r.stage1_text)},
      {"final_text", r.final_text},
      {"extracted_answer", opt(r.extracted_answer)},
      {"scores", ordered_json{{"em_strict", r.scores.em_strict},
                              {"em_lenient", r.scores.em_lenient},
                              {"chrf2", r.scores.chrf2}}},
      {"timing", ordered_json{{"stage1_ms", r.stage1_latency_ms}, {"final_ms", r.final_latency_ms}}},
      {"attempts", r.attempts},
      {"truncated", r.truncated},
      {"error", opt(r.error)},
  };
}

inline RunRecord run_record_from_json(const nlohmann::json& j) {
  auto opt = [](const nlohmann::json& v) -> std::optional<std::string> {
    if (v.is_null()) return std::nullopt;
    return v.get<std::string>();
  };
  RunRecord r;
  r.key = run_key_from_json(j.at("key"));
  r.setting_label = j.at("setting").get<std::string>();
  r.stage1_text = opt(j.at("stage1_text"));
  r.final_text = j.at("final_text").get<std::string>();
  r.extracted_answer = opt(j.at("extracted_answer"));
  const auto& s = j.at("scores");
  r.scores = Scores{s.at("em_strict").get<bool>(), s.at("em_lenient").get<bool>(), s.at("chrf2").get<double>()};
  r.stage1_latency_ms = j.at("timing").at("stage1_ms").get<int64_t>();
  r.final_latency_ms = j.at("timing").at("final_ms").get<int64_t>();
  r.attempts = j.at("attempts").get<int>();
  r.truncated = j.at("truncated").get<bool>();
  r.error = opt(j.at("error"));
  return r;
}

inline std::string serialize_run_record(const RunRecord& r) { return to_json(r).dump(-1, ' ', false); }

/// Hypothesis used for the n-gram metrics: the extracted answer, or empty when none was found.
inline std::string scoring_hypothesis(const RunRecord& r) {
  return r.extracted_answer ? unicode::nfc(*r.extracted_answer) : std::string{};
}

inline std::string scoring_reference(const PuzzleInstance& instance) { return unicode::nfc(instance.gold_answers.front()); }

/// Recomputes extraction and scores from final_text. Idempotent.
inline void score_record(RunRecord& record, const PuzzleInstance& instance) {
  if (!record.ok()) {
    record.extracted_answer.reset();
    record.scores = {};
    return;
  }
  record.extracted_answer = extract_answer(record.final_text);
  record.scores.em_strict = exact_match(record.final_text, instance.gold_answers, MatchMode::Strict);
  record.scores.em_lenient = exact_match(record.final_text, instance.gold_answers, MatchMode::Lenient);
  record.scores.chrf2 = chrf2(scoring_hypothesis(record), scoring_reference(instance));
}

}  // namespace lingeval
