// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lingeval/error.hpp"
#include "lingeval/unicode.hpp"

namespace lingeval {

using ordered_json = nlohmann::ordered_json;

enum class Direction { ToEnglish, FromEnglish };
enum class Dataset { ModeLing, Lingoly, Custom };
enum class ProblemType { Rosetta, Pattern, MatchUp, Monolingual, Computational, Text };
enum class Difficulty { Breakthrough, Foundation, Intermediate, Advanced, Round2, Unspecified };

namespace detail {

template <typename Enum, size_t N>
struct EnumNames {
  std::array<std::pair<Enum, std::string_view>, N> schema;
  std::array<std::string_view, N> display;

  std::string_view name(Enum e) const {
    for (const auto& [value, text] : schema)
      if (value == e) return text;
    return "unknown";
  }
  std::string_view pretty(Enum e) const {
    for (size_t i = 0; i < N; ++i)
      if (schema[i].first == e) return display[i];
    return "unknown";
  }
  std::optional<Enum> parse(std::string_view text) const {
    for (const auto& [value, name] : schema)
      if (name == text) return value;
    return std::nullopt;
  }
};

inline constexpr EnumNames<Direction, 2> kDirectionNames{
    {{{Direction::ToEnglish, "to_english"}, {Direction::FromEnglish, "from_english"}}},
    {"to English", "from English"}};

inline constexpr EnumNames<Dataset, 3> kDatasetNames{
    {{{Dataset::ModeLing, "modeling"}, {Dataset::Lingoly, "lingoly"}, {Dataset::Custom, "custom"}}},
    {"modeLing", "LINGOLY", "Custom"}};

inline constexpr EnumNames<ProblemType, 6> kProblemTypeNames{
    {{{ProblemType::Rosetta, "rosetta"},
      {ProblemType::Pattern, "pattern"},
      {ProblemType::MatchUp, "match_up"},
      {ProblemType::Monolingual, "monolingual"},
      {ProblemType::Computational, "computational"},
      {ProblemType::Text, "text"}}},
    {"Rosetta", "Pattern", "Match-up", "Monolingual", "Computational", "Text"}};

inline constexpr EnumNames<Difficulty, 6> kDifficultyNames{
    {{{Difficulty::Breakthrough, "breakthrough"},
      {Difficulty::Foundation, "foundation"},
      {Difficulty::Intermediate, "intermediate"},
      {Difficulty::Advanced, "advanced"},
      {Difficulty::Round2, "round2"},
      {Difficulty::Unspecified, "unspecified"}}},
    {"Breakthrough", "Foundation", "Intermediate", "Advanced", "Round 2", "Unspecified"}};

}  // namespace detail

inline std::string_view to_string(Direction d) { return detail::kDirectionNames.name(d); }
inline std::string_view to_string(Dataset d) { return detail::kDatasetNames.name(d); }
inline std::string_view to_string(ProblemType t) { return detail::kProblemTypeNames.name(t); }
inline std::string_view to_string(Difficulty d) { return detail::kDifficultyNames.name(d); }

inline std::string_view display_name(Dataset d) { return detail::kDatasetNames.pretty(d); }
inline std::string_view display_name(ProblemType t) { return detail::kProblemTypeNames.pretty(t); }
inline std::string_view display_name(Difficulty d) { return detail::kDifficultyNames.pretty(d); }

inline std::optional<Direction> parse_direction(std::string_view s) { return detail::kDirectionNames.parse(s); }
inline std::optional<Dataset> parse_dataset(std::string_view s) { return detail::kDatasetNames.parse(s); }
inline std::optional<ProblemType> parse_problem_type(std::string_view s) { return detail::kProblemTypeNames.parse(s); }
inline std::optional<Difficulty> parse_difficulty(std::string_view s) { return detail::kDifficultyNames.parse(s); }

struct TranslationPair {
  std::string source_text;
  std::string target_text;
  Direction direction = Direction::FromEnglish;

  bool operator==(const TranslationPair&) const = default;
};

/// One test phrase with the exemplars it ships with. Exemplar direction always equals the
/// instance direction; the on-disk schema does not store it per pair.
struct PuzzleInstance {
  std::string id;
  std::string language;
  std::vector<TranslationPair> exemplars;
  std::string test_phrase;
  std::vector<std::string> gold_answers;
  Direction direction = Direction::FromEnglish;
  Dataset dataset = Dataset::Custom;
  ProblemType problem_type = ProblemType::Rosetta;
  Difficulty difficulty = Difficulty::Unspecified;

  bool operator==(const PuzzleInstance&) const = default;
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const noexcept { return violations.empty(); }
};

inline ValidationReport validate_instance(const PuzzleInstance& instance) {
  ValidationReport report;
  auto blank = [](std::string_view s) { return unicode::trim(s).empty(); };
  if (blank(instance.id)) report.violations.emplace_back("id is empty");
  if (blank(instance.language)) report.violations.emplace_back("language is empty");
  if (blank(instance.test_phrase)) report.violations.emplace_back("test_phrase is empty");
  if (instance.gold_answers.empty()) report.violations.emplace_back("gold_answers is empty");
  for (size_t i = 0; i < instance.gold_answers.size(); ++i) {
    if (blank(instance.gold_answers[i]))
      report.violations.push_back("gold_answers[" + std::to_string(i) + "] is empty");
  }
  for (size_t i = 0; i < instance.exemplars.size(); ++i) {
    const auto& pair = instance.exemplars[i];
    if (blank(pair.source_text))
      report.violations.push_back("exemplars[" + std::to_string(i) + "].source is empty");
    if (blank(pair.target_text))
      report.violations.push_back("exemplars[" + std::to_string(i) + "].target is empty");
    if (pair.direction != instance.direction)
      report.violations.push_back("exemplars[" + std::to_string(i) + "] direction differs from instance");
    for (size_t j = 0; j < i; ++j) {
      if (instance.exemplars[j] == pair) {
        report.warnings.push_back("exemplars[" + std::to_string(i) + "] duplicates exemplars[" +
                                  std::to_string(j) + "]");
        break;
      }
    }
  }
  return report;
}

inline ordered_json to_json(const PuzzleInstance& instance) {
  ordered_json exemplars = ordered_json::array();
  for (const auto& pair : instance.exemplars)
    exemplars.push_back(ordered_json{{"source", pair.source_text}, {"target", pair.target_text}});
  return ordered_json{
      {"id", instance.id},
      {"language", instance.language},
      {"direction", to_string(instance.direction)},
      {"exemplars", std::move(exemplars)},
      {"test_phrase", instance.test_phrase},
      {"gold_answers", instance.gold_answers},
      {"dataset", to_string(instance.dataset)},
      {"problem_type", to_string(instance.problem_type)},
      {"difficulty", to_string(instance.difficulty)},
  };
}

/// Canonical single-line JSON: schema key order, compact separators, raw UTF-8.
inline std::string serialize_record(const PuzzleInstance& instance) {
  return to_json(instance).dump(-1, ' ', false);
}

inline std::string serialize_corpus(const std::vector<PuzzleInstance>& instances) {
  std::string out;
  for (const auto& instance : instances) {
    out += serialize_record(instance);
    out += '\n';
  }
  return out;
}

namespace detail {

[[noreturn]] inline void malformed(size_t line, const std::string& reason) {
  throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": " + reason);
}

inline std::string require_string(const nlohmann::json& obj, const char* key, size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) malformed(line, std::string("missing field '") + key + "'");
  if (!it->is_string()) malformed(line, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

template <typename Enum, typename Parse>
Enum optional_enum(const nlohmann::json& obj, const char* key, Enum fallback, Parse parse, size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) malformed(line, std::string("field '") + key + "' must be a string");
  auto value = parse(it->get<std::string>());
  if (!value) malformed(line, std::string("unknown ") + key + " '" + it->get<std::string>() + "'");
  return *value;
}

}  // namespace detail

/// Parses one canonical JSONL record. `line` is 1-based and only used in error messages.
inline PuzzleInstance parse_record(std::string_view text, size_t line) {
  static const std::unordered_set<std::string> kKnown = {
      "id", "language", "direction", "exemplars", "test_phrase", "gold_answers", "dataset", "problem_type", "difficulty"};
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    detail::malformed(line, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) detail::malformed(line, "record must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (!kKnown.contains(key)) detail::malformed(line, "unknown field '" + key + "'");

  PuzzleInstance instance;
  instance.id = detail::require_string(obj, "id", line);
  instance.language = detail::require_string(obj, "language", line);
  auto direction = parse_direction(detail::require_string(obj, "direction", line));
  if (!direction) detail::malformed(line, "direction must be 'to_english' or 'from_english'");
  instance.direction = *direction;
  instance.test_phrase = detail::require_string(obj, "test_phrase", line);

  auto exemplars = obj.find("exemplars");
  if (exemplars == obj.end()) detail::malformed(line, "missing field 'exemplars'");
  if (!exemplars->is_array()) detail::malformed(line, "field 'exemplars' must be an array");
  for (const auto& pair : *exemplars) {
    if (!pair.is_object()) detail::malformed(line, "exemplar must be an object");
    if (pair.size() != 2) detail::malformed(line, "exemplar must have exactly 'source' and 'target'");
    instance.exemplars.push_back(TranslationPair{detail::require_string(pair, "source", line),
                                                 detail::require_string(pair, "target", line),
                                                 instance.direction});
  }

  auto gold = obj.find("gold_answers");
  if (gold == obj.end()) detail::malformed(line, "missing field 'gold_answers'");
  if (!gold->is_array()) detail::malformed(line, "field 'gold_answers' must be an array");
  for (const auto& answer : *gold) {
    if (!answer.is_string()) detail::malformed(line, "gold_answers entries must be strings");
    instance.gold_answers.push_back(answer.get<std::string>());
  }

  instance.dataset = detail::optional_enum(obj, "dataset", Dataset::Custom, parse_dataset, line);
  instance.problem_type = detail::optional_enum(obj, "problem_type", ProblemType::Rosetta, parse_problem_type, line);
  instance.difficulty = detail::optional_enum(obj, "difficulty", Difficulty::Unspecified, parse_difficulty, line);

  ValidationReport report = validate_instance(instance);
  if (!report.ok()) detail::malformed(line, report.violations.front());
  return instance;
}

enum class CorpusFormat { CanonicalJsonl };

inline std::vector<PuzzleInstance> parse_corpus(std::string_view contents) {
  std::vector<PuzzleInstance> instances;
  std::unordered_set<std::string> ids;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < contents.size()) {
    size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    PuzzleInstance instance = parse_record(line, line_no);
    if (!ids.insert(instance.id).second) throw Error(ErrorCode::DuplicateId, instance.id);
    instances.push_back(std::move(instance));
  }
  if (instances.empty()) throw Error(ErrorCode::EmptyCorpus, "no records");
  return instances;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline std::vector<PuzzleInstance> load_corpus(const std::filesystem::path& path,
                                               CorpusFormat format = CorpusFormat::CanonicalJsonl) {
  (void)format;  // one format today
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::IoError, "corpus not found: " + path.string());
  return parse_corpus(read_file(path));
}

/// Read-only lookup over a loaded corpus.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<PuzzleInstance> instances) : instances_(std::move(instances)) {
    for (size_t i = 0; i < instances_.size(); ++i) {
      if (!index_.emplace(instances_[i].id, i).second) throw Error(ErrorCode::DuplicateId, instances_[i].id);
    }
  }

  const std::vector<PuzzleInstance>& instances() const noexcept { return instances_; }
  size_t size() const noexcept { return instances_.size(); }

  const PuzzleInstance* find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &instances_[it->second];
  }

 private:
  std::vector<PuzzleInstance> instances_;
  std::unordered_map<std::string, size_t> index_;
};

}  // namespace lingeval
