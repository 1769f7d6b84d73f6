// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <unicode/uchar.h>

#include <json.hpp>

#include "lingeval/corpus.hpp"
#include "lingeval/error.hpp"
#include "lingeval/family_oracle.hpp"
#include "lingeval/metrics.hpp"
#include "lingeval/run_record.hpp"
#include "lingeval/unicode.hpp"

namespace lingeval {

// ---------------------------------------------------------------------------
// Number formatting
// ---------------------------------------------------------------------------

inline double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

/// Fixed two-decimal rendering; never prints "-0.00".
inline std::string format_2dp(double value) {
  double r = round_to(value, 2);
  if (r == 0.0) r = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

/// "+29.00", "-3.50", "+0.00".
inline std::string format_signed_2dp(double value) {
  std::string s = format_2dp(value);
  return s.front() == '-' ? s : "+" + s;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

enum class GroupField { Language, Dataset, ProblemType, Difficulty, Generator, Deducer, Setting };

inline std::string_view to_string(GroupField f) {
  switch (f) {
    case GroupField::Language: return "language";
    case GroupField::Dataset: return "dataset";
    case GroupField::ProblemType: return "problem_type";
    case GroupField::Difficulty: return "difficulty";
    case GroupField::Generator: return "generator";
    case GroupField::Deducer: return "deducer";
    case GroupField::Setting: return "setting";
  }
  return "?";
}

inline std::optional<GroupField> parse_group_field(std::string_view s) {
  for (GroupField f : {GroupField::Language, GroupField::Dataset, GroupField::ProblemType, GroupField::Difficulty,
                       GroupField::Generator, GroupField::Deducer, GroupField::Setting})
    if (to_string(f) == s) return f;
  if (s == "type") return GroupField::ProblemType;
  return std::nullopt;
}

/// Parses "difficulty,problem_type".
inline std::vector<GroupField> parse_group_by(std::string_view spec) {
  std::vector<GroupField> out;
  size_t start = 0;
  while (start <= spec.size()) {
    size_t comma = spec.find(',', start);
    const std::string part = unicode::trim(spec.substr(start, comma == std::string_view::npos ? spec.npos : comma - start));
    if (!part.empty()) {
      auto f = parse_group_field(part);
      if (!f) throw Error(ErrorCode::InvalidArgument, "unknown group-by field '" + std::string(part) + "'");
      out.push_back(*f);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct RepetitionScore {
  int repetition = 0;
  size_t n = 0;
  double em_strict = 0.0;
  double em_lenient = 0.0;
  double chrf2 = 0.0;
  double bleu = 0.0;
};

struct ScoreReport {
  std::vector<std::pair<GroupField, std::string>> key;
  size_t n_instances = 0;  // distinct instances in the group
  size_t n_records = 0;    // scored records
  size_t n_missing = 0;    // failed cells
  double em_strict = 0.0;  // percent
  double em_lenient = 0.0;
  double chrf2 = 0.0;
  double bleu = 0.0;
  std::vector<RepetitionScore> per_repetition;

  std::optional<std::string> value(GroupField f) const {
    for (const auto& [field, v] : key)
      if (field == f) return v;
    return std::nullopt;
  }
};

namespace detail {

/// Sort rank for a group value: enum order for typed fields, else lexical.
struct GroupValue {
  int rank = 0;
  std::string text;
  auto operator<=>(const GroupValue&) const = default;
};

inline GroupValue group_value(GroupField f, const RunRecord& r, const PuzzleInstance& inst) {
  switch (f) {
    case GroupField::Language: return {0, inst.language};
    case GroupField::Dataset: return {static_cast<int>(inst.dataset), std::string(display_name(inst.dataset))};
    case GroupField::ProblemType:
      return {static_cast<int>(inst.problem_type), std::string(display_name(inst.problem_type))};
    case GroupField::Difficulty: return {static_cast<int>(inst.difficulty), std::string(display_name(inst.difficulty))};
    case GroupField::Generator: return {0, r.key.generator_id.value_or("-")};
    case GroupField::Deducer: return {0, r.key.deducer_id};
    case GroupField::Setting: return {0, r.setting_label};
  }
  return {};
}

}  // namespace detail

/// Groups records by `group_by` (empty = one overall group). EM is the mean over repetitions of
/// the per-repetition percent correct; chrF2 and BLEU are pooled per repetition, then averaged.
/// Groups whose every record failed are skipped and reported through `warnings`.
inline std::vector<ScoreReport> aggregate(const std::vector<RunRecord>& records, const Corpus& corpus,
                                          const std::vector<GroupField>& group_by,
                                          std::vector<std::string>* warnings = nullptr) {
  struct Bucket {
    std::vector<std::pair<const RunRecord*, const PuzzleInstance*>> members;
  };
  std::map<std::vector<detail::GroupValue>, Bucket> buckets;
  for (const RunRecord& r : records) {
    const PuzzleInstance* inst = corpus.find(r.key.instance_id);
    if (!inst) throw Error(ErrorCode::InvalidArgument, "record references unknown instance '" + r.key.instance_id + "'");
    std::vector<detail::GroupValue> k;
    for (GroupField f : group_by) k.push_back(detail::group_value(f, r, *inst));
    buckets[k].members.emplace_back(&r, inst);
  }

  std::vector<ScoreReport> out;
  for (const auto& [k, bucket] : buckets) {
    ScoreReport report;
    for (size_t i = 0; i < group_by.size(); ++i) report.key.emplace_back(group_by[i], k[i].text);
    std::set<std::string> instances;
    std::map<int, std::vector<std::pair<const RunRecord*, const PuzzleInstance*>>> by_rep;
    for (const auto& m : bucket.members) {
      instances.insert(m.first->key.instance_id);
      if (!m.first->ok()) {
        ++report.n_missing;
        continue;
      }
      ++report.n_records;
      by_rep[m.first->key.repetition].push_back(m);
    }
    report.n_instances = instances.size();
    if (by_rep.empty()) {
      if (warnings) {
        std::string name;
        for (const auto& [f, v] : report.key) name += std::string(to_string(f)) + "=" + v + " ";
        warnings->push_back("EmptyGroup: " + (name.empty() ? std::string("all") : name) + "has no scored records");
      }
      continue;
    }
    for (const auto& [rep, members] : by_rep) {
      RepetitionScore rs;
      rs.repetition = rep;
      rs.n = members.size();
      size_t strict = 0, lenient = 0;
      std::vector<TextPair> text_pairs;
      std::vector<TokenPair> token_pairs;
      for (const auto& [r, inst] : members) {
        strict += r->scores.em_strict;
        lenient += r->scores.em_lenient;
        std::string hyp = scoring_hypothesis(*r);
        std::string ref = scoring_reference(*inst);
        token_pairs.emplace_back(bleu_tokenize(hyp), bleu_tokenize(ref));
        text_pairs.emplace_back(std::move(hyp), std::move(ref));
      }
      rs.em_strict = 100.0 * static_cast<double>(strict) / static_cast<double>(rs.n);
      rs.em_lenient = 100.0 * static_cast<double>(lenient) / static_cast<double>(rs.n);
      rs.chrf2 = corpus_chrf2(text_pairs);
      rs.bleu = corpus_bleu(token_pairs);
      report.per_repetition.push_back(rs);
    }
    const double reps = static_cast<double>(report.per_repetition.size());
    for (const RepetitionScore& rs : report.per_repetition) {
      report.em_strict += rs.em_strict / reps;
      report.em_lenient += rs.em_lenient / reps;
      report.chrf2 += rs.chrf2 / reps;
      report.bleu += rs.bleu / reps;
    }
    out.push_back(std::move(report));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grids and deltas
// ---------------------------------------------------------------------------

/// Rectangular table of optional percents, e.g. difficulty rows by problem-type columns.
struct Grid {
  std::string corner;
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::optional<double>> cells;  // row-major

  Grid() = default;
  Grid(std::string corner_label, std::vector<std::string> row_labels, std::vector<std::string> col_labels)
      : corner(std::move(corner_label)),
        rows(std::move(row_labels)),
        cols(std::move(col_labels)),
        cells(rows.size() * cols.size()) {}

  std::optional<double>& at(size_t r, size_t c) { return cells.at(r * cols.size() + c); }
  const std::optional<double>& at(size_t r, size_t c) const { return cells.at(r * cols.size() + c); }

  std::optional<double> get(std::string_view row, std::string_view col) const {
    auto ri = std::find(rows.begin(), rows.end(), row);
    auto ci = std::find(cols.begin(), cols.end(), col);
    if (ri == rows.end() || ci == cols.end()) return std::nullopt;
    return at(static_cast<size_t>(ri - rows.begin()), static_cast<size_t>(ci - cols.begin()));
  }

  bool same_shape(const Grid& o) const { return rows == o.rows && cols == o.cols; }
  bool operator==(const Grid&) const = default;
};

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field += ch;
    }
  }
  out.push_back(std::move(field));
  return out;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::vector<std::string> csv_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!unicode::trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

inline std::optional<double> parse_cell(std::string_view raw, size_t line) {
  const std::string trimmed = unicode::trim(raw);
  std::string_view s = trimmed;
  if (s.empty() || s == "-") return std::nullopt;
  if (s.back() == '%') s.remove_suffix(1);
  std::string text(s);
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": bad number '" + text + "'");
  return v;
}

}  // namespace detail

/// First row is the header (corner label, then column labels); empty cells stay empty.
inline Grid grid_from_csv(std::string_view text) {
  auto lines = detail::csv_lines(text);
  if (lines.empty()) throw Error(ErrorCode::MalformedRecord, "grid CSV is empty");
  auto header = detail::split_csv_line(lines[0]);
  Grid g;
  g.corner = std::string(unicode::trim(header[0]));
  for (size_t i = 1; i < header.size(); ++i) g.cols.emplace_back(unicode::trim(header[i]));
  for (size_t li = 1; li < lines.size(); ++li) {
    auto fields = detail::split_csv_line(lines[li]);
    if (fields.size() != header.size())
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(li + 1) + ": expected " +
                                                  std::to_string(header.size()) + " fields");
    g.rows.emplace_back(unicode::trim(fields[0]));
    for (size_t c = 1; c < fields.size(); ++c) g.cells.push_back(detail::parse_cell(fields[c], li + 1));
  }
  return g;
}

enum class CellStyle { Plain, Signed };

inline std::string format_cell(const std::optional<double>& v, CellStyle style) {
  if (!v) return "";
  return style == CellStyle::Signed ? format_signed_2dp(*v) : format_2dp(*v);
}

inline std::string grid_to_csv(const Grid& g, CellStyle style = CellStyle::Plain) {
  std::string out = detail::csv_field(g.corner);
  for (const auto& c : g.cols) out += "," + detail::csv_field(c);
  out += "\n";
  for (size_t r = 0; r < g.rows.size(); ++r) {
    out += detail::csv_field(g.rows[r]);
    for (size_t c = 0; c < g.cols.size(); ++c) out += "," + format_cell(g.at(r, c), style);
    out += "\n";
  }
  return out;
}

inline std::string grid_to_markdown(const Grid& g, CellStyle style = CellStyle::Plain) {
  std::string out = "| " + g.corner + " |";
  for (const auto& c : g.cols) out += " " + c + " |";
  out += "\n|---|";
  for (size_t c = 0; c < g.cols.size(); ++c) out += "---:|";
  out += "\n";
  for (size_t r = 0; r < g.rows.size(); ++r) {
    out += "| " + g.rows[r] + " |";
    for (size_t c = 0; c < g.cols.size(); ++c) {
      std::string cell = format_cell(g.at(r, c), style);
      out += cell.empty() ? " |" : " " + cell + " |";
    }
    out += "\n";
  }
  return out;
}

/// Elementwise ours - baseline; a cell empty on either side stays empty.
inline Grid delta_table(const Grid& ours, const Grid& baseline) {
  if (!ours.same_shape(baseline))
    throw Error(ErrorCode::ShapeMismatch, "grids differ in row or column labels");
  Grid out(ours.corner, ours.rows, ours.cols);
  for (size_t i = 0; i < ours.cells.size(); ++i)
    if (ours.cells[i] && baseline.cells[i]) out.cells[i] = *ours.cells[i] - *baseline.cells[i];
  return out;
}

enum class Metric { EmStrict, EmLenient, Chrf2, Bleu, Count };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::EmStrict: return "em_strict";
    case Metric::EmLenient: return "em_lenient";
    case Metric::Chrf2: return "chrf2";
    case Metric::Bleu: return "bleu";
    case Metric::Count: return "count";
  }
  return "?";
}

inline std::optional<Metric> parse_metric(std::string_view s) {
  for (Metric m : {Metric::EmStrict, Metric::EmLenient, Metric::Chrf2, Metric::Bleu, Metric::Count})
    if (to_string(m) == s) return m;
  if (s == "em") return Metric::EmLenient;
  return std::nullopt;
}

inline double metric_value(const ScoreReport& r, Metric m) {
  switch (m) {
    case Metric::EmStrict: return r.em_strict;
    case Metric::EmLenient: return r.em_lenient;
    case Metric::Chrf2: return r.chrf2;
    case Metric::Bleu: return r.bleu;
    case Metric::Count: return static_cast<double>(r.n_instances);
  }
  return 0.0;
}

/// Pivots reports keyed by (row_field, col_field). Label order follows first appearance in
/// `reports` unless explicit orders are given.
inline Grid grid_from_reports(const std::vector<ScoreReport>& reports, GroupField row_field, GroupField col_field,
                              Metric metric, std::vector<std::string> row_order = {},
                              std::vector<std::string> col_order = {}) {
  auto add_unique = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  const bool fixed_rows = !row_order.empty();
  const bool fixed_cols = !col_order.empty();
  for (const ScoreReport& r : reports) {
    auto rv = r.value(row_field);
    auto cv = r.value(col_field);
    if (!rv || !cv) throw Error(ErrorCode::InvalidArgument, "reports are not grouped by both grid fields");
    if (!fixed_rows) add_unique(row_order, *rv);
    if (!fixed_cols) add_unique(col_order, *cv);
  }
  Grid g(std::string(to_string(row_field)), row_order, col_order);
  for (const ScoreReport& r : reports) {
    auto ri = std::find(g.rows.begin(), g.rows.end(), *r.value(row_field));
    auto ci = std::find(g.cols.begin(), g.cols.end(), *r.value(col_field));
    if (ri == g.rows.end() || ci == g.cols.end()) continue;
    g.at(static_cast<size_t>(ri - g.rows.begin()), static_cast<size_t>(ci - g.cols.begin())) = metric_value(r, metric);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Ratios and matrix improvement
// ---------------------------------------------------------------------------

struct ImprovementRatio {
  std::optional<double> value;  // ours / baseline to 2 decimals; absent when baseline is 0
  bool new_capability = false;  // baseline 0, ours > 0

  std::string str() const {
    if (value) return format_2dp(*value) + "x";
    return new_capability ? "new capability" : "n/a";
  }
};

inline ImprovementRatio improvement_ratio(double ours, double baseline) {
  if (baseline < 0.0 || ours < 0.0) throw Error(ErrorCode::InvalidArgument, "percents must be non-negative");
  if (baseline == 0.0) return {std::nullopt, ours > 0.0};
  return {round_to(ours / baseline, 2), false};
}

/// Best analogical score minus best baseline score, to 2 decimals.
inline double best_minus_best(const std::vector<double>& analogical, const std::vector<double>& baseline) {
  if (analogical.empty() || baseline.empty()) throw Error(ErrorCode::InvalidArgument, "empty score list");
  return round_to(*std::max_element(analogical.begin(), analogical.end()) -
                      *std::max_element(baseline.begin(), baseline.end()),
                  2);
}

/// Column `deducer` of a generator-by-deducer grid.
inline std::vector<double> grid_column(const Grid& g, std::string_view col) {
  auto ci = std::find(g.cols.begin(), g.cols.end(), col);
  if (ci == g.cols.end()) throw Error(ErrorCode::ShapeMismatch, "no column '" + std::string(col) + "'");
  std::vector<double> out;
  for (size_t r = 0; r < g.rows.size(); ++r)
    if (auto v = g.at(r, static_cast<size_t>(ci - g.cols.begin()))) out.push_back(*v);
  return out;
}

inline std::vector<double> grid_row(const Grid& g, std::string_view row) {
  auto ri = std::find(g.rows.begin(), g.rows.end(), row);
  if (ri == g.rows.end()) throw Error(ErrorCode::ShapeMismatch, "no row '" + std::string(row) + "'");
  std::vector<double> out;
  for (size_t c = 0; c < g.cols.size(); ++c)
    if (auto v = g.at(static_cast<size_t>(ri - g.rows.begin()), c)) out.push_back(*v);
  return out;
}

// ---------------------------------------------------------------------------
// Family-label classification
// ---------------------------------------------------------------------------

enum class FamilyLabelKind { Label, Synthetic, NoneStated };

struct FamilyVerdict {
  std::string instance_id;
  std::string language;
  FamilyLabelKind kind = FamilyLabelKind::NoneStated;
  std::string label;  // canonical label when kind == Label
  bool correct = false;

  std::string display() const {
    switch (kind) {
      case FamilyLabelKind::Label: return label;
      case FamilyLabelKind::Synthetic: return "Synthetic";
      case FamilyLabelKind::NoneStated: return "None";
    }
    return "None";
  }
};

/// Phrase -> canonical label. Phrases are matched case-insensitively on word boundaries.
class FamilyLexicon {
 public:
  static constexpr std::string_view kSynthetic = "\x01synthetic";

  void add(std::string_view phrase, std::string_view canonical) {
    std::string key = unicode::to_lower(unicode::nfc(phrase));
    for (auto& e : entries_)
      if (e.first == key) return;
    entries_.emplace_back(std::move(key), std::string(canonical));
  }
  void add_label(std::string_view label) { add(label, label); }
  void add_synthetic(std::string_view phrase) { add(phrase, kSynthetic); }

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

  /// Oracle labels, their common ancestors and siblings, isolate phrasings, and synthetic synonyms.
  static FamilyLexicon standard(const FamilyOracle& oracle = default_family_oracle()) {
    FamilyLexicon lex;
    for (const auto& [lang, labels] : oracle.entries())
      for (const auto& l : labels) lex.add_label(l);
    for (std::string_view l :
         {"West Papuan", "Lakes Plain", "Trans-New Guinea", "Papuan", "Mixe-Zoque", "Zoquean", "Mixean",
          "Niger-Congo", "Edoid", "Atlantic-Congo", "Volta-Congo", "Benue-Congo", "Mande", "Gur", "Bantu",
          "Pama-Nyungan", "Uralic", "Finno-Ugric", "Permic", "Araucanian", "Totonacan", "Oto-Manguean",
          "Zapotecan", "Austronesian", "Malayo-Polynesian", "Polynesian", "Oceanic", "Hokan", "Mayan",
          "Uto-Aztecan", "Quechuan", "Aymaran", "Tupian", "Arawakan", "Algonquian", "Salishan", "Na-Dene",
          "Athabaskan", "Eskimo-Aleut", "Indo-European", "Slavic", "Germanic", "Romance", "Sino-Tibetan",
          "Afroasiatic", "Nilo-Saharan", "Turkic", "Mongolic", "Tungusic", "Japonic", "Koreanic", "Dravidian",
          "Austroasiatic", "Tai-Kadai", "Hmong-Mien"})
      lex.add_label(l);
    lex.add("Otomanguean", "Oto-Manguean");
    lex.add("Afro-Asiatic", "Afroasiatic");
    lex.add("Language Isolate", "Language Isolate");
    lex.add("isolate", "Language Isolate");
    lex.add("isolated language", "Language Isolate");
    for (std::string_view s : {"synthetic", "constructed", "fictional", "hypothetical", "imaginary", "invented",
                               "made-up", "artificial", "fictitious", "conlang"})
      lex.add_synthetic(s);
    return lex;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Per-language labels accepted beyond the oracle: enclosing families and debated alternates.
inline const std::map<std::string, std::vector<std::string>>& accepted_family_alternates() {
  static const std::map<std::string, std::vector<std::string>> table{
      {"kalam", {"Trans-New Guinea"}},
      {"chimalapa zoque", {"Zoquean", "Mixe-Zoque"}},
      {"ayutla mixe", {"Mixean", "Mixe-Zoque"}},
      {"engenni", {"Edoid", "Atlantic-Congo", "Volta-Congo", "Benue-Congo"}},
      {"mixtepec zapotec", {"Zapotecan"}},
      {"komi-ziran", {"Permic", "Finno-Ugric"}},
      {"rapa nui", {"Polynesian", "Oceanic", "Austronesian", "Malayo-Polynesian"}},
      {"niuean", {"Polynesian", "Oceanic", "Austronesian"}},
      {"ngadha", {"Austronesian", "Malayo-Polynesian"}},
      {"seri", {"Hokan", "Language Isolate"}},
      {"bangime", {"Language Isolate"}},
      {"kutenai", {"Language Isolate"}},
      {"ainu", {"Language Isolate"}},
  };
  return table;
}

namespace detail {

inline bool word_char_at(const std::u32string& s, size_t i) {
  return i < s.size() && (u_isalnum(static_cast<UChar32>(s[i])) || s[i] == U'\'');
}

/// Blanks every whole-word occurrence of `needle` in `hay` with spaces.
inline void mask_phrase(std::u32string& hay, const std::u32string& needle) {
  if (needle.empty()) return;
  for (size_t pos = hay.find(needle); pos != std::u32string::npos; pos = hay.find(needle, pos + 1)) {
    bool left = pos == 0 || !word_char_at(hay, pos - 1);
    bool right = !word_char_at(hay, pos + needle.size());
    if (left && right) std::fill(hay.begin() + static_cast<std::ptrdiff_t>(pos),
                                 hay.begin() + static_cast<std::ptrdiff_t>(pos + needle.size()), U' ');
  }
}

inline std::u32string lowered(std::string_view text) {
  return unicode::code_points(unicode::nfc(unicode::to_lower(unicode::nfc(text))));
}

}  // namespace detail

/// First asserted family label in `stage1_text`. The target language's own name is masked first,
/// so "the same family as Kalam" does not read as the label "Kalam".
inline FamilyVerdict classify_family_label(std::string_view stage1_text, std::string_view language,
                                           const FamilyOracle& oracle = default_family_oracle(),
                                           const FamilyLexicon* lexicon = nullptr) {
  static const FamilyLexicon kStandard = FamilyLexicon::standard();
  const FamilyLexicon& lex = lexicon ? *lexicon : (&oracle == &default_family_oracle() ? kStandard : FamilyLexicon::standard(oracle));

  std::u32string text = detail::lowered(stage1_text);
  std::string lang = normalize_language_name(language);
  detail::mask_phrase(text, detail::lowered(language));
  detail::mask_phrase(text, detail::lowered(lang));

  FamilyVerdict verdict;
  verdict.language = std::string(language);
  size_t best_pos = std::u32string::npos;
  size_t best_len = 0;
  const std::string* best_label = nullptr;
  for (const auto& [phrase, canonical] : lex.entries()) {
    std::u32string needle = unicode::code_points(phrase);
    for (size_t pos = text.find(needle); pos != std::u32string::npos && pos <= best_pos;
         pos = text.find(needle, pos + 1)) {
      if ((pos > 0 && detail::word_char_at(text, pos - 1)) || detail::word_char_at(text, pos + needle.size()))
        continue;
      if (pos < best_pos || needle.size() > best_len) {
        best_pos = pos;
        best_len = needle.size();
        best_label = &canonical;
      }
      break;
    }
  }
  if (!best_label) return verdict;
  if (*best_label == FamilyLexicon::kSynthetic) {
    verdict.kind = FamilyLabelKind::Synthetic;
    return verdict;
  }
  verdict.kind = FamilyLabelKind::Label;
  verdict.label = *best_label;

  auto same = [](std::string_view a, std::string_view b) { return unicode::to_lower(a) == unicode::to_lower(b); };
  std::vector<std::string> accepted = oracle_family(language, oracle);
  const auto& alternates = accepted_family_alternates();
  if (auto it = alternates.find(lang); it != alternates.end())
    accepted.insert(accepted.end(), it->second.begin(), it->second.end());
  verdict.correct = std::any_of(accepted.begin(), accepted.end(),
                                [&](const std::string& a) { return same(a, verdict.label); });
  return verdict;
}

struct CorrectnessRate {
  size_t correct = 0;
  size_t total = 0;
  double fraction = 0.0;
  double percent = 0.0;  // 2 decimals

  std::string str() const {
    return std::to_string(correct) + "/" + std::to_string(total) + " = " + format_2dp(percent) + "%";
  }
};

inline CorrectnessRate correctness_rate(size_t correct, size_t total) {
  if (total == 0) throw Error(ErrorCode::InvalidArgument, "no verdicts");
  if (correct > total) throw Error(ErrorCode::InvalidArgument, "correct exceeds total");
  CorrectnessRate r{correct, total, static_cast<double>(correct) / static_cast<double>(total), 0.0};
  r.percent = round_to(100.0 * r.fraction, 2);
  return r;
}

inline CorrectnessRate family_correctness_rate(const std::vector<FamilyVerdict>& verdicts) {
  return correctness_rate(static_cast<size_t>(std::count_if(verdicts.begin(), verdicts.end(),
                                                            [](const FamilyVerdict& v) { return v.correct; })),
                          verdicts.size());
}

/// Per-language label counts in the "Label (n), Label (m)" style, labels by descending count.
inline std::map<std::string, std::vector<std::pair<std::string, size_t>>> family_label_counts(
    const std::vector<FamilyVerdict>& verdicts) {
  std::map<std::string, std::map<std::string, size_t>> raw;
  for (const auto& v : verdicts) ++raw[v.language][v.display()];
  std::map<std::string, std::vector<std::pair<std::string, size_t>>> out;
  for (auto& [lang, counts] : raw) {
    std::vector<std::pair<std::string, size_t>> v(counts.begin(), counts.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    out.emplace(lang, std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

enum class ReportFormat { MarkdownTable, Csv, BubbleJson };

inline std::string_view to_string(ReportFormat f) {
  switch (f) {
    case ReportFormat::MarkdownTable: return "markdown";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::BubbleJson: return "bubble_json";
  }
  return "?";
}

inline std::optional<ReportFormat> parse_report_format(std::string_view s) {
  if (s == "markdown" || s == "md") return ReportFormat::MarkdownTable;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "bubble_json" || s == "bubble" || s == "json") return ReportFormat::BubbleJson;
  return std::nullopt;
}

inline std::string_view report_extension(ReportFormat f) {
  switch (f) {
    case ReportFormat::MarkdownTable: return ".md";
    case ReportFormat::Csv: return ".csv";
    case ReportFormat::BubbleJson: return ".json";
  }
  return "";
}

namespace detail {

inline std::vector<std::string> report_header(const std::vector<ScoreReport>& reports) {
  std::vector<std::string> h;
  for (const auto& [f, v] : reports.front().key) h.emplace_back(to_string(f));
  for (std::string_view c : {"n_instances", "n_records", "n_missing", "em_strict", "em_lenient", "chrf2", "bleu"})
    h.emplace_back(c);
  return h;
}

inline std::vector<std::string> report_row(const ScoreReport& r) {
  std::vector<std::string> row;
  for (const auto& [f, v] : r.key) row.push_back(v);
  row.push_back(std::to_string(r.n_instances));
  row.push_back(std::to_string(r.n_records));
  row.push_back(std::to_string(r.n_missing));
  for (double v : {r.em_strict, r.em_lenient, r.chrf2, r.bleu}) row.push_back(format_2dp(v));
  return row;
}

}  // namespace detail

/// Deterministic bytes for a fixed input; numbers carry two decimals.
inline std::string emit_report(const std::vector<ScoreReport>& reports, ReportFormat format) {
  if (reports.empty()) throw Error(ErrorCode::InvalidArgument, "no reports to emit");
  switch (format) {
    case ReportFormat::MarkdownTable: {
      auto header = detail::report_header(reports);
      std::string out = "|";
      for (const auto& h : header) out += " " + h + " |";
      out += "\n|";
      for (size_t i = 0; i < header.size(); ++i) out += i < reports.front().key.size() ? "---|" : "---:|";
      out += "\n";
      for (const auto& r : reports) {
        out += "|";
        for (const auto& cell : detail::report_row(r)) out += " " + cell + " |";
        out += "\n";
      }
      return out;
    }
    case ReportFormat::Csv: {
      std::string out;
      auto emit_line = [&out](const std::vector<std::string>& fields) {
        for (size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + detail::csv_field(fields[i]);
        out += "\n";
      };
      emit_line(detail::report_header(reports));
      for (const auto& r : reports) emit_line(detail::report_row(r));
      return out;
    }
    case ReportFormat::BubbleJson: {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& r : reports) {
        auto type = r.value(GroupField::ProblemType);
        auto difficulty = r.value(GroupField::Difficulty);
        if (!type || !difficulty)
          throw Error(ErrorCode::InvalidArgument, "bubble output needs problem_type and difficulty grouping");
        arr.push_back(nlohmann::ordered_json{{"type", *type},
                                             {"difficulty", *difficulty},
                                             {"count", r.n_instances},
                                             {"em", round_to(r.em_lenient, 2)}});
      }
      return arr.dump(2) + "\n";
    }
  }
  return {};
}

}  // namespace lingeval
