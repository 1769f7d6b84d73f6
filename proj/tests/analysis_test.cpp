// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <map>

#include "lingeval/analysis.hpp"
#include "lingoly_sim.hpp"
#include "test_support.hpp"

namespace lingeval {
namespace {

using testing::error_code_of;
using testing::fixture_grid;

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

Corpus two_rapa_nui() {
  auto all = load_corpus(testing::fixture("rapa_nui_loo.jsonl"));
  return Corpus({all[0], all[9]});
}

RunRecord answered(const PuzzleInstance& inst, int rep, const std::string& answer, const std::string& deducer = "d") {
  RunRecord r;
  r.key = RunKey{inst.id, "fp", std::nullopt, deducer, rep};
  r.setting_label = "few_shot";
  r.final_text = "**[" + answer + "]**";
  score_record(r, inst);
  return r;
}

TEST(Aggregate, MeanOverRepetitions) {
  Corpus c = two_rapa_nui();
  const auto& a = c.instances()[0];
  const auto& b = c.instances()[1];
  std::vector<RunRecord> records{answered(a, 0, a.gold_answers[0]), answered(b, 0, "x"),
                                 answered(a, 1, "x"),               answered(b, 1, b.gold_answers[0]),
                                 answered(a, 2, a.gold_answers[0]), answered(b, 2, b.gold_answers[0])};
  auto reports = aggregate(records, c, {});
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(format_2dp(reports[0].em_strict), "66.67");
  EXPECT_EQ(format_2dp(reports[0].em_lenient), "66.67");
  EXPECT_EQ(reports[0].n_instances, 2u);
  EXPECT_EQ(reports[0].n_records, 6u);
  ASSERT_EQ(reports[0].per_repetition.size(), 3u);
  EXPECT_DOUBLE_EQ(reports[0].per_repetition[0].em_strict, 50.0);
  EXPECT_DOUBLE_EQ(reports[0].per_repetition[2].em_strict, 100.0);
}

TEST(Aggregate, SingleCorrectRecord) {
  Corpus c = two_rapa_nui();
  const auto& a = c.instances()[0];
  auto reports = aggregate({answered(a, 0, a.gold_answers[0])}, c, {GroupField::Language});
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_DOUBLE_EQ(reports[0].em_strict, 100.0);
  EXPECT_DOUBLE_EQ(reports[0].chrf2, 100.0);
  EXPECT_EQ(reports[0].value(GroupField::Language), "Rapa Nui");
}

TEST(Aggregate, FailedGroupsAreSkippedWithWarning) {
  Corpus c = two_rapa_nui();
  const auto& a = c.instances()[0];
  RunRecord failed;
  failed.key = RunKey{a.id, "fp", std::nullopt, "broken", 0};
  failed.error = "ProtocolError: no";
  std::vector<std::string> warnings;
  auto reports = aggregate({answered(a, 0, "x", "ok"), failed}, c, {GroupField::Deducer}, &warnings);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].value(GroupField::Deducer), "ok");
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("deducer=broken"), std::string::npos);
  EXPECT_EQ(error_code_of([&] {
              RunRecord stray = failed;
              stray.key.instance_id = "nope";
              aggregate({stray}, c, {});
            }),
            ErrorCode::InvalidArgument);
}

TEST(Aggregate, GroupsConserveInstances) {
  Corpus c(load_corpus(testing::fixture("lingoly_shaped.jsonl")));
  auto records = testing::shaped_records(fixture_grid("grids/lingoly_two_stage.csv"), c);
  auto reports = aggregate(records, c, {GroupField::Difficulty, GroupField::ProblemType});
  ASSERT_EQ(reports.size(), 17u);
  size_t total = 0;
  for (const auto& r : reports) {
    total += r.n_instances;
    EXPECT_EQ(r.n_instances, 100u);
    EXPECT_GE(r.em_lenient, 0.0);
    EXPECT_LE(r.em_lenient, 100.0);
  }
  EXPECT_EQ(total, c.size());
}

TEST(Aggregate, DifficultyByTypeReproducesTwoStageGrid) {
  Corpus c(load_corpus(testing::fixture("lingoly_shaped.jsonl")));
  Grid target = fixture_grid("grids/lingoly_two_stage.csv");
  auto reports = aggregate(testing::shaped_records(target, c), c, {GroupField::Difficulty, GroupField::ProblemType});
  Grid g = grid_from_reports(reports, GroupField::Difficulty, GroupField::ProblemType, Metric::EmLenient, target.rows,
                             target.cols);
  EXPECT_EQ(g.rows, target.rows);
  EXPECT_EQ(g.cols, target.cols);
  EXPECT_EQ(g.cells, target.cells);
  // Without explicit orders the labels still line up.
  EXPECT_TRUE(testing::same_cells_by_label(
      grid_from_reports(reports, GroupField::Difficulty, GroupField::ProblemType, Metric::EmLenient), target));
}

// ---------------------------------------------------------------------------
// Grids, deltas and ratios
// ---------------------------------------------------------------------------

TEST(Delta, ReproducesPublishedDeltaGrid) {
  Grid ours = fixture_grid("grids/lingoly_two_stage.csv"), base = fixture_grid("grids/lingoly_baseline.csv");
  Grid delta = delta_table(ours, base);
  EXPECT_EQ(delta, fixture_grid("grids/lingoly_delta.csv"));
  EXPECT_EQ(delta.get("Round 2", "Rosetta"), 29.0);
  EXPECT_EQ(delta.get("Breakthrough", "Pattern"), 33.0);
  EXPECT_FALSE(delta.get("Breakthrough", "Computational"));
}

TEST(Delta, MarkdownGolden) {
  Grid delta = delta_table(fixture_grid("grids/lingoly_two_stage.csv"), fixture_grid("grids/lingoly_baseline.csv"));
  EXPECT_EQ(grid_to_markdown(delta, CellStyle::Signed), testing::fixture_text("grids/lingoly_delta.md"));
}

TEST(Delta, IdenticalGridsGiveZeros) {
  Grid g = fixture_grid("grids/lingoly_baseline.csv");
  Grid d = delta_table(g, g);
  for (size_t i = 0; i < d.cells.size(); ++i) {
    EXPECT_EQ(d.cells[i].has_value(), g.cells[i].has_value());
    if (d.cells[i]) {
      EXPECT_EQ(*d.cells[i], 0.0);
    }
  }
  EXPECT_EQ(grid_to_csv(d, CellStyle::Signed).find("-0"), std::string::npos);
}

TEST(Delta, ShapeMismatch) {
  Grid g = fixture_grid("grids/lingoly_baseline.csv");
  Grid fewer = g;
  fewer.rows.pop_back();
  fewer.cells.resize(fewer.rows.size() * fewer.cols.size());
  EXPECT_EQ(error_code_of([&] { delta_table(g, fewer); }), ErrorCode::ShapeMismatch);
  Grid renamed = g;
  renamed.cols[0] = "Other";
  EXPECT_EQ(error_code_of([&] { delta_table(g, renamed); }), ErrorCode::ShapeMismatch);
}

TEST(Delta, EmptyOnEitherSideStaysEmpty) {
  Grid a("r", {"x"}, {"p", "q"}), b("r", {"x"}, {"p", "q"});
  a.at(0, 0) = 10;
  b.at(0, 1) = 5;
  Grid d = delta_table(a, b);
  EXPECT_FALSE(d.at(0, 0));
  EXPECT_FALSE(d.at(0, 1));
}

TEST(Ratio, PublishedRatios) {
  EXPECT_EQ(improvement_ratio(41, 12).str(), "3.42x");
  EXPECT_EQ(improvement_ratio(51, 26).str(), "1.96x");
  Grid ours = fixture_grid("grids/lingoly_two_stage.csv"), base = fixture_grid("grids/lingoly_baseline.csv");
  auto r2p = improvement_ratio(*ours.get("Round 2", "Pattern"), *base.get("Round 2", "Pattern"));
  ASSERT_TRUE(r2p.value);
  EXPECT_DOUBLE_EQ(*r2p.value, 1.81);
  auto r2r = improvement_ratio(*ours.get("Round 2", "Rosetta"), *base.get("Round 2", "Rosetta"));
  EXPECT_DOUBLE_EQ(*r2r.value, 3.42);
  auto adv = improvement_ratio(*ours.get("Advanced", "Rosetta"), *base.get("Advanced", "Rosetta"));
  EXPECT_DOUBLE_EQ(*adv.value, 1.96);
}

TEST(Ratio, ZeroBaseline) {
  auto r = improvement_ratio(19, 0);
  EXPECT_FALSE(r.value);
  EXPECT_TRUE(r.new_capability);
  EXPECT_EQ(r.str(), "new capability");
  EXPECT_FALSE(improvement_ratio(0, 0).new_capability);
  EXPECT_EQ(improvement_ratio(0, 0).str(), "n/a");
  EXPECT_EQ(error_code_of([] { improvement_ratio(-1, 5); }), ErrorCode::InvalidArgument);
}

TEST(MatrixArithmetic, BestMinusBest) {
  Grid matrix = fixture_grid("grids/modeling_matrix.csv"), baselines = fixture_grid("grids/modeling_baselines.csv");
  EXPECT_DOUBLE_EQ(best_minus_best(grid_column(matrix, "GPT-4o"), grid_row(baselines, "GPT-4o")), 8.09);
  EXPECT_DOUBLE_EQ(
      best_minus_best(grid_column(matrix, "Llama-3.1-405B-Instruct"), grid_row(baselines, "Llama-3.1-405B-Instruct")),
      5.88);
  EXPECT_EQ(error_code_of([&] { grid_column(matrix, "Claude"); }), ErrorCode::ShapeMismatch);
  EXPECT_EQ(error_code_of([] { best_minus_best({}, {1.0}); }), ErrorCode::InvalidArgument);
}

TEST(Grid, CsvRoundTrip) {
  for (const char* name : {"grids/lingoly_baseline.csv", "grids/lingoly_delta.csv", "grids/modeling_matrix.csv"}) {
    Grid g = fixture_grid(name);
    EXPECT_EQ(grid_from_csv(grid_to_csv(g)), g) << name;
    EXPECT_EQ(grid_from_csv(grid_to_csv(g, CellStyle::Signed)), g) << name;
  }
  EXPECT_EQ(error_code_of([] { grid_from_csv("a,b\nx,1,2\n"); }), ErrorCode::MalformedRecord);
  EXPECT_EQ(error_code_of([] { grid_from_csv("a,b\nx,abc\n"); }), ErrorCode::MalformedRecord);
  EXPECT_EQ(error_code_of([] { grid_from_csv(""); }), ErrorCode::MalformedRecord);
}

TEST(Grid, QuotedCsvFields) {
  Grid g("k", {"a,b", "say \"hi\""}, {"v"});
  g.at(0, 0) = 1.5;
  EXPECT_EQ(grid_from_csv(grid_to_csv(g)), g);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

TEST(Report, DeterministicBytesAndCsvRoundTrip) {
  Corpus c(load_corpus(testing::fixture("lingoly_shaped.jsonl")));
  auto records = testing::shaped_records(fixture_grid("grids/lingoly_baseline.csv"), c);
  auto reports = aggregate(records, c, {GroupField::Difficulty, GroupField::ProblemType});
  std::string md = emit_report(reports, ReportFormat::MarkdownTable);
  std::reverse(records.begin(), records.end());
  auto again = aggregate(records, c, {GroupField::Difficulty, GroupField::ProblemType});
  EXPECT_EQ(emit_report(again, ReportFormat::MarkdownTable), md);
  EXPECT_EQ(md.substr(0, md.find('\n')),
            "| difficulty | problem_type | n_instances | n_records | n_missing | em_strict | em_lenient | chrf2 | bleu |");

  std::string csv = emit_report(reports, ReportFormat::Csv);
  auto lines = detail::csv_lines(csv);
  ASSERT_EQ(lines.size(), reports.size() + 1);
  for (size_t i = 0; i < reports.size(); ++i) {
    auto f = detail::split_csv_line(lines[i + 1]);
    ASSERT_EQ(f.size(), 9u);
    EXPECT_EQ(f[0], *reports[i].value(GroupField::Difficulty));
    EXPECT_EQ(std::stoul(f[2]), reports[i].n_instances);
    EXPECT_DOUBLE_EQ(std::stod(f[5]), round_to(reports[i].em_strict, 2));
    EXPECT_DOUBLE_EQ(std::stod(f[6]), round_to(reports[i].em_lenient, 2));
    EXPECT_DOUBLE_EQ(std::stod(f[7]), round_to(reports[i].chrf2, 2));
  }
  EXPECT_EQ(error_code_of([] { emit_report({}, ReportFormat::Csv); }), ErrorCode::InvalidArgument);
}

TEST(Report, BubbleSizesAreSubquestionCounts) {
  Corpus c(load_corpus(testing::fixture("lingoly_shaped.jsonl")));
  Grid target = fixture_grid("grids/lingoly_baseline.csv");
  // Drop some instances so sizes differ between cells.
  std::vector<PuzzleInstance> subset;
  std::map<std::pair<std::string, std::string>, size_t> expected;
  for (const auto& inst : c.instances()) {
    size_t k = std::stoul(inst.id.substr(inst.id.size() - 3));
    if (inst.difficulty == Difficulty::Round2 && k >= 40) continue;
    subset.push_back(inst);
    ++expected[{std::string(display_name(inst.problem_type)), std::string(display_name(inst.difficulty))}];
  }
  Corpus sub(subset);
  auto reports = aggregate(testing::shaped_records(target, sub), sub, {GroupField::ProblemType, GroupField::Difficulty});
  auto bubbles = nlohmann::json::parse(emit_report(reports, ReportFormat::BubbleJson));
  ASSERT_EQ(bubbles.size(), 17u);
  for (const auto& b : bubbles) {
    auto key = std::make_pair(b["type"].get<std::string>(), b["difficulty"].get<std::string>());
    EXPECT_EQ(b["count"].get<size_t>(), expected.at(key)) << key.first << "/" << key.second;
    EXPECT_TRUE(b["em"].is_number());
  }
  auto by_language = aggregate(testing::shaped_records(target, sub), sub, {GroupField::Language});
  EXPECT_EQ(error_code_of([&] { emit_report(by_language, ReportFormat::BubbleJson); }), ErrorCode::InvalidArgument);
}

TEST(Report, FormatsAndFields) {
  EXPECT_EQ(parse_report_format("md"), ReportFormat::MarkdownTable);
  EXPECT_EQ(parse_report_format("bubble_json"), ReportFormat::BubbleJson);
  EXPECT_FALSE(parse_report_format("xml"));
  EXPECT_EQ(parse_group_by("difficulty,type"),
            (std::vector<GroupField>{GroupField::Difficulty, GroupField::ProblemType}));
  EXPECT_EQ(parse_metric("em"), Metric::EmLenient);
  EXPECT_EQ(format_2dp(-0.001), "0.00");
  EXPECT_EQ(format_signed_2dp(0.0), "+0.00");
  EXPECT_EQ(format_signed_2dp(-3.456), "-3.46");
}

// ---------------------------------------------------------------------------
// Family labels
// ---------------------------------------------------------------------------

TEST(FamilyLabel, DocumentedExamples) {
  auto v = classify_family_label("Chimalapa Zoque belongs to the Mixe-Zoque language family", "Chimalapa Zoque");
  EXPECT_EQ(v.kind, FamilyLabelKind::Label);
  EXPECT_EQ(v.label, "Mixe-Zoque");
  EXPECT_TRUE(v.correct);

  v = classify_family_label("The language is fictional and used for illustrative purposes.", "Kalam");
  EXPECT_EQ(v.kind, FamilyLabelKind::Synthetic);
  EXPECT_FALSE(v.correct);

  v = classify_family_label("**Puzzle 1**\nSource: tama loa\nEnglish: big child", "Rapa Nui");
  EXPECT_EQ(v.kind, FamilyLabelKind::NoneStated);
  EXPECT_EQ(v.display(), "None");
  EXPECT_FALSE(v.correct);
}

TEST(FamilyLabel, OwnNameIsMasked) {
  auto v = classify_family_label("Here are languages in the same family as Kalam, such as Kobon.", "Kalam");
  EXPECT_EQ(v.kind, FamilyLabelKind::NoneStated);
  v = classify_family_label("Other Trans-New Guinea languages like Kalam include Kobon.", "Kalam");
  EXPECT_EQ(v.label, "Trans-New Guinea");
  EXPECT_TRUE(v.correct);
}

TEST(FamilyLabel, FirstAssertedLabelWins) {
  auto v = classify_family_label("Ngadha is Austronesian, unlike the Papuan languages nearby.", "Ngadha");
  EXPECT_EQ(v.label, "Austronesian");
  v = classify_family_label("Unlike Papuan languages, Ngadha is Austronesian.", "Ngadha");
  EXPECT_EQ(v.label, "Papuan");
  EXPECT_FALSE(v.correct);
  // The longer phrase wins at the same position.
  v = classify_family_label("Austronesian Malayo-Polynesian languages include Rapa Nui.", "Rapa Nui");
  EXPECT_EQ(v.label, "Austronesian Malayo-Polynesian");
}

TEST(FamilyLabel, IsolatePhrasings) {
  for (const char* text : {"Bangime is a language isolate.", "Bangime is generally considered an isolate.",
                           "Bangime is an isolated language."}) {
    auto v = classify_family_label(text, "Bangime");
    EXPECT_EQ(v.label, "Language Isolate") << text;
    EXPECT_TRUE(v.correct) << text;
  }
  EXPECT_FALSE(classify_family_label("Dogon is an isolate.", "Dogon").correct);
}

struct QuotedOutput {
  std::string id, language, text, kind, label;
  bool correct;
};

std::vector<QuotedOutput> quoted_outputs() {
  std::vector<QuotedOutput> out;
  std::istringstream in(testing::fixture_text("family/quoted_outputs.jsonl"));
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    out.push_back({j["id"], j["language"], j["text"], j["kind"], j["label"], j["correct"]});
  }
  return out;
}

TEST(FamilyLabel, QuotedOutputs) {
  auto rows = quoted_outputs();
  ASSERT_EQ(rows.size(), 8u);
  for (const auto& row : rows) {
    auto v = classify_family_label(row.text, row.language);
    const char* kind = v.kind == FamilyLabelKind::Label ? "label" : v.kind == FamilyLabelKind::Synthetic ? "synthetic" : "none";
    EXPECT_EQ(kind, row.kind) << row.id;
    EXPECT_EQ(v.label, row.label) << row.id;
    EXPECT_EQ(v.correct, row.correct) << row.id;
  }
}

struct TallyRow {
  std::string language, tally_language, tally_label, text;
};

std::vector<TallyRow> tally(const std::string& name) {
  std::vector<TallyRow> out;
  std::istringstream in(testing::fixture_text("family/" + name));
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    out.push_back({j["language"], j["tally_language"], j["tally_label"], j["text"]});
  }
  return out;
}

std::string expected_display(const std::string& tally_label) {
  if (tally_label == "Isolate") return "Language Isolate";
  if (tally_label == "Hokan / Isolate") return "Hokan";
  return tally_label;
}

void check_tally(const std::string& name, size_t expected_correct, const std::string& expected_str) {
  auto rows = tally(name);
  ASSERT_EQ(rows.size(), 272u);
  std::vector<FamilyVerdict> verdicts;
  std::map<std::string, std::map<std::string, size_t>> expected, actual;
  for (const auto& row : rows) {
    FamilyVerdict v = classify_family_label(row.text, row.language);
    EXPECT_EQ(v.display(), expected_display(row.tally_label)) << name << ": " << row.text.substr(0, 80);
    ++expected[row.tally_language][expected_display(row.tally_label)];
    v.language = row.tally_language;
    verdicts.push_back(v);
  }
  for (const auto& [lang, counts] : family_label_counts(verdicts))
    for (const auto& [label, n] : counts) actual[lang][label] = n;
  EXPECT_EQ(actual, expected) << name;
  CorrectnessRate rate = family_correctness_rate(verdicts);
  EXPECT_EQ(rate.correct, expected_correct) << name;
  EXPECT_EQ(rate.str(), expected_str) << name;
}

TEST(FamilyLabel, TalliedLlamaOutputs) { check_tally("tally_llama.jsonl", 249, "249/272 = 91.54%"); }

TEST(FamilyLabel, TalliedGpt4oOutputs) { check_tally("tally_gpt4o.jsonl", 202, "202/272 = 74.26%"); }

TEST(FamilyLabel, CorrectnessRate) {
  EXPECT_DOUBLE_EQ(correctness_rate(249, 272).percent, 91.54);
  EXPECT_DOUBLE_EQ(correctness_rate(202, 272).percent, 74.26);
  EXPECT_EQ(correctness_rate(0, 17).str(), "0/17 = 0.00%");
  EXPECT_EQ(error_code_of([] { correctness_rate(0, 0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_code_of([] { correctness_rate(3, 2); }), ErrorCode::InvalidArgument);
}

TEST(FamilyLabel, CountsSortByFrequency) {
  std::vector<FamilyVerdict> v(3);
  for (auto& x : v) x.language = "Seri";
  v[0].kind = FamilyLabelKind::Synthetic;
  v[1].kind = v[2].kind = FamilyLabelKind::Label;
  v[1].label = v[2].label = "Hokan";
  auto counts = family_label_counts(v);
  ASSERT_EQ(counts["Seri"].size(), 2u);
  EXPECT_EQ(counts["Seri"][0], (std::pair<std::string, size_t>{"Hokan", 2}));
  EXPECT_EQ(counts["Seri"][1], (std::pair<std::string, size_t>{"Synthetic", 1}));
}

}  // namespace
}  // namespace lingeval
