// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lingeval/analysis.hpp"
#include "lingeval/backend.hpp"
#include "lingeval/cache.hpp"
#include "lingeval/config.hpp"
#include "lingeval/corpus.hpp"
#include "lingeval/error.hpp"
#include "lingeval/family_oracle.hpp"
#include "lingeval/hash.hpp"
#include "lingeval/http_backend.hpp"
#include "lingeval/pipeline.hpp"
#include "lingeval/prompt.hpp"
#include "lingeval/run_record.hpp"

namespace lingeval {

namespace fs = std::filesystem;

using BackendFactory = std::function<std::unique_ptr<ChatBackend>(const BackendConfig&, size_t index)>;

/// openai -> HttpBackend with credentials from the environment; mock -> MockBackend.
inline std::unique_ptr<ChatBackend> default_backend_factory(const BackendConfig& b, size_t index) {
  if (b.kind == BackendKind::Mock) {
    MockScript script;
    if (b.mock_script) {
      try {
        script = MockScript::from_json(nlohmann::json::parse(read_file(*b.mock_script)));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, "backends[" + std::to_string(index) + "].mock_script: " + e.what());
      }
    }
    return std::make_unique<MockBackend>(std::move(script), b.max_in_flight, std::chrono::milliseconds(b.latency_ms));
  }
  auto [base_url, key] = resolve_credentials(b, index);
  HttpBackendOptions options;
  options.base_url = base_url;
  options.api_key = key;
  options.timeout = std::chrono::seconds(b.timeout_s);
  options.retry.max_attempts = b.max_attempts;
  options.max_in_flight = b.max_in_flight;
  return std::make_unique<HttpBackend>(std::move(options));
}

struct CommandContext {
  BackendFactory factory = default_backend_factory;
  std::ostream* log = &std::cerr;
};

/// Command-line adjustments applied on top of a loaded config.
struct RunOverrides {
  std::vector<std::string> settings;  // labels, e.g. "analogical_2stage[oracle]"
  std::vector<std::string> generators;
  std::vector<std::string> deducers;
  std::optional<int> repetitions;
  bool dry_run = false;
};

struct RunSummary {
  std::string run_id;
  fs::path run_dir;
  fs::path report_dir;
  size_t planned = 0;
  size_t failed = 0;
  size_t from_cache = 0;
  uint64_t backend_calls = 0;
  std::vector<RunKey> computed;  // cells that missed the cache, sorted
};

inline fs::path runs_dir(const fs::path& root) { return root / "runs"; }
inline fs::path reports_dir(const fs::path& root) { return root / "reports"; }

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

namespace detail {

struct LoadedCorpus {
  Corpus corpus;
  std::string digest;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
};

inline LoadedCorpus load_corpora(const std::vector<fs::path>& paths) {
  LoadedCorpus out;
  std::vector<PuzzleInstance> all;
  Sha256 h;
  for (const fs::path& p : paths) {
    std::string bytes = read_file(p);
    auto instances = parse_corpus(bytes);
    out.files.push_back(
        nlohmann::ordered_json{{"path", p.string()}, {"sha256", sha256_hex(bytes)}, {"instances", instances.size()}});
    h.field(sha256_hex(bytes));
    for (auto& inst : instances) all.push_back(std::move(inst));
  }
  out.corpus = Corpus(std::move(all));
  out.digest = h.hex();
  return out;
}

inline TemplateSet load_templates(const RunConfig& c) {
  return c.templates_dir ? TemplateSet::load_dir(*c.templates_dir) : TemplateSet{};
}

inline FamilyOracle load_oracle(const RunConfig& c) {
  return c.oracle ? FamilyOracle::load(*c.oracle) : default_family_oracle();
}

/// Applies CLI overrides; unknown ids and labels are ConfigErrors naming the flag.
inline RunConfig apply_overrides(RunConfig c, const RunOverrides& o) {
  if (!o.settings.empty()) {
    std::vector<EvalSetting> chosen;
    for (const std::string& label : o.settings) {
      auto match = std::find_if(c.settings.begin(), c.settings.end(),
                                [&](const EvalSetting& s) { return s.label() == label; });
      if (match != c.settings.end()) {
        chosen.push_back(*match);
        continue;
      }
      auto parsed = parse_setting_label(label);
      if (!parsed) throw Error(ErrorCode::ConfigError, "--setting: unknown setting '" + label + "'");
      if (label.find('@') == std::string::npos)
        if (auto it = c.max_tokens_overrides.find(parsed->regime); it != c.max_tokens_overrides.end())
          parsed->max_tokens = it->second;
      parsed->temperature = c.temperature;
      parsed->repetitions = c.repetitions;
      chosen.push_back(*parsed);
    }
    c.settings = std::move(chosen);
  }
  auto check_ids = [&c](const std::vector<std::string>& ids, const char* flag) {
    for (const auto& id : ids)
      if (!c.backend(id)) throw Error(ErrorCode::ConfigError, std::string(flag) + ": unknown backend id '" + id + "'");
  };
  if (!o.generators.empty()) {
    check_ids(o.generators, "--generator");
    c.generators = o.generators;
  }
  if (!o.deducers.empty()) {
    check_ids(o.deducers, "--deducer");
    c.deducers = o.deducers;
  }
  if (o.repetitions) {
    if (*o.repetitions < 1) throw Error(ErrorCode::ConfigError, "--reps: must be >= 1");
    c.repetitions = *o.repetitions;
    for (auto& s : c.settings) s.repetitions = *o.repetitions;
  }
  if (c.needs_generators() && c.generators.empty())
    throw Error(ErrorCode::ConfigError, "generators: required by analogical_2stage settings");
  return c;
}

inline std::vector<Participant> participants(const RunConfig& c, const std::vector<std::string>& ids,
                                             const std::map<std::string, ChatBackend*>& backends) {
  std::vector<Participant> out;
  for (const auto& id : ids) {
    const BackendConfig* b = c.backend(id);
    auto it = backends.find(id);
    out.push_back(Participant{id, b->model, it == backends.end() ? nullptr : it->second});
  }
  return out;
}

inline std::string derive_run_id(const RunConfig& c, const std::string& corpus_digest, const TemplateSet& templates) {
  Sha256 h;
  h.field(corpus_digest);
  for (const auto& s : c.settings) h.field(setting_fingerprint(s, templates)).field(std::to_string(s.repetitions));
  h.field("generators");
  for (const auto& g : c.generators) h.field(g).field(c.backend(g)->model);
  h.field("deducers");
  for (const auto& d : c.deducers) h.field(d).field(c.backend(d)->model);
  return "run-" + h.hex().substr(0, 12);
}

inline nlohmann::ordered_json manifest_json(const RunConfig& c, const std::string& run_id, const LoadedCorpus& loaded,
                                           const TemplateSet& templates, size_t planned) {
  using oj = nlohmann::ordered_json;
  oj settings = oj::array();
  for (const auto& s : c.settings)
    settings.push_back(oj{{"label", s.label()},
                          {"regime", to_string(s.regime)},
                          {"fewshot_prompt_variant", to_string(s.fewshot_prompt_variant)},
                          {"family_source", to_string(s.family_source)},
                          {"temperature", s.temperature},
                          {"max_tokens", s.max_tokens},
                          {"repetitions", s.repetitions},
                          {"fingerprint", setting_fingerprint(s, templates)}});
  auto people = [&c](const std::vector<std::string>& ids) {
    oj arr = oj::array();
    for (const auto& id : ids) {
      const BackendConfig* b = c.backend(id);
      arr.push_back(oj{{"id", id}, {"kind", b->kind == BackendKind::Mock ? "mock" : "openai"}, {"model", b->model}});
    }
    return arr;
  };
  oj corpora = oj::array();
  for (const auto& p : c.corpora) corpora.push_back(p.string());
  oj group_by = oj::array();
  for (auto f : c.group_by) group_by.push_back(to_string(f));
  oj formats = oj::array();
  for (auto f : c.report_formats) formats.push_back(to_string(f));
  oj digests = oj::object();
  for (const auto& [name, d] : templates.digests()) digests[name] = d;
  return oj{{"run_id", run_id},
            {"config",
             oj{{"corpora", corpora},
                {"oracle", c.oracle ? oj(c.oracle->string()) : oj(nullptr)},
                {"settings", settings},
                {"generators", people(c.generators)},
                {"deducers", people(c.deducers)},
                {"repetitions", c.repetitions},
                {"seed", c.seed ? oj(*c.seed) : oj(nullptr)},
                {"group_by", group_by},
                {"report_formats", formats}}},
            {"corpus_digest", loaded.digest},
            {"corpora", loaded.files},
            {"template_digests", digests},
            {"planned_records", planned}};
}

inline std::string records_jsonl(const std::vector<RunRecord>& records) {
  std::string out;
  for (const auto& r : records) out += serialize_run_record(r) + "\n";
  return out;
}

inline std::vector<RunRecord> parse_records_jsonl(std::string_view text, const fs::path& source) {
  std::vector<RunRecord> out;
  size_t line_no = 0;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (unicode::trim(line).empty()) continue;
    try {
      out.push_back(run_record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedRecord, source.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline std::string scores_jsonl(const std::vector<RunRecord>& records) {
  using oj = nlohmann::ordered_json;
  std::string out;
  for (const auto& r : records) {
    oj line{{"key", r.key.hash()},
            {"instance_id", r.key.instance_id},
            {"setting", r.setting_label},
            {"generator", r.key.generator_id ? oj(*r.key.generator_id) : oj(nullptr)},
            {"deducer", r.key.deducer_id},
            {"repetition", r.key.repetition},
            {"extracted_answer", r.extracted_answer ? oj(*r.extracted_answer) : oj(nullptr)},
            {"em_strict", r.scores.em_strict},
            {"em_lenient", r.scores.em_lenient},
            {"chrf2", r.scores.chrf2},
            {"truncated", r.truncated},
            {"error", r.error ? oj(*r.error) : oj(nullptr)}};
    out += line.dump(-1, ' ', false) + "\n";
  }
  return out;
}

inline std::string group_suffix(const std::vector<GroupField>& group_by) {
  if (group_by.empty()) return "overall";
  std::string out;
  for (auto f : group_by) out += (out.empty() ? "" : "_") + std::string(to_string(f));
  return out;
}

/// Rows are the first field, columns the second (or the metric name for one field).
inline Grid report_grid(const std::vector<ScoreReport>& reports, const std::vector<GroupField>& group_by, Metric metric) {
  if (group_by.size() == 2) return grid_from_reports(reports, group_by[0], group_by[1], metric);
  if (group_by.size() != 1) throw Error(ErrorCode::InvalidArgument, "grids need one or two group-by fields");
  std::vector<std::string> rows;
  for (const auto& r : reports) rows.push_back(*r.value(group_by[0]));
  Grid g(std::string(to_string(group_by[0])), rows, {std::string(to_string(metric))});
  for (size_t i = 0; i < reports.size(); ++i) g.at(i, 0) = metric_value(reports[i], metric);
  return g;
}

inline void write_reports(const fs::path& dir, const std::vector<RunRecord>& records, const Corpus& corpus,
                          const std::vector<GroupField>& group_by, const std::vector<ReportFormat>& formats,
                          std::vector<std::string>* warnings) {
  fs::create_directories(dir);
  auto reports = aggregate(records, corpus, group_by, warnings);
  for (ReportFormat f : formats) {
    if (f == ReportFormat::BubbleJson) {
      auto bubble = aggregate(records, corpus, {GroupField::ProblemType, GroupField::Difficulty});
      if (!bubble.empty()) write_file_atomic(dir / "bubble.json", emit_report(bubble, f));
    } else if (!reports.empty()) {
      write_file_atomic(dir / ("summary" + std::string(report_extension(f))), emit_report(reports, f));
    }
  }
}

struct LoadedRun {
  nlohmann::json manifest;
  std::vector<RunRecord> records;
  LoadedCorpus corpus;
};

inline LoadedRun load_run(const fs::path& root, const std::string& run_id) {
  fs::path dir = runs_dir(root) / run_id;
  if (!fs::exists(dir / "manifest.json") || !fs::exists(dir / "records.jsonl"))
    throw Error(ErrorCode::UnknownRun, "no run '" + run_id + "' under " + runs_dir(root).string());
  LoadedRun run;
  run.manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  std::vector<fs::path> corpora;
  for (const auto& p : run.manifest.at("config").at("corpora")) corpora.emplace_back(p.get<std::string>());
  run.corpus = load_corpora(corpora);
  if (run.corpus.digest != run.manifest.at("corpus_digest").get<std::string>())
    throw Error(ErrorCode::IoError, "corpus files changed since run '" + run_id + "'");
  run.records = parse_records_jsonl(read_file(dir / "records.jsonl"), dir / "records.jsonl");
  for (auto& r : run.records) {
    const PuzzleInstance* inst = run.corpus.corpus.find(r.key.instance_id);
    if (!inst) throw Error(ErrorCode::MalformedRecord, "record for unknown instance '" + r.key.instance_id + "'");
    score_record(r, *inst);
  }
  return run;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// Executes the configured matrix and writes runs/<id>/{manifest.json,records.jsonl,scores.jsonl}
/// plus reports/<id>/. Completed cells come from the cache, so an interrupted run resumes.
inline RunSummary cmd_run(const RunConfig& base_config, const RunOverrides& overrides = {},
                          CommandContext context = {}) {
  RunConfig config = detail::apply_overrides(base_config, overrides);
  TemplateSet templates = detail::load_templates(config);
  FamilyOracle oracle = detail::load_oracle(config);
  detail::LoadedCorpus loaded = detail::load_corpora(config.corpora);

  RunSummary summary;
  summary.run_id = config.run_id.value_or(detail::derive_run_id(config, loaded.digest, templates));
  summary.run_dir = runs_dir(config.output_dir) / summary.run_id;
  summary.report_dir = reports_dir(config.output_dir) / summary.run_id;

  // Only the backends this run touches are constructed, and never for a dry run.
  std::set<std::string> used(config.deducers.begin(), config.deducers.end());
  if (config.needs_generators()) used.insert(config.generators.begin(), config.generators.end());
  std::vector<std::unique_ptr<ChatBackend>> owned;
  std::map<std::string, ChatBackend*> backends;
  if (!overrides.dry_run) {
    for (size_t i = 0; i < config.backends.size(); ++i) {
      if (!used.contains(config.backends[i].id)) continue;
      owned.push_back(context.factory(config.backends[i], i));
      backends[config.backends[i].id] = owned.back().get();
    }
  }

  RunCache cache(config.cache_dir);
  PipelineOptions options;
  options.cache = &cache;
  options.oracle = &oracle;
  options.renderer = PromptRenderer(templates);
  options.workers = config.workers;
  options.seed = config.seed;
  std::mutex computed_mutex;
  options.on_record = [&](const RunRecord& r, bool from_cache) {
    std::lock_guard lock(computed_mutex);
    if (from_cache) ++summary.from_cache;
    else summary.computed.push_back(r.key);
  };
  Pipeline pipeline(std::move(options));
  auto generators = detail::participants(config, config.generators, backends);
  auto deducers = detail::participants(config, config.deducers, backends);
  std::vector<Job> jobs = pipeline.plan(config.settings, loaded.corpus, generators, deducers);
  summary.planned = jobs.size();

  fs::create_directories(summary.run_dir);
  write_file_atomic(summary.run_dir / "manifest.json",
                    detail::manifest_json(config, summary.run_id, loaded, templates, jobs.size()).dump(2) + "\n");

  if (overrides.dry_run) {
    using oj = nlohmann::ordered_json;
    std::string out;
    std::set<std::string> seen;
    auto emit = [&](const Job& job, std::string_view stage, const std::string& model, const RenderedPrompt& p) {
      if (!seen.insert(std::string(stage) + p.setting_fingerprint + model).second) return;
      out += oj{{"instance_id", job.instance->id},
                {"setting", job.setting.label()},
                {"stage", stage},
                {"model", model},
                {"fingerprint", p.setting_fingerprint},
                {"system", p.system_text},
                {"user", p.user_text}}
                 .dump(-1, ' ', false) +
             "\n";
    };
    for (const Job& job : jobs) {
      try {
        if (job.setting.regime == Regime::Analogical2Stage) {
          emit(job, "stage1", job.generator->model, pipeline.stage1_prompt(job.setting, *job.instance));
          emit(job, "stage2", job.deducer.model,
               pipeline.renderer().render_stage2(job.setting, *job.instance,
                                                 "<stage-1 output from " + job.generator->id + ">"));
        } else if (job.setting.regime == Regime::Analogical1Stage) {
          emit(job, "final", job.deducer.model, pipeline.renderer().render_1stage(job.setting, *job.instance));
        } else {
          emit(job, "final", job.deducer.model, pipeline.renderer().render_baseline(job.setting, *job.instance));
        }
      } catch (const Error& e) {
        ++summary.failed;
        *context.log << "dry-run: " << job.instance->id << " " << job.setting.label() << ": " << e.what() << "\n";
      }
    }
    write_file_atomic(summary.run_dir / "prompts.jsonl", out);
    return summary;
  }

  std::vector<RunRecord> records = pipeline.run_jobs(jobs);
  for (const auto& r : records) summary.failed += r.ok() ? 0 : 1;
  for (const auto& b : owned) summary.backend_calls += b->call_count();
  std::sort(summary.computed.begin(), summary.computed.end());

  write_file_atomic(summary.run_dir / "records.jsonl", detail::records_jsonl(records));
  write_file_atomic(summary.run_dir / "scores.jsonl", detail::scores_jsonl(records));
  std::vector<std::string> warnings;
  detail::write_reports(summary.report_dir, records, loaded.corpus, config.group_by, config.report_formats, &warnings);
  for (const auto& w : warnings) *context.log << "warning: " << w << "\n";
  for (const auto& r : records)
    if (!r.ok()) *context.log << "failed: " << *r.error << "\n";
  return summary;
}

/// Re-derives runs/<id>/scores.jsonl from records.jsonl. Idempotent.
inline fs::path cmd_score(const fs::path& root, const std::string& run_id) {
  detail::LoadedRun run = detail::load_run(root, run_id);
  fs::path out = runs_dir(root) / run_id / "scores.jsonl";
  write_file_atomic(out, detail::scores_jsonl(run.records));
  return out;
}

struct ReportOptions {
  std::vector<GroupField> group_by{GroupField::Setting, GroupField::Generator, GroupField::Deducer};
  Metric metric = Metric::EmLenient;
  std::optional<std::string> baseline_run_id;
  std::vector<ReportFormat> formats{ReportFormat::MarkdownTable, ReportFormat::Csv};
};

struct ReportResult {
  std::vector<fs::path> files;
  std::vector<ScoreReport> reports;
  std::optional<Grid> grid;
  std::optional<Grid> delta;
};

/// Writes reports/<id>/report_<fields>.*; with one or two group fields also a grid, and with a
/// baseline run a signed delta grid (ShapeMismatch when the grids disagree).
inline ReportResult cmd_report(const fs::path& root, const std::string& run_id, const ReportOptions& options) {
  detail::LoadedRun run = detail::load_run(root, run_id);
  ReportResult result;
  std::vector<std::string> warnings;
  result.reports = aggregate(run.records, run.corpus.corpus, options.group_by, &warnings);
  if (result.reports.empty()) throw Error(ErrorCode::InvalidArgument, "run '" + run_id + "' has no scored records");
  fs::path dir = reports_dir(root) / run_id;
  fs::create_directories(dir);
  const std::string suffix = detail::group_suffix(options.group_by);
  auto write = [&](const std::string& name, const std::string& bytes) {
    write_file_atomic(dir / name, bytes);
    result.files.push_back(dir / name);
  };
  for (ReportFormat f : options.formats) {
    if (f == ReportFormat::BubbleJson) {
      write("bubble.json",
            emit_report(aggregate(run.records, run.corpus.corpus, {GroupField::ProblemType, GroupField::Difficulty}), f));
    } else {
      write("report_" + suffix + std::string(report_extension(f)), emit_report(result.reports, f));
    }
  }
  if (options.group_by.size() == 1 || options.group_by.size() == 2) {
    result.grid = detail::report_grid(result.reports, options.group_by, options.metric);
    write("grid_" + suffix + ".md", grid_to_markdown(*result.grid));
    write("grid_" + suffix + ".csv", grid_to_csv(*result.grid));
  }
  if (options.baseline_run_id) {
    if (!result.grid) throw Error(ErrorCode::InvalidArgument, "a baseline comparison needs one or two group-by fields");
    detail::LoadedRun base = detail::load_run(root, *options.baseline_run_id);
    auto base_reports = aggregate(base.records, base.corpus.corpus, options.group_by);
    Grid base_grid = detail::report_grid(base_reports, options.group_by, options.metric);
    result.delta = delta_table(*result.grid, base_grid);
    const std::string name = "delta_" + suffix + "_vs_" + *options.baseline_run_id;
    write(name + ".md", grid_to_markdown(*result.delta, CellStyle::Signed));
    write(name + ".csv", grid_to_csv(*result.delta, CellStyle::Signed));
  }
  return result;
}

/// Delta between two grid CSV files (rows by columns of percents).
inline Grid cmd_grid_delta(const fs::path& ours, const fs::path& baseline) {
  return delta_table(grid_from_csv(read_file(ours)), grid_from_csv(read_file(baseline)));
}

inline RunCache::VerifyReport cmd_cache_verify(const RunConfig& config) {
  RunCache cache(config.cache_dir);
  return cache.verify();
}

/// Deletes cache entries the config can no longer reach. Returns the number of files removed.
inline size_t cmd_cache_gc(const RunConfig& base_config, const RunOverrides& overrides = {}) {
  RunConfig config = detail::apply_overrides(base_config, overrides);
  TemplateSet templates = detail::load_templates(config);
  FamilyOracle oracle = detail::load_oracle(config);
  detail::LoadedCorpus loaded = detail::load_corpora(config.corpora);
  PipelineOptions options;
  options.oracle = &oracle;
  options.renderer = PromptRenderer(templates);
  Pipeline pipeline(std::move(options));
  const std::map<std::string, ChatBackend*> none;
  auto jobs = pipeline.plan(config.settings, loaded.corpus, detail::participants(config, config.generators, none),
                            detail::participants(config, config.deducers, none));
  std::set<std::string> keep, keep_stage1;
  for (const Job& job : jobs) {
    keep.insert(pipeline.key_for(job.setting, *job.instance, job.generator, job.deducer, job.repetition).hash());
    if (job.setting.regime == Regime::Analogical2Stage) {
      try {
        keep_stage1.insert(pipeline.stage1_key_for(job));
      } catch (const Error&) {
        // Unrenderable jobs never produced a stage-1 entry.
      }
    }
  }
  RunCache cache(config.cache_dir);
  return cache.gc(keep, keep_stage1);
}

struct CorpusCheck {
  size_t instances = 0;
  size_t violations = 0;
  size_t warnings = 0;
  bool ok() const { return violations == 0; }
};

/// Loads each corpus, reports every violated invariant and warning, and flags modeLing languages
/// missing from the family oracle.
inline CorpusCheck cmd_validate_corpus(const std::vector<fs::path>& paths, const FamilyOracle& oracle,
                                       std::ostream& out) {
  CorpusCheck check;
  std::set<std::string> ids;
  for (const fs::path& p : paths) {
    std::vector<PuzzleInstance> instances;
    try {
      instances = load_corpus(p);
    } catch (const Error& e) {
      out << p.string() << ": " << e.what() << "\n";
      ++check.violations;
      continue;
    }
    for (const auto& inst : instances) {
      ++check.instances;
      if (!ids.insert(inst.id).second) {
        out << p.string() << ": " << inst.id << ": DuplicateId across corpora\n";
        ++check.violations;
      }
      ValidationReport report = validate_instance(inst);
      for (const auto& v : report.violations) out << p.string() << ": " << inst.id << ": " << v << "\n";
      for (const auto& w : report.warnings) out << p.string() << ": " << inst.id << ": warning: " << w << "\n";
      check.violations += report.violations.size();
      check.warnings += report.warnings.size();
      if (inst.dataset == Dataset::ModeLing && !oracle.contains(inst.language)) {
        out << p.string() << ": " << inst.id << ": warning: language '" << inst.language
            << "' has no oracle family\n";
        ++check.warnings;
      }
    }
    out << p.string() << ": " << instances.size() << " instances\n";
  }
  return check;
}

}  // namespace lingeval
