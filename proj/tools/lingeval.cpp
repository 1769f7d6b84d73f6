// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lingeval/lingeval.hpp"

namespace {

using namespace lingeval;

std::vector<GroupField> group_fields(const std::string& spec, const std::vector<GroupField>& fallback) {
  return spec.empty() ? fallback : parse_group_by(spec);
}

std::vector<ReportFormat> formats(const std::vector<std::string>& names, const std::vector<ReportFormat>& fallback) {
  if (names.empty()) return fallback;
  std::vector<ReportFormat> out;
  for (const auto& n : names) {
    auto f = parse_report_format(n);
    if (!f) throw Error(ErrorCode::ConfigError, "--format: unknown format '" + n + "'");
    out.push_back(*f);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lingeval: evaluation harness for translation puzzles"};
  app.require_subcommand(1);

  std::string config_path;
  RunOverrides overrides;
  int reps = 0;

  auto add_config = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("-c,--config", config_path, "run config (TOML)");
    if (required) opt->required();
  };
  auto add_selection = [&](CLI::App* cmd) {
    cmd->add_option("--setting", overrides.settings, "restrict to these setting labels");
    cmd->add_option("--generator", overrides.generators, "generator backend ids");
    cmd->add_option("--deducer", overrides.deducers, "deducer backend ids");
    cmd->add_option("--reps", reps, "repetitions per cell")->check(CLI::PositiveNumber);
  };

  auto* run = app.add_subcommand("run", "execute a config");
  add_config(run, true);
  add_selection(run);
  run->add_flag("--dry-run", overrides.dry_run, "render prompts only; no backend calls");

  std::string root = ".";
  std::string run_id;
  auto* score = app.add_subcommand("score", "recompute scores for a run");
  add_config(score, false);
  score->add_option("--root", root, "directory holding runs/ and reports/");
  score->add_option("run_id", run_id, "run id")->required();

  std::string group_by_spec;
  std::string metric_name = "em_lenient";
  std::string baseline_id;
  std::vector<std::string> format_names;
  std::string ours_grid, baseline_grid;
  auto* report = app.add_subcommand("report", "aggregate a run, optionally against a baseline run");
  add_config(report, false);
  report->add_option("--root", root, "directory holding runs/ and reports/");
  report->add_option("run_id", run_id, "run id");
  report->add_option("--group-by", group_by_spec, "comma-separated fields");
  report->add_option("--metric", metric_name, "em_strict, em_lenient, chrf2, bleu, count");
  report->add_option("--baseline", baseline_id, "baseline run id for a delta grid");
  report->add_option("--format", format_names, "markdown, csv, bubble_json");
  report->add_option("--grid", ours_grid, "grid CSV to compare instead of a run");
  report->add_option("--baseline-grid", baseline_grid, "baseline grid CSV");

  auto* cache = app.add_subcommand("cache", "inspect the run cache");
  cache->require_subcommand(1);
  auto* gc = cache->add_subcommand("gc", "remove entries the config no longer reaches");
  add_config(gc, true);
  add_selection(gc);
  auto* verify = cache->add_subcommand("verify", "parse every entry and quarantine corrupt ones");
  add_config(verify, true);

  std::vector<std::string> corpus_paths;
  std::string oracle_path;
  auto* validate = app.add_subcommand("validate-corpus", "check corpus files");
  validate->add_option("paths", corpus_paths, "JSONL corpus files")->required();
  validate->add_option("--oracle", oracle_path, "family oracle JSON");

  CLI11_PARSE(app, argc, argv);
  if (reps > 0) overrides.repetitions = reps;

  try {
    std::optional<RunConfig> config;
    if (!config_path.empty()) {
      config = load_run_config(config_path);
      root = config->output_dir.string();
    }

    if (*run) {
      RunSummary s = cmd_run(*config, overrides);
      std::cout << s.run_id << "\n";
      std::cerr << "planned " << s.planned << ", cached " << s.from_cache << ", computed " << s.computed.size()
                << ", failed " << s.failed << ", backend calls " << s.backend_calls << "\n";
      if (s.planned > 0 && s.failed == s.planned) return 3;
      return 0;
    }
    if (*score) {
      std::cout << cmd_score(root, run_id).string() << "\n";
      return 0;
    }
    if (*report) {
      if (!ours_grid.empty() || !baseline_grid.empty()) {
        if (ours_grid.empty() || baseline_grid.empty())
          throw Error(ErrorCode::InvalidArgument, "--grid and --baseline-grid go together");
        std::cout << grid_to_markdown(cmd_grid_delta(ours_grid, baseline_grid), CellStyle::Signed);
        return 0;
      }
      if (run_id.empty()) throw Error(ErrorCode::InvalidArgument, "report needs a run id");
      ReportOptions options;
      options.group_by = group_fields(group_by_spec, config ? config->group_by : options.group_by);
      auto metric = parse_metric(metric_name);
      if (!metric) throw Error(ErrorCode::InvalidArgument, "--metric: unknown metric '" + metric_name + "'");
      options.metric = *metric;
      if (!baseline_id.empty()) options.baseline_run_id = baseline_id;
      options.formats = formats(format_names, config ? config->report_formats : options.formats);
      ReportResult r = cmd_report(root, run_id, options);
      if (r.delta) std::cout << grid_to_markdown(*r.delta, CellStyle::Signed);
      else if (r.grid) std::cout << grid_to_markdown(*r.grid);
      else std::cout << emit_report(r.reports, ReportFormat::MarkdownTable);
      for (const auto& f : r.files) std::cerr << "wrote " << f.string() << "\n";
      return 0;
    }
    if (*gc) {
      std::cout << "removed " << cmd_cache_gc(*config, overrides) << " files\n";
      return 0;
    }
    if (*verify) {
      auto v = cmd_cache_verify(*config);
      std::cout << "records " << v.records << ", stage1 " << v.stage1 << ", corrupt " << v.corrupt << "\n";
      return v.corrupt == 0 ? 0 : 1;
    }
    if (*validate) {
      FamilyOracle oracle = oracle_path.empty() ? default_family_oracle() : FamilyOracle::load(oracle_path);
      std::vector<std::filesystem::path> paths(corpus_paths.begin(), corpus_paths.end());
      CorpusCheck check = cmd_validate_corpus(paths, oracle, std::cout);
      std::cout << check.instances << " instances, " << check.violations << " violations, " << check.warnings
                << " warnings\n";
      return check.ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
