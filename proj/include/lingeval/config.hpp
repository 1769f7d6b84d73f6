// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <toml.hpp>

#include "lingeval/analysis.hpp"
#include "lingeval/error.hpp"
#include "lingeval/prompt.hpp"

namespace lingeval {

inline constexpr std::string_view kApiKeyEnv = "LINGEVAL_API_KEY";
inline constexpr std::string_view kBaseUrlEnv = "LINGEVAL_BASE_URL";

enum class BackendKind { OpenAI, Mock };

struct BackendConfig {
  std::string id;
  BackendKind kind = BackendKind::Mock;
  std::string model;
  std::string base_url;                              // openai only
  std::string api_key_env{kApiKeyEnv};               // name of the variable holding the key
  int max_in_flight = 4;
  int timeout_s = 120;
  int max_attempts = 5;
  std::optional<std::filesystem::path> mock_script;  // mock only
  int latency_ms = 0;                                // mock only
};

struct RunConfig {
  std::filesystem::path source;  // config file, when loaded from disk
  std::optional<std::string> run_id;
  std::vector<std::filesystem::path> corpora;
  std::optional<std::filesystem::path> oracle;
  std::optional<std::filesystem::path> templates_dir;
  std::vector<EvalSetting> settings;
  int repetitions = kDefaultRepetitions;
  double temperature = kDefaultTemperature;
  std::map<Regime, int> max_tokens_overrides;
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path output_dir = ".";
  std::vector<ReportFormat> report_formats{ReportFormat::MarkdownTable, ReportFormat::Csv};
  std::vector<GroupField> group_by{GroupField::Setting, GroupField::Generator, GroupField::Deducer};
  std::optional<int64_t> seed;
  int workers = 8;
  std::vector<BackendConfig> backends;
  std::vector<std::string> generators;
  std::vector<std::string> deducers;

  const BackendConfig* backend(std::string_view id) const {
    for (const auto& b : backends)
      if (b.id == id) return &b;
    return nullptr;
  }

  bool needs_generators() const {
    for (const auto& s : settings)
      if (s.regime == Regime::Analogical2Stage) return true;
    return false;
  }
};

/// Inverse of EvalSetting::label(): "few_shot[zero_shot_style]", "analogical_2stage[oracle]@512".
inline std::optional<EvalSetting> parse_setting_label(std::string_view text) {
  std::string_view s = text;
  std::optional<int> max_tokens;
  if (size_t at = s.find('@'); at != std::string_view::npos) {
    std::string digits(s.substr(at + 1));
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
    max_tokens = std::stoi(digits);
    s = s.substr(0, at);
  }
  std::string_view knob;
  if (size_t open = s.find('['); open != std::string_view::npos) {
    if (s.back() != ']') return std::nullopt;
    knob = s.substr(open + 1, s.size() - open - 2);
    s = s.substr(0, open);
  }
  auto regime = parse_regime(s);
  if (!regime) return std::nullopt;
  EvalSetting setting = EvalSetting::make(*regime);
  if (!knob.empty()) {
    if (*regime == Regime::FewShot) {
      auto v = parse_variant(knob);
      if (!v) return std::nullopt;
      setting.fewshot_prompt_variant = *v;
    } else if (*regime == Regime::Analogical2Stage) {
      auto f = parse_family_source(knob);
      if (!f) return std::nullopt;
      setting.family_source = *f;
    } else {
      return std::nullopt;
    }
  }
  if (max_tokens) setting.max_tokens = *max_tokens;
  return setting;
}

namespace detail {

[[noreturn]] inline void config_error(const std::string& path, const std::string& reason) {
  throw Error(ErrorCode::ConfigError, path + ": " + reason);
}

inline std::string field_path(std::string_view parent, std::string_view child) {
  return parent.empty() ? std::string(child) : std::string(parent) + "." + std::string(child);
}

inline std::string index_path(std::string_view parent, size_t i) {
  return std::string(parent) + "[" + std::to_string(i) + "]";
}

inline std::string require_str(const toml::node& node, const std::string& path) {
  if (auto v = node.value<std::string>()) return *v;
  config_error(path, "expected a string");
}

inline int64_t require_int(const toml::node& node, const std::string& path) {
  if (!node.is_integer()) config_error(path, "expected an integer");
  return *node.value<int64_t>();
}

inline double require_real(const toml::node& node, const std::string& path) {
  if (node.is_floating_point() || node.is_integer()) return *node.value<double>();
  config_error(path, "expected a number");
}

/// Accepts a string or an array of strings.
inline std::vector<std::string> string_list(const toml::node& node, const std::string& path) {
  std::vector<std::string> out;
  if (node.is_string()) {
    out.push_back(*node.value<std::string>());
  } else if (const toml::array* arr = node.as_array()) {
    for (size_t i = 0; i < arr->size(); ++i) out.push_back(require_str((*arr)[i], index_path(path, i)));
  } else {
    config_error(path, "expected a string or an array of strings");
  }
  return out;
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

/// "${VAR}" reads the environment; anything else would be a literal secret and is refused.
inline std::string api_key_variable(const std::string& value, const std::string& path) {
  if (value.size() > 3 && value.rfind("${", 0) == 0 && value.back() == '}') return value.substr(2, value.size() - 3);
  config_error(path, "literal API keys are not accepted; use \"${VAR}\" or api_key_env");
}

inline EvalSetting parse_setting(const toml::node& node, const std::string& path) {
  if (node.is_string()) {
    auto s = parse_setting_label(*node.value<std::string>());
    if (!s) config_error(path, "unknown setting '" + *node.value<std::string>() + "'");
    return *s;
  }
  const toml::table* t = node.as_table();
  if (!t) config_error(path, "expected a setting name or table");
  static const std::set<std::string> known{"regime", "variant", "family_source", "max_tokens", "temperature",
                                           "repetitions"};
  for (const auto& [k, v] : *t)
    if (!known.contains(std::string(k.str()))) config_error(field_path(path, k.str()), "unknown key");
  const toml::node* regime_node = t->get("regime");
  if (!regime_node) config_error(field_path(path, "regime"), "missing");
  auto regime = parse_regime(require_str(*regime_node, field_path(path, "regime")));
  if (!regime) config_error(field_path(path, "regime"), "unknown regime");
  EvalSetting s = EvalSetting::make(*regime);
  if (const toml::node* n = t->get("variant")) {
    if (*regime != Regime::FewShot) config_error(field_path(path, "variant"), "only few_shot has variants");
    auto v = parse_variant(require_str(*n, field_path(path, "variant")));
    if (!v) config_error(field_path(path, "variant"), "expected zero_shot_style or few_shot_style");
    s.fewshot_prompt_variant = *v;
  }
  if (const toml::node* n = t->get("family_source")) {
    if (*regime != Regime::Analogical2Stage)
      config_error(field_path(path, "family_source"), "only analogical_2stage reads a family source");
    auto f = parse_family_source(require_str(*n, field_path(path, "family_source")));
    if (!f) config_error(field_path(path, "family_source"), "expected inferred or oracle");
    s.family_source = *f;
  }
  if (const toml::node* n = t->get("max_tokens")) s.max_tokens = static_cast<int>(require_int(*n, field_path(path, "max_tokens")));
  if (const toml::node* n = t->get("temperature")) s.temperature = require_real(*n, field_path(path, "temperature"));
  if (const toml::node* n = t->get("repetitions"))
    s.repetitions = static_cast<int>(require_int(*n, field_path(path, "repetitions")));
  return s;
}

inline BackendConfig parse_backend(const toml::node& node, const std::string& path) {
  const toml::table* t = node.as_table();
  if (!t) config_error(path, "expected a table");
  static const std::set<std::string> known{"id", "kind", "model", "base_url", "api_key", "api_key_env",
                                           "max_in_flight", "timeout_s", "max_attempts", "mock_script",
                                           "latency_ms"};
  for (const auto& [k, v] : *t)
    if (!known.contains(std::string(k.str()))) config_error(field_path(path, k.str()), "unknown key");
  BackendConfig b;
  const toml::node* id = t->get("id");
  if (!id) config_error(field_path(path, "id"), "missing");
  b.id = require_str(*id, field_path(path, "id"));
  if (b.id.empty()) config_error(field_path(path, "id"), "must be non-empty");
  std::string kind = t->get("kind") ? require_str(*t->get("kind"), field_path(path, "kind")) : "openai";
  if (kind == "openai") b.kind = BackendKind::OpenAI;
  else if (kind == "mock") b.kind = BackendKind::Mock;
  else config_error(field_path(path, "kind"), "expected openai or mock");
  b.model = t->get("model") ? require_str(*t->get("model"), field_path(path, "model")) : b.id;
  if (const toml::node* n = t->get("base_url")) b.base_url = require_str(*n, field_path(path, "base_url"));
  if (const toml::node* n = t->get("api_key"))
    b.api_key_env = api_key_variable(require_str(*n, field_path(path, "api_key")), field_path(path, "api_key"));
  if (const toml::node* n = t->get("api_key_env")) b.api_key_env = require_str(*n, field_path(path, "api_key_env"));
  if (const toml::node* n = t->get("max_in_flight"))
    b.max_in_flight = static_cast<int>(require_int(*n, field_path(path, "max_in_flight")));
  if (const toml::node* n = t->get("timeout_s")) b.timeout_s = static_cast<int>(require_int(*n, field_path(path, "timeout_s")));
  if (const toml::node* n = t->get("max_attempts"))
    b.max_attempts = static_cast<int>(require_int(*n, field_path(path, "max_attempts")));
  if (const toml::node* n = t->get("mock_script")) b.mock_script = require_str(*n, field_path(path, "mock_script"));
  if (const toml::node* n = t->get("latency_ms")) b.latency_ms = static_cast<int>(require_int(*n, field_path(path, "latency_ms")));
  if (b.max_in_flight < 1) config_error(field_path(path, "max_in_flight"), "must be >= 1");
  if (b.max_attempts < 1) config_error(field_path(path, "max_attempts"), "must be >= 1");
  if (b.timeout_s < 1) config_error(field_path(path, "timeout_s"), "must be >= 1");
  if (b.latency_ms < 0) config_error(field_path(path, "latency_ms"), "must be >= 0");
  return b;
}

}  // namespace detail

/// Parses TOML text. Relative paths resolve against `base_dir`. Does not touch the filesystem.
inline RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
  toml::table doc;
  try {
    doc = toml::parse(text);
  } catch (const toml::parse_error& e) {
    const auto& where = e.source().begin;
    throw Error(ErrorCode::ConfigError, "line " + std::to_string(where.line) + ": " + std::string(e.description()));
  }
  using namespace detail;
  static const std::set<std::string> known{"run_id", "corpus", "oracle", "templates_dir", "settings",
                                           "repetitions", "temperature", "max_tokens", "cache_dir", "output_dir",
                                           "report_formats", "group_by", "seed", "workers", "backends",
                                           "generators", "deducers"};
  for (const auto& [k, v] : doc)
    if (!known.contains(std::string(k.str()))) config_error(std::string(k.str()), "unknown key");

  RunConfig c;
  if (const toml::node* n = doc.get("run_id")) {
    c.run_id = require_str(*n, "run_id");
    if (c.run_id->empty() || c.run_id->find_first_of("/\\") != std::string::npos || *c.run_id == "." || *c.run_id == "..")
      config_error("run_id", "must be a plain directory name");
  }
  const toml::node* corpus = doc.get("corpus");
  if (!corpus) config_error("corpus", "missing");
  for (const auto& p : string_list(*corpus, "corpus")) c.corpora.push_back(resolve(base_dir, p));
  if (c.corpora.empty()) config_error("corpus", "must name at least one file");
  if (const toml::node* n = doc.get("oracle")) c.oracle = resolve(base_dir, require_str(*n, "oracle"));
  if (const toml::node* n = doc.get("templates_dir")) c.templates_dir = resolve(base_dir, require_str(*n, "templates_dir"));
  if (const toml::node* n = doc.get("repetitions")) c.repetitions = static_cast<int>(require_int(*n, "repetitions"));
  if (c.repetitions < 1) config_error("repetitions", "must be >= 1");
  if (const toml::node* n = doc.get("temperature")) c.temperature = require_real(*n, "temperature");
  if (!(c.temperature >= 0.0 && c.temperature <= 2.0)) config_error("temperature", "must lie in [0, 2]");
  if (const toml::node* n = doc.get("max_tokens")) {
    const toml::table* t = n->as_table();
    if (!t) config_error("max_tokens", "expected a table of regime = tokens");
    for (const auto& [k, v] : *t) {
      std::string path = field_path("max_tokens", k.str());
      auto regime = parse_regime(k.str());
      if (!regime) config_error(path, "unknown regime");
      int64_t tokens = require_int(v, path);
      if (tokens < 1) config_error(path, "must be >= 1");
      c.max_tokens_overrides[*regime] = static_cast<int>(tokens);
    }
  }

  const toml::node* settings = doc.get("settings");
  if (!settings) config_error("settings", "missing");
  const toml::array* arr = settings->as_array();
  if (!arr || arr->empty()) config_error("settings", "expected a non-empty array");
  for (size_t i = 0; i < arr->size(); ++i) {
    std::string path = index_path("settings", i);
    const toml::node& node = (*arr)[i];
    const toml::table* t = node.as_table();
    EvalSetting s = parse_setting(node, path);
    bool explicit_tokens = t ? t->contains("max_tokens") : node.value<std::string>()->find('@') != std::string::npos;
    if (!explicit_tokens)
      if (auto it = c.max_tokens_overrides.find(s.regime); it != c.max_tokens_overrides.end()) s.max_tokens = it->second;
    if (!t || !t->contains("temperature")) s.temperature = c.temperature;
    if (!t || !t->contains("repetitions")) s.repetitions = c.repetitions;
    try {
      s.validate();
    } catch (const Error& e) {
      config_error(path, e.message());
    }
    c.settings.push_back(s);
  }

  if (const toml::node* n = doc.get("cache_dir")) c.cache_dir = require_str(*n, "cache_dir");
  c.cache_dir = resolve(base_dir, c.cache_dir.string());
  if (const toml::node* n = doc.get("output_dir")) c.output_dir = require_str(*n, "output_dir");
  c.output_dir = resolve(base_dir, c.output_dir.string());
  if (const toml::node* n = doc.get("report_formats")) {
    c.report_formats.clear();
    auto names = string_list(*n, "report_formats");
    for (size_t i = 0; i < names.size(); ++i) {
      auto f = parse_report_format(names[i]);
      if (!f) config_error(index_path("report_formats", i), "expected markdown, csv or bubble_json");
      c.report_formats.push_back(*f);
    }
  }
  if (const toml::node* n = doc.get("group_by")) {
    c.group_by.clear();
    auto names = string_list(*n, "group_by");
    for (size_t i = 0; i < names.size(); ++i) {
      auto f = parse_group_field(names[i]);
      if (!f) config_error(index_path("group_by", i), "unknown field");
      c.group_by.push_back(*f);
    }
  }
  if (const toml::node* n = doc.get("seed")) c.seed = require_int(*n, "seed");
  if (const toml::node* n = doc.get("workers")) c.workers = static_cast<int>(require_int(*n, "workers"));
  if (c.workers < 1) config_error("workers", "must be >= 1");

  const toml::node* backends = doc.get("backends");
  if (!backends) config_error("backends", "missing");
  const toml::array* barr = backends->as_array();
  if (!barr || barr->empty()) config_error("backends", "expected a non-empty array of tables");
  std::set<std::string> ids;
  for (size_t i = 0; i < barr->size(); ++i) {
    std::string path = index_path("backends", i);
    BackendConfig b = parse_backend((*barr)[i], path);
    if (!ids.insert(b.id).second) config_error(field_path(path, "id"), "duplicate backend id '" + b.id + "'");
    if (b.mock_script) b.mock_script = resolve(base_dir, b.mock_script->string());
    c.backends.push_back(std::move(b));
  }

  auto participants = [&](const char* field, std::vector<std::string>& out) {
    if (const toml::node* n = doc.get(field)) out = string_list(*n, field);
    for (size_t i = 0; i < out.size(); ++i)
      if (!ids.contains(out[i]))
        config_error(index_path(field, i), "unknown backend id '" + out[i] + "'");
  };
  participants("generators", c.generators);
  participants("deducers", c.deducers);
  if (c.deducers.empty()) config_error("deducers", "must name at least one backend");
  if (c.needs_generators() && c.generators.empty())
    config_error("generators", "required by analogical_2stage settings");
  return c;
}

/// Reads and parses a config file, then checks that referenced files exist.
inline RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::ConfigError, "config: file not found: " + path.string());
  RunConfig c = parse_run_config(read_file(path), path.parent_path());
  c.source = path;
  for (size_t i = 0; i < c.corpora.size(); ++i)
    if (!std::filesystem::exists(c.corpora[i]))
      detail::config_error(detail::index_path("corpus", i), "file not found: " + c.corpora[i].string());
  if (c.oracle && !std::filesystem::exists(*c.oracle)) detail::config_error("oracle", "file not found: " + c.oracle->string());
  if (c.templates_dir && !std::filesystem::is_directory(*c.templates_dir))
    detail::config_error("templates_dir", "directory not found: " + c.templates_dir->string());
  for (size_t i = 0; i < c.backends.size(); ++i)
    if (c.backends[i].mock_script && !std::filesystem::exists(*c.backends[i].mock_script))
      detail::config_error(detail::field_path(detail::index_path("backends", i), "mock_script"),
                           "file not found: " + c.backends[i].mock_script->string());
  return c;
}

/// Base URL and key for an openai backend, from the config or LINGEVAL_* environment variables.
inline std::pair<std::string, std::string> resolve_credentials(const BackendConfig& b, size_t index) {
  std::string path = detail::index_path("backends", index);
  std::string base = b.base_url;
  if (base.empty())
    if (const char* env = std::getenv(std::string(kBaseUrlEnv).c_str())) base = env;
  if (base.empty()) detail::config_error(detail::field_path(path, "base_url"), "unset and LINGEVAL_BASE_URL is empty");
  const char* key = std::getenv(b.api_key_env.c_str());
  if (!key || !*key) detail::config_error(detail::field_path(path, "api_key_env"), b.api_key_env + " is not set");
  return {base, key};
}

}  // namespace lingeval
