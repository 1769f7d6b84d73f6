// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lingeval/corpus.hpp"
#include "lingeval/error.hpp"
#include "lingeval/hash.hpp"
#include "lingeval/templates.hpp"

namespace lingeval {

enum class Regime { ZeroShot, FewShot, FewShotCoT, FewShotCoTRationale, Analogical1Stage, Analogical2Stage };
enum class FewShotVariant { ZeroShotStyle, FewShotStyle };
enum class FamilySource { Inferred, Oracle };

inline constexpr double kDefaultTemperature = 0.3;
inline constexpr int kDefaultRepetitions = 3;
inline constexpr int kShortMaxTokens = 512;
inline constexpr int kLongMaxTokens = 4096;

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::ZeroShot: return "zero_shot";
    case Regime::FewShot: return "few_shot";
    case Regime::FewShotCoT: return "few_shot_cot";
    case Regime::FewShotCoTRationale: return "few_shot_cot_rationale";
    case Regime::Analogical1Stage: return "analogical_1stage";
    case Regime::Analogical2Stage: return "analogical_2stage";
  }
  return "unknown";
}
inline std::string_view to_string(FewShotVariant v) {
  return v == FewShotVariant::ZeroShotStyle ? "zero_shot_style" : "few_shot_style";
}
inline std::string_view to_string(FamilySource s) { return s == FamilySource::Oracle ? "oracle" : "inferred"; }

inline std::optional<Regime> parse_regime(std::string_view s) {
  for (Regime r : {Regime::ZeroShot, Regime::FewShot, Regime::FewShotCoT, Regime::FewShotCoTRationale,
                   Regime::Analogical1Stage, Regime::Analogical2Stage})
    if (to_string(r) == s) return r;
  return std::nullopt;
}
inline std::optional<FewShotVariant> parse_variant(std::string_view s) {
  if (s == "zero_shot_style") return FewShotVariant::ZeroShotStyle;
  if (s == "few_shot_style") return FewShotVariant::FewShotStyle;
  return std::nullopt;
}
inline std::optional<FamilySource> parse_family_source(std::string_view s) {
  if (s == "inferred") return FamilySource::Inferred;
  if (s == "oracle") return FamilySource::Oracle;
  return std::nullopt;
}

inline bool is_baseline(Regime r) {
  return r == Regime::ZeroShot || r == Regime::FewShot || r == Regime::FewShotCoT || r == Regime::FewShotCoTRationale;
}

/// Rationale and analogical regimes produce long outputs and get the long budget.
inline int default_max_tokens(Regime r) {
  switch (r) {
    case Regime::FewShotCoTRationale:
    case Regime::Analogical1Stage:
    case Regime::Analogical2Stage: return kLongMaxTokens;
    default: return kShortMaxTokens;
  }
}

struct EvalSetting {
  Regime regime = Regime::FewShot;
  FewShotVariant fewshot_prompt_variant = FewShotVariant::FewShotStyle;
  FamilySource family_source = FamilySource::Inferred;  // only read for Analogical2Stage
  int max_tokens = kShortMaxTokens;
  double temperature = kDefaultTemperature;
  int repetitions = kDefaultRepetitions;

  static EvalSetting make(Regime regime) {
    EvalSetting s;
    s.regime = regime;
    s.max_tokens = default_max_tokens(regime);
    return s;
  }

  void validate() const {
    if (max_tokens < 1) throw Error(ErrorCode::InvalidArgument, "max_tokens must be positive");
    if (!(temperature >= 0.0 && temperature <= 2.0))
      throw Error(ErrorCode::InvalidArgument, "temperature must lie in [0, 2]");
    if (repetitions < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be positive");
  }

  /// Short human-readable name, e.g. "few_shot[zero_shot_style]" or "analogical_2stage[oracle]@512".
  std::string label() const {
    std::string out(to_string(regime));
    if (regime == Regime::FewShot && fewshot_prompt_variant == FewShotVariant::ZeroShotStyle)
      out += "[zero_shot_style]";
    if (regime == Regime::Analogical2Stage && family_source == FamilySource::Oracle) out += "[oracle]";
    if (max_tokens != default_max_tokens(regime)) out += "@" + std::to_string(max_tokens);
    return out;
  }
};

inline std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

struct RenderedPrompt {
  std::string system_text;
  std::string user_text;
  std::string setting_fingerprint;
};

/// SHA-256 over (system, user, temperature, max_tokens), each length-prefixed.
inline std::string prompt_fingerprint(std::string_view system_text, std::string_view user_text, double temperature,
                                      int max_tokens) {
  return Sha256()
      .field(system_text)
      .field(user_text)
      .field(format_real(temperature))
      .field(std::to_string(max_tokens))
      .hex();
}

/// The ten prompt texts. Defaults are compiled in; load_dir reads templates/*.txt instead.
struct TemplateSet {
  std::string system_zero_shot{templates::kSystemZeroShot};
  std::string instruction_zero_shot{templates::kInstructionZeroShot};
  std::string system_exemplar{templates::kSystemExemplar};
  std::string instruction_few_shot{templates::kInstructionFewShot};
  std::string instruction_few_shot_cot{templates::kInstructionFewShotCot};
  std::string instruction_few_shot_cot_rationale{templates::kInstructionFewShotCotRationale};
  std::string instruction_analogical_1stage{templates::kInstructionAnalogical1stage};
  std::string instruction_stage1_inferred{templates::kInstructionStage1Inferred};
  std::string instruction_stage1_oracle{templates::kInstructionStage1Oracle};
  std::string instruction_stage2_deduce{templates::kInstructionStage2Deduce};

  /// File stem -> member, in a fixed order.
  std::vector<std::pair<std::string_view, const std::string*>> named() const {
    return {{"system_zero_shot", &system_zero_shot},
            {"instruction_zero_shot", &instruction_zero_shot},
            {"system_exemplar", &system_exemplar},
            {"instruction_few_shot", &instruction_few_shot},
            {"instruction_few_shot_cot", &instruction_few_shot_cot},
            {"instruction_few_shot_cot_rationale", &instruction_few_shot_cot_rationale},
            {"instruction_analogical_1stage", &instruction_analogical_1stage},
            {"instruction_stage1_inferred", &instruction_stage1_inferred},
            {"instruction_stage1_oracle", &instruction_stage1_oracle},
            {"instruction_stage2_deduce", &instruction_stage2_deduce}};
  }

  std::map<std::string, std::string> digests() const {
    std::map<std::string, std::string> out;
    for (const auto& [name, text] : named()) out.emplace(name, sha256_hex(*text));
    return out;
  }

  static TemplateSet load_dir(const std::filesystem::path& dir) {
    auto read = [&dir](std::string_view stem) { return read_file(dir / (std::string(stem) + ".txt")); };
    TemplateSet set;
    set.system_zero_shot = read("system_zero_shot");
    set.instruction_zero_shot = read("instruction_zero_shot");
    set.system_exemplar = read("system_exemplar");
    set.instruction_few_shot = read("instruction_few_shot");
    set.instruction_few_shot_cot = read("instruction_few_shot_cot");
    set.instruction_few_shot_cot_rationale = read("instruction_few_shot_cot_rationale");
    set.instruction_analogical_1stage = read("instruction_analogical_1stage");
    set.instruction_stage1_inferred = read("instruction_stage1_inferred");
    set.instruction_stage1_oracle = read("instruction_stage1_oracle");
    set.instruction_stage2_deduce = read("instruction_stage2_deduce");
    return set;
  }
};

/// Hash identifying a setting for cache keys: decoding params, the knobs the regime reads,
/// and the digests of the templates it renders from. Repetition count is excluded.
inline std::string setting_fingerprint(const EvalSetting& setting, const TemplateSet& templates = {}) {
  Sha256 h;
  h.field(to_string(setting.regime));
  if (setting.regime == Regime::FewShot) h.field(to_string(setting.fewshot_prompt_variant));
  if (setting.regime == Regime::Analogical2Stage) h.field(to_string(setting.family_source));
  h.field(format_real(setting.temperature)).field(std::to_string(setting.max_tokens));
  auto add = [&h](const std::string& text) { h.field(sha256_hex(text)); };
  switch (setting.regime) {
    case Regime::ZeroShot:
      add(templates.system_zero_shot);
      add(templates.instruction_zero_shot);
      break;
    case Regime::FewShot:
      if (setting.fewshot_prompt_variant == FewShotVariant::ZeroShotStyle) {
        add(templates.system_zero_shot);
        add(templates.instruction_zero_shot);
      } else {
        add(templates.system_exemplar);
        add(templates.instruction_few_shot);
      }
      break;
    case Regime::FewShotCoT:
      add(templates.system_exemplar);
      add(templates.instruction_few_shot_cot);
      break;
    case Regime::FewShotCoTRationale:
      add(templates.system_exemplar);
      add(templates.instruction_few_shot_cot_rationale);
      break;
    case Regime::Analogical1Stage:
      add(templates.system_exemplar);
      add(templates.instruction_analogical_1stage);
      break;
    case Regime::Analogical2Stage:
      add(templates.system_exemplar);
      add(setting.family_source == FamilySource::Oracle ? templates.instruction_stage1_oracle
                                                        : templates.instruction_stage1_inferred);
      add(templates.instruction_stage2_deduce);
      break;
  }
  return h.hex();
}

namespace detail {

/// Single left-to-right pass, so substituted values are never re-scanned.
inline std::string substitute(std::string_view tmpl, std::string_view name, std::string_view family) {
  static constexpr std::string_view kName = "{name}";
  static constexpr std::string_view kFamily = "{lang_family}";
  std::string out;
  out.reserve(tmpl.size() + 64);
  size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl.compare(i, kName.size(), kName) == 0) {
      out += name;
      i += kName.size();
    } else if (tmpl.compare(i, kFamily.size(), kFamily) == 0) {
      out += family;
      i += kFamily.size();
    } else {
      out += tmpl[i++];
    }
  }
  return out;
}

inline std::pair<std::string_view, std::string_view> side_labels(const PuzzleInstance& instance) {
  if (instance.direction == Direction::FromEnglish) return {"English", instance.language};
  return {instance.language, "English"};
}

inline std::string exemplar_section(const PuzzleInstance& instance) {
  auto [from, to] = side_labels(instance);
  std::string out = "Example Translations from " + std::string(from) + " to " + std::string(to);
  for (const auto& pair : instance.exemplars) {
    out += "\n\n";
    out += from;
    out += ": ";
    out += pair.source_text;
    out += '\n';
    out += to;
    out += ": ";
    out += pair.target_text;
  }
  return out;
}

inline std::string test_section(const PuzzleInstance& instance) {
  auto [from, to] = side_labels(instance);
  return "Translate Test Phrase\n\n" + std::string(from) + ": " + instance.test_phrase + "\n" + std::string(to) + ":";
}

inline std::string join_sections(std::initializer_list<std::string_view> sections) {
  std::string out;
  for (std::string_view s : sections) {
    if (!out.empty()) out += "\n\n";
    out += s;
  }
  return out;
}

inline void require_exemplars(const PuzzleInstance& instance) {
  if (instance.exemplars.empty())
    throw Error(ErrorCode::MissingExemplars, "instance '" + instance.id + "' has no exemplars");
}

inline RenderedPrompt finish(const EvalSetting& setting, std::string system_text, std::string user_text) {
  RenderedPrompt p;
  p.setting_fingerprint = prompt_fingerprint(system_text, user_text, setting.temperature, setting.max_tokens);
  p.system_text = std::move(system_text);
  p.user_text = std::move(user_text);
  return p;
}

}  // namespace detail

/// Renders every prompt the harness sends. Pure; safe to share across threads.
class PromptRenderer {
 public:
  PromptRenderer() = default;
  explicit PromptRenderer(TemplateSet templates) : templates_(std::move(templates)) {}

  const TemplateSet& templates() const noexcept { return templates_; }

  RenderedPrompt render_baseline(const EvalSetting& setting, const PuzzleInstance& instance) const {
    const TemplateSet& t = templates_;
    switch (setting.regime) {
      case Regime::ZeroShot:
        return detail::finish(setting, t.system_zero_shot,
                              detail::join_sections({t.instruction_zero_shot, detail::test_section(instance)}));
      case Regime::FewShot: {
        detail::require_exemplars(instance);
        bool zero_style = setting.fewshot_prompt_variant == FewShotVariant::ZeroShotStyle;
        return with_exemplars(setting, instance, zero_style ? t.system_zero_shot : t.system_exemplar,
                              zero_style ? t.instruction_zero_shot : t.instruction_few_shot);
      }
      case Regime::FewShotCoT:
        detail::require_exemplars(instance);
        return with_exemplars(setting, instance, t.system_exemplar, t.instruction_few_shot_cot);
      case Regime::FewShotCoTRationale:
        detail::require_exemplars(instance);
        return with_exemplars(setting, instance, t.system_exemplar, t.instruction_few_shot_cot_rationale);
      default:
        throw Error(ErrorCode::RegimeMismatch,
                    std::string(to_string(setting.regime)) + " is not a baseline regime");
    }
  }

  /// Exemplar-generation prompt. Oracle mode fills {lang_family} with the first oracle label.
  RenderedPrompt render_stage1(const EvalSetting& setting, const PuzzleInstance& instance,
                               const std::optional<std::vector<std::string>>& oracle_labels = std::nullopt) const {
    if (setting.regime != Regime::Analogical2Stage)
      throw Error(ErrorCode::RegimeMismatch, "stage-1 prompts belong to analogical_2stage");
    detail::require_exemplars(instance);
    std::string instruction;
    if (setting.family_source == FamilySource::Oracle) {
      if (!oracle_labels || oracle_labels->empty())
        throw Error(ErrorCode::MissingOracleLabel, "no oracle family for language '" + instance.language + "'");
      instruction = detail::substitute(templates_.instruction_stage1_oracle, instance.language, oracle_labels->front());
    } else {
      instruction = detail::substitute(templates_.instruction_stage1_inferred, instance.language, "");
    }
    return detail::finish(setting, templates_.system_exemplar,
                          detail::join_sections({instruction, detail::exemplar_section(instance),
                                                 detail::test_section(instance)}));
  }

  /// Deduction prompt embedding the raw stage-1 completion verbatim.
  RenderedPrompt render_stage2(const EvalSetting& setting, const PuzzleInstance& instance,
                               std::string_view generated_exemplars) const {
    if (setting.regime != Regime::Analogical2Stage)
      throw Error(ErrorCode::RegimeMismatch, "stage-2 prompts belong to analogical_2stage; use render_1stage");
    detail::require_exemplars(instance);
    if (unicode::trim(generated_exemplars).empty())
      throw Error(ErrorCode::EmptyGeneration, "stage-1 output for '" + instance.id + "' is blank");
    std::string instruction = detail::substitute(templates_.instruction_stage2_deduce, instance.language, "");
    std::string generated = "Generated Puzzles\n\n" + std::string(generated_exemplars);
    return detail::finish(setting, templates_.system_exemplar,
                          detail::join_sections({instruction, detail::exemplar_section(instance), generated,
                                                 detail::test_section(instance)}));
  }

  RenderedPrompt render_1stage(const EvalSetting& setting, const PuzzleInstance& instance) const {
    if (setting.regime != Regime::Analogical1Stage)
      throw Error(ErrorCode::RegimeMismatch, "render_1stage requires analogical_1stage");
    detail::require_exemplars(instance);
    return with_exemplars(setting, instance, templates_.system_exemplar, templates_.instruction_analogical_1stage);
  }

 private:
  RenderedPrompt with_exemplars(const EvalSetting& setting, const PuzzleInstance& instance,
                                const std::string& system_text, const std::string& instruction) const {
    return detail::finish(setting, system_text,
                          detail::join_sections({instruction, detail::exemplar_section(instance),
                                                 detail::test_section(instance)}));
  }

  TemplateSet templates_;
};

inline RenderedPrompt render_baseline(const EvalSetting& setting, const PuzzleInstance& instance) {
  return PromptRenderer().render_baseline(setting, instance);
}
inline RenderedPrompt render_stage1(const EvalSetting& setting, const PuzzleInstance& instance,
                                    const std::optional<std::vector<std::string>>& oracle_labels = std::nullopt) {
  return PromptRenderer().render_stage1(setting, instance, oracle_labels);
}
inline RenderedPrompt render_stage2(const EvalSetting& setting, const PuzzleInstance& instance,
                                    std::string_view generated_exemplars) {
  return PromptRenderer().render_stage2(setting, instance, generated_exemplars);
}
inline RenderedPrompt render_1stage(const EvalSetting& setting, const PuzzleInstance& instance) {
  return PromptRenderer().render_1stage(setting, instance);
}

}  // namespace lingeval
