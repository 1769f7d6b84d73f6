// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lingeval/corpus.hpp"
#include "lingeval/error.hpp"
#include "lingeval/unicode.hpp"

namespace lingeval {

/// Map key for a language name: NFC, trimmed, internal whitespace collapsed, lowercased, and a
/// trailing sub-problem number ("Mapudungan 3") removed.
inline std::string normalize_language_name(std::string_view name) {
  std::vector<std::string> tokens = unicode::split_whitespace(unicode::to_lower(unicode::nfc(name)));
  auto all_digits = [](const std::string& s) {
    return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
  };
  if (tokens.size() > 1 && all_digits(tokens.back())) tokens.pop_back();
  std::string key;
  for (const auto& token : tokens) {
    if (!key.empty()) key += ' ';
    key += token;
  }
  return key;
}

/// Curated language -> accepted family labels table.
class FamilyOracle {
 public:
  FamilyOracle() = default;

  void add(std::string_view language, std::vector<std::string> labels) {
    std::string key = normalize_language_name(language);
    names_.emplace(key, std::string(language));
    labels_[key] = std::move(labels);
  }

  /// All accepted labels, or an empty list when the language is unknown.
  std::vector<std::string> lookup(std::string_view language) const {
    auto it = labels_.find(normalize_language_name(language));
    return it == labels_.end() ? std::vector<std::string>{} : it->second;
  }

  bool contains(std::string_view language) const { return labels_.contains(normalize_language_name(language)); }
  size_t size() const noexcept { return labels_.size(); }

  /// (display name, labels) in key order.
  std::vector<std::pair<std::string, std::vector<std::string>>> entries() const {
    std::vector<std::pair<std::string, std::vector<std::string>>> out;
    for (const auto& [key, labels] : labels_) out.emplace_back(names_.at(key), labels);
    return out;
  }

  static FamilyOracle from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::MalformedRecord, "family oracle must be a JSON object");
    FamilyOracle oracle;
    for (const auto& [language, labels] : doc.items()) {
      if (!labels.is_array() || labels.empty())
        throw Error(ErrorCode::MalformedRecord, "family oracle entry '" + language + "' must be a non-empty array");
      std::vector<std::string> parsed;
      for (const auto& label : labels) {
        if (!label.is_string())
          throw Error(ErrorCode::MalformedRecord, "family oracle entry '" + language + "' has a non-string label");
        parsed.push_back(label.get<std::string>());
      }
      oracle.add(language, std::move(parsed));
    }
    return oracle;
  }

  static FamilyOracle load(const std::filesystem::path& path) {
    try {
      return from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedRecord, path.string() + ": " + e.what());
    }
  }

 private:
  std::map<std::string, std::vector<std::string>> labels_;
  std::map<std::string, std::string> names_;
};

/// Oracle families for the modeLing languages. Entries written "A / B" in the source table
/// accept either label; the first is what an oracle-family prompt receives.
inline const FamilyOracle& default_family_oracle() {
  static const FamilyOracle oracle = [] {
    FamilyOracle o;
    o.add("Abun", {"West Papuan"});
    o.add("Ainu", {"Ainu", "Language Isolate"});
    o.add("Ayutla Mixe", {"Mixe-Zoque"});
    o.add("Bangime", {"Language Isolate"});
    o.add("Chimalapa Zoque", {"Mixe-Zoque"});
    o.add("Dogon", {"Niger-Congo"});
    o.add("Engenni", {"Niger-Congo"});
    o.add("Guugu Yimithirr", {"Pama-Nyungan"});
    o.add("Guugu Yimithir", {"Pama-Nyungan"});
    o.add("Kalam", {"Kalam"});
    o.add("Komi-Ziran", {"Uralic"});
    o.add("Kutenai", {"Language Isolate"});
    o.add("Mapudungan", {"Araucanian"});
    o.add("Misantla Totonac", {"Totonacan"});
    o.add("Mixtepec Zapotec", {"Oto-Manguean"});
    o.add("Ngadha", {"Austronesian Malayo-Polynesian"});
    o.add("Niuean", {"Malayo-Polynesian"});
    o.add("Rapa Nui", {"Austronesian Malayo-Polynesian"});
    o.add("Seri", {"Hokan", "Language Isolate"});
    o.add("Totonac", {"Totonacan"});
    return o;
  }();
  return oracle;
}

inline std::vector<std::string> oracle_family(std::string_view language, const FamilyOracle& oracle) {
  return oracle.lookup(language);
}

}  // namespace lingeval
