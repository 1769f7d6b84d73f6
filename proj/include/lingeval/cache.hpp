// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include <json.hpp>

#include "lingeval/backend.hpp"
#include "lingeval/error.hpp"
#include "lingeval/hash.hpp"
#include "lingeval/run_record.hpp"

namespace lingeval {

/// Cached generator output, shared by every deducer that consumes it.
struct Stage1Entry {
  std::string key_hash;
  std::string text;
  FinishReason finish_reason = FinishReason::Stop;
  int64_t latency_ms = 0;
  int attempts = 1;
};

/// Stage-1 outputs are keyed by instance, stage-1 prompt fingerprint, generator and repetition.
inline std::string stage1_key(std::string_view instance_id, std::string_view prompt_fingerprint,
                              std::string_view generator_id, int repetition) {
  return Sha256()
      .field("stage1")
      .field(instance_id)
      .field(prompt_fingerprint)
      .field(generator_id)
      .field(std::to_string(repetition))
      .hex();
}

/// Writes `contents` to `path` via a sibling temp file and rename, so readers never observe a
/// partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  static std::atomic<uint64_t> counter{0};
  std::filesystem::create_directories(path.parent_path());
  std::ostringstream tmp_name;
  tmp_name << ".tmp-" << path.filename().string() << "-" << std::hash<std::thread::id>{}(std::this_thread::get_id())
           << "-" << counter.fetch_add(1);
  std::filesystem::path tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// Content-addressed store: <root>/<sha256(RunKey)>.json for records, <root>/stage1/<key>.json
/// for generator outputs. Unreadable entries move to <root>/quarantine and count as misses.
class RunCache {
 public:
  explicit RunCache(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
  }

  const std::filesystem::path& root() const noexcept { return root_; }

  std::filesystem::path record_path(const RunKey& key) const { return root_ / (key.hash() + ".json"); }
  std::filesystem::path stage1_path(const std::string& key_hash) const {
    return root_ / "stage1" / (key_hash + ".json");
  }

  std::optional<RunRecord> lookup(const RunKey& key) {
    auto path = record_path(key);
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
      RunRecord record = run_record_from_json(nlohmann::json::parse(read_file(path)));
      if (record.key != key || !record.ok()) throw Error(ErrorCode::CorruptCacheEntry, "key mismatch");
      return record;
    } catch (const std::exception&) {
      quarantine(path);
      return std::nullopt;
    }
  }

  void store(const RunRecord& record) {
    if (!record.ok()) return;
    std::lock_guard lock(write_mutex_);
    write_file_atomic(record_path(record.key), serialize_run_record(record) + "\n");
  }

  std::optional<Stage1Entry> lookup_stage1(const std::string& key_hash) {
    auto path = stage1_path(key_hash);
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
      auto j = nlohmann::json::parse(read_file(path));
      Stage1Entry entry;
      entry.key_hash = j.at("key").get<std::string>();
      entry.text = j.at("text").get<std::string>();
      auto reason = parse_finish_reason(j.at("finish_reason").get<std::string>());
      if (!reason || entry.key_hash != key_hash) throw Error(ErrorCode::CorruptCacheEntry, "bad stage-1 entry");
      entry.finish_reason = *reason;
      entry.latency_ms = j.at("latency_ms").get<int64_t>();
      entry.attempts = j.at("attempts").get<int>();
      return entry;
    } catch (const std::exception&) {
      quarantine(path);
      return std::nullopt;
    }
  }

  void store_stage1(const Stage1Entry& entry) {
    ordered_json j{{"key", entry.key_hash},
                   {"text", entry.text},
                   {"finish_reason", to_string(entry.finish_reason)},
                   {"latency_ms", entry.latency_ms},
                   {"attempts", entry.attempts}};
    std::lock_guard lock(write_mutex_);
    write_file_atomic(stage1_path(entry.key_hash), j.dump(-1, ' ', false) + "\n");
  }

  size_t quarantined() const noexcept { return quarantined_.load(); }

  struct VerifyReport {
    size_t records = 0;
    size_t stage1 = 0;
    size_t corrupt = 0;
  };

  /// Parses every entry; corrupt ones are quarantined.
  VerifyReport verify() {
    VerifyReport report;
    for (const auto& path : entries(root_)) {
      try {
        RunRecord record = run_record_from_json(nlohmann::json::parse(read_file(path)));
        if (record.key.hash() + ".json" != path.filename().string())
          throw Error(ErrorCode::CorruptCacheEntry, "filename does not match key");
        ++report.records;
      } catch (const std::exception&) {
        quarantine(path);
        ++report.corrupt;
      }
    }
    for (const auto& path : entries(root_ / "stage1")) {
      std::string stem = path.stem().string();
      if (lookup_stage1(stem)) ++report.stage1;
      else ++report.corrupt;
    }
    return report;
  }

  /// Removes leftover temp files, the quarantine, and record entries whose hash is not in
  /// `keep`. Stage-1 entries are kept iff `keep_stage1` holds them. Returns files removed.
  size_t gc(const std::set<std::string>& keep, const std::set<std::string>& keep_stage1) {
    size_t removed = 0;
    auto sweep = [&](const std::filesystem::path& dir, const std::set<std::string>& keep_set) {
      if (!std::filesystem::exists(dir)) return;
      for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        bool temp = name.rfind(".tmp-", 0) == 0;
        if (temp || (entry.path().extension() == ".json" && !keep_set.contains(entry.path().stem().string()))) {
          std::filesystem::remove(entry.path());
          ++removed;
        }
      }
    };
    sweep(root_, keep);
    sweep(root_ / "stage1", keep_stage1);
    if (std::filesystem::exists(root_ / "quarantine")) removed += std::filesystem::remove_all(root_ / "quarantine");
    return removed;
  }

 private:
  static std::vector<std::filesystem::path> entries(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    if (!std::filesystem::exists(dir)) return out;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
  }

  void quarantine(const std::filesystem::path& path) {
    std::lock_guard lock(write_mutex_);
    std::error_code ec;
    std::filesystem::create_directories(root_ / "quarantine", ec);
    std::filesystem::rename(path, root_ / "quarantine" / path.filename(), ec);
    if (ec) std::filesystem::remove(path, ec);
    ++quarantined_;
  }

  std::filesystem::path root_;
  std::mutex write_mutex_;
  std::atomic<size_t> quarantined_{0};
};

}  // namespace lingeval
