// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lingeval/backend.hpp"
#include "lingeval/cache.hpp"
#include "lingeval/corpus.hpp"
#include "lingeval/error.hpp"
#include "lingeval/family_oracle.hpp"
#include "lingeval/prompt.hpp"
#include "lingeval/run_record.hpp"

namespace lingeval {

/// A model reachable through a backend. `id` names it in RunKeys and reports.
struct Participant {
  std::string id;
  std::string model;
  ChatBackend* backend = nullptr;
};

struct PipelineOptions {
  RunCache* cache = nullptr;
  const FamilyOracle* oracle = nullptr;  // defaults to the embedded table
  PromptRenderer renderer;
  int workers = 8;
  std::optional<int64_t> seed;  // forwarded as seed_hint (seed + repetition)
  std::function<void(const RunRecord&, bool from_cache)> on_record;  // once per finished cell, any thread
};

struct PipelineStats {
  uint64_t cache_hits = 0;
  uint64_t stage1_reuses = 0;
  uint64_t failures = 0;
};

/// One cell of a matrix run.
struct Job {
  EvalSetting setting;
  const PuzzleInstance* instance = nullptr;
  std::optional<Participant> generator;
  Participant deducer;
  int repetition = 0;
};

class Pipeline {
 public:
  explicit Pipeline(PipelineOptions options = {}) : options_(std::move(options)) {
    if (!options_.oracle) options_.oracle = &default_family_oracle();
  }

  const PromptRenderer& renderer() const noexcept { return options_.renderer; }

  RunKey key_for(const EvalSetting& setting, const PuzzleInstance& instance,
                 const std::optional<Participant>& generator, const Participant& deducer, int repetition) const {
    return RunKey{instance.id, setting_fingerprint(setting, options_.renderer.templates()),
                  generator ? std::optional<std::string>(generator->id) : std::nullopt, deducer.id, repetition};
  }

  /// Runs one cell. Backend failures are rethrown with the RunKey in the message.
  RunRecord run_instance(const EvalSetting& setting, const PuzzleInstance& instance,
                         const std::optional<Participant>& generator, const Participant& deducer, int repetition) {
    bool from_cache = false;
    return run_instance(setting, instance, generator, deducer, repetition, from_cache);
  }

  RunRecord run_instance(const EvalSetting& setting, const PuzzleInstance& instance,
                         const std::optional<Participant>& generator, const Participant& deducer, int repetition,
                         bool& from_cache) {
    from_cache = false;
    setting.validate();
    const bool two_stage = setting.regime == Regime::Analogical2Stage;
    if (two_stage && !generator)
      throw Error(ErrorCode::RegimeMismatch, "analogical_2stage needs a generator");
    if (!two_stage && generator)
      throw Error(ErrorCode::RegimeMismatch, std::string(to_string(setting.regime)) + " takes no generator");
    if (!deducer.backend || (generator && !generator->backend))
      throw Error(ErrorCode::InvalidArgument, "participant without a backend");

    RunKey key = key_for(setting, instance, generator, deducer, repetition);
    if (options_.cache) {
      if (auto hit = options_.cache->lookup(key)) {
        std::lock_guard lock(stats_mutex_);
        ++stats_.cache_hits;
        from_cache = true;
        return *hit;
      }
    }

    RunRecord record;
    record.key = key;
    record.setting_label = setting.label();
    try {
      RenderedPrompt prompt;
      if (two_stage) {
        Stage1Entry stage1 = generate(setting, instance, *generator, repetition);
        record.stage1_text = stage1.text;
        record.stage1_latency_ms = stage1.latency_ms;
        record.attempts += stage1.attempts;
        record.truncated = stage1.finish_reason == FinishReason::Length;
        prompt = options_.renderer.render_stage2(setting, instance, stage1.text);
      } else if (setting.regime == Regime::Analogical1Stage) {
        prompt = options_.renderer.render_1stage(setting, instance);
      } else {
        prompt = options_.renderer.render_baseline(setting, instance);
      }
      ChatCompletion final = call(deducer, prompt, setting, repetition);
      record.final_text = final.text;
      record.final_latency_ms = final.latency_ms;
      record.attempts += final.attempt_count;
      record.truncated = record.truncated || final.finish_reason == FinishReason::Length;
    } catch (const Error& e) {
      throw Error(e.code(), describe(key) + ": " + e.message());
    }
    score_record(record, instance);
    if (options_.cache) options_.cache->store(record);
    return record;
  }

  /// Cells in deterministic order: setting, generator, deducer, instance (file order), repetition.
  /// Baseline and 1-stage settings iterate deducers only.
  std::vector<Job> plan(const std::vector<EvalSetting>& settings, const Corpus& corpus,
                        const std::vector<Participant>& generators, const std::vector<Participant>& deducers,
                        std::optional<int> repetitions = std::nullopt) const {
    if (settings.empty()) throw Error(ErrorCode::InvalidArgument, "no settings");
    if (deducers.empty()) throw Error(ErrorCode::InvalidArgument, "no deducers");
    if (corpus.size() == 0) throw Error(ErrorCode::EmptyCorpus, "corpus is empty");
    std::vector<Job> jobs;
    for (const EvalSetting& setting : settings) {
      const int reps = repetitions.value_or(setting.repetitions);
      if (reps < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be positive");
      std::vector<std::optional<Participant>> gens;
      if (setting.regime == Regime::Analogical2Stage) {
        if (generators.empty()) throw Error(ErrorCode::InvalidArgument, "analogical_2stage needs generators");
        for (const auto& g : generators) gens.emplace_back(g);
      } else {
        gens.emplace_back(std::nullopt);
      }
      for (const auto& g : gens)
        for (const Participant& d : deducers)
          for (const PuzzleInstance& inst : corpus.instances())
            for (int rep = 0; rep < reps; ++rep) jobs.push_back(Job{setting, &inst, g, d, rep});
    }
    return jobs;
  }

  /// Runs every planned cell on a worker pool. A failing cell yields a record with `error` set;
  /// the rest of the matrix continues.
  std::vector<RunRecord> run_jobs(const std::vector<Job>& jobs) {
    std::vector<RunRecord> out(jobs.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
        const Job& job = jobs[i];
        bool from_cache = false;
        try {
          out[i] = run_instance(job.setting, *job.instance, job.generator, job.deducer, job.repetition, from_cache);
        } catch (const std::exception& e) {
          RunRecord failed;
          failed.key = key_for(job.setting, *job.instance, job.generator, job.deducer, job.repetition);
          failed.setting_label = job.setting.label();
          failed.error = e.what();
          out[i] = std::move(failed);
          std::lock_guard lock(stats_mutex_);
          ++stats_.failures;
        }
        if (options_.on_record) options_.on_record(out[i], from_cache);
      }
    };
    const size_t n_workers = std::clamp<size_t>(static_cast<size_t>(std::max(1, options_.workers)), 1, std::max<size_t>(1, jobs.size()));
    std::vector<std::thread> pool;
    for (size_t t = 1; t < n_workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
  }

  std::vector<RunRecord> run_matrix(const std::vector<EvalSetting>& settings, const Corpus& corpus,
                                    const std::vector<Participant>& generators,
                                    const std::vector<Participant>& deducers,
                                    std::optional<int> repetitions = std::nullopt) {
    return run_jobs(plan(settings, corpus, generators, deducers, repetitions));
  }

  RenderedPrompt stage1_prompt(const EvalSetting& setting, const PuzzleInstance& instance) const {
    std::optional<std::vector<std::string>> labels;
    if (setting.family_source == FamilySource::Oracle) labels = oracle_family(instance.language, *options_.oracle);
    return options_.renderer.render_stage1(setting, instance, labels);
  }

  /// Cache key of the generator output a 2-stage job consumes.
  std::string stage1_key_for(const Job& job) const {
    if (job.setting.regime != Regime::Analogical2Stage || !job.generator)
      throw Error(ErrorCode::RegimeMismatch, "only analogical_2stage jobs have a stage-1 output");
    return stage1_key(job.instance->id, stage1_prompt(job.setting, *job.instance).setting_fingerprint,
                      job.generator->id, job.repetition);
  }

  PipelineStats stats() const {
    std::lock_guard lock(stats_mutex_);
    return stats_;
  }

 private:
  static std::string describe(const RunKey& key) {
    return "[" + key.instance_id + " gen=" + key.generator_id.value_or("-") + " ded=" + key.deducer_id +
           " rep=" + std::to_string(key.repetition) + "]";
  }

  ChatCompletion call(const Participant& who, const RenderedPrompt& prompt, const EvalSetting& setting,
                      int repetition) const {
    ChatRequest request{who.model, prompt.system_text, prompt.user_text, setting.temperature, setting.max_tokens,
                        options_.seed ? std::optional<int64_t>(*options_.seed + repetition) : std::nullopt};
    ChatCompletion completion = who.backend->complete(request);
    if (completion.finish_reason == FinishReason::Error)
      throw Error(ErrorCode::ProtocolError, who.id + " reported finish_reason=error");
    return completion;
  }

  // Stage-1 output is shared by every deducer in the matrix; concurrent requests for the same
  // key wait on one generation.
  Stage1Entry generate(const EvalSetting& setting, const PuzzleInstance& instance, const Participant& generator,
                       int repetition) {
    RenderedPrompt prompt = stage1_prompt(setting, instance);
    std::string key = stage1_key(instance.id, prompt.setting_fingerprint, generator.id, repetition);

    std::promise<Stage1Entry> promise;
    std::shared_future<Stage1Entry> future;
    bool owner = false;
    {
      std::lock_guard lock(stage1_mutex_);
      auto it = stage1_inflight_.find(key);
      if (it == stage1_inflight_.end()) {
        future = promise.get_future().share();
        stage1_inflight_.emplace(key, future);
        owner = true;
      } else {
        future = it->second;
      }
    }
    if (!owner) {
      std::lock_guard lock(stats_mutex_);
      ++stats_.stage1_reuses;
      return future.get();
    }
    try {
      std::optional<Stage1Entry> entry;
      if (options_.cache) entry = options_.cache->lookup_stage1(key);
      if (!entry) {
        ChatCompletion completion = call(generator, prompt, setting, repetition);
        entry = Stage1Entry{key, completion.text, completion.finish_reason, completion.latency_ms,
                            completion.attempt_count};
        if (options_.cache && !unicode::trim(entry->text).empty()) options_.cache->store_stage1(*entry);
      }
      promise.set_value(*entry);
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
    return future.get();
  }

  PipelineOptions options_;
  mutable std::mutex stats_mutex_;
  PipelineStats stats_;
  std::mutex stage1_mutex_;
  std::map<std::string, std::shared_future<Stage1Entry>> stage1_inflight_;
};

}  // namespace lingeval
