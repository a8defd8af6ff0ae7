// Copyright 2026 The deskml Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deskml/common/json.hpp"
#include "deskml/data/table.hpp"
#include "deskml/eval/green.hpp"
#include "deskml/eval/metrics.hpp"
#include "deskml/features/pipeline.hpp"
#include "deskml/models/model.hpp"
#include "deskml/trial/config.hpp"
#include "deskml/trial/evolution.hpp"
#include "deskml/trial/genome.hpp"

namespace deskml::trial {

enum class TrialStatus { kPending, kRunning, kCancelled, kFailed, kCompleted };
std::string_view status_name(TrialStatus s) noexcept;
TrialStatus status_from_name(std::string_view s);
bool is_terminal(TrialStatus s) noexcept;

/// Target column resolved for a trial: class labels (sorted distinct cells,
/// numerically for numeric columns) and one value per table row (class code or
/// real, NaN when the target is missing).
struct PreparedTarget {
  models::Task task = models::Task::kClassification;
  std::vector<std::string> labels;
  std::vector<double> values;
};

/// Errors: kUnprocessable "UNUSABLE_TARGET" when fewer than two rows have a
/// target, or a classification target has a single class.
PreparedTarget prepare_target(const data::Table& table, const std::string& target, models::Task task);

struct SplitRows {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Rows with a present target, split by the configured ratios. Classification
/// splits are stratified (per class, round(n_c * ratio)); regression rows are
/// shuffled first; forecasting splits are chronological on the datetime index.
/// Train and validation rows are ascending; forecasting rows are in time order.
/// Depends only on the target, the datetime index and the seed.
/// Errors: kUnprocessable "SPLIT_TOO_SMALL" when a split would be empty.
SplitRows make_splits(const data::Table& table, const PreparedTarget& target, const TrialConfig& config);

/// One evaluated genome.
struct CandidateRecord {
  std::string id;  // genome_id
  std::uint64_t hash = 0;
  Genome genome;
  std::size_t generation = 0;  // generation of first evaluation
  bool ok = false;
  std::string error;
  Objectives objectives;    // failed candidates get DBL_MAX everywhere
  Json metrics;             // validation metrics document (null when failed)
  double fit_seconds = 0.0;
  std::size_t feature_count = 0;
};

Json to_json(const CandidateRecord& r);
CandidateRecord candidate_record_from_json(const Json& j);

struct GenerationSnapshot {
  std::size_t generation = 0;
  std::vector<std::string> population;  // candidate ids in population order
  std::vector<Standing> standings;
  std::vector<std::string> front;       // non-dominated evaluated candidates so far
  std::size_t evaluations = 0;          // cumulative distinct evaluations
  double best_primary = 0.0;            // lowest first objective so far
};

struct FrontMember {
  CandidateRecord candidate;
  std::map<eval::Split, eval::EvalReport> reports;
};

struct TrialResult {
  std::string id;
  TrialConfig config;
  models::Task task = models::Task::kClassification;
  std::vector<std::string> labels;
  TrialStatus status = TrialStatus::kPending;
  std::string error;
  std::size_t train_rows = 0;
  std::size_t validation_rows = 0;
  std::size_t test_rows = 0;
  std::vector<GenerationSnapshot> generations;
  std::vector<FrontMember> front;  // ascending objective vector, then hash
  std::optional<std::string> best;  // candidate id
  std::size_t evaluations = 0;
  std::size_t cache_hits = 0;
  std::size_t failures = 0;
  double wall_seconds = 0.0;
  double compute_seconds = 0.0;  // summed fit seconds of all evaluations
  eval::EnergyEstimate green;
};

Json to_json(const TrialResult& r);
/// Front documents only: candidate, objectives by name and per-split reports.
Json front_json(const TrialResult& r);

/// Fitted artifacts of one front member, for registration as a model.
struct FrontArtifact {
  std::string candidate_id;
  std::optional<features::FittedPipeline> pipeline;  // absent for forecasters
  models::TrainedModel model;
};

enum class EventKind { kStarted, kCandidateDone, kGenerationDone, kCancelled, kCompleted, kFailed };
std::string_view event_kind_name(EventKind k) noexcept;

struct TrialEvent {
  EventKind kind = EventKind::kStarted;
  Json payload = Json::object();
};

/// State at a generation boundary; enough to continue the search exactly.
struct Checkpoint {
  std::size_t next_generation = 0;
  std::vector<std::string> population;
  std::vector<CandidateRecord> archive;  // every evaluation, in evaluation order
  std::vector<GenerationSnapshot> generations;
  std::size_t cache_hits = 0;
};

Json to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const Json& j);

struct RunOptions {
  std::string trial_id;
  eval::PowerConfig power;
  std::function<void(const TrialEvent&)> on_event;
  /// Polled between candidate evaluations.
  std::function<bool()> cancel_requested;
  std::function<void(const Checkpoint&)> on_checkpoint;
  std::optional<Checkpoint> resume;
};

struct TrialOutcome {
  TrialResult result;
  std::vector<FrontArtifact> artifacts;  // parallel to result.front
};

/// Runs the evolutionary search. Validation errors on the config, target or
/// splits are thrown before the trial starts; failures during the search end
/// in status kFailed.
TrialOutcome run_trial(const TrialConfig& config, const data::Table& table, const RunOptions& options = {});

/// Front member minimising the first objective, ties broken by the following
/// objectives, then the lowest genome hash.
std::size_t select_best(std::span<const Objectives> objectives, std::span<const std::uint64_t> hashes);

}  // namespace deskml::trial
