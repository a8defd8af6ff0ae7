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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "deskml/common/json.hpp"
#include "deskml/data/dataset.hpp"
#include "deskml/data/store.hpp"
#include "deskml/features/pipeline.hpp"
#include "deskml/models/model.hpp"
#include "deskml/service/config.hpp"
#include "deskml/trial/runner.hpp"

namespace deskml::service {

/// The studio behind the HTTP API and the embedded CLI: datasets, the trial
/// scheduler, trained models, code generation and deployments. Every method
/// returns the API document for its resource and throws deskml::Error with
/// the API error code on rejection.
///
/// Layout under data_dir:
///   datasets/<id>/...                      immutable dataset snapshots
///   trials/<id>/trial.json                 request and resolved config
///   trials/<id>/events.jsonl               append-only event log
///   trials/<id>/checkpoint.json            latest generation checkpoint
///   trials/<id>/models/<candidate>/...     fitted front members
///   trials/<id>/result.json, front.json    written once the trial is terminal
///   deployments/<id>.json
///
/// Unfinished trials found at start-up resume from their last checkpoint (or
/// from scratch when none was written).
class Studio {
 public:
  explicit Studio(ServiceConfig config);
  /// Stops the scheduler. Running trials are interrupted without recording a
  /// terminal state, so they resume on the next start.
  ~Studio();
  Studio(const Studio&) = delete;
  Studio& operator=(const Studio&) = delete;

  const ServiceConfig& config() const noexcept { return config_; }

  // Datasets
  Json upload_dataset(std::string_view payload, data::Format format, std::string name);
  Json list_datasets() const;
  Json dataset(const std::string& id) const;
  Json dataset_profile(const std::string& id) const;
  Json dataset_correlations(const std::string& id) const;
  Json dataset_rows(const std::string& id, long offset, long limit) const;

  // Trials
  /// Validates and enqueues. Errors: OBJECTIVE_LIMIT and the other config
  /// codes, DATASET_NOT_FOUND, QUEUE_FULL (kResourceExhausted).
  Json create_trial(const Json& body);
  Json list_trials() const;
  Json trial(const std::string& id) const;
  /// Events with sequence number > after.
  Json trial_events(const std::string& id, long long after) const;
  /// Errors: kConflict "TRIAL_TERMINAL" when already finished.
  Json cancel_trial(const std::string& id);
  /// Errors: kConflict "TRIAL_NOT_FINISHED" before a terminal status.
  Json trial_front(const std::string& id) const;
  /// Blocks until terminal or timeout; returns the trial document.
  Json wait_trial(const std::string& id, std::chrono::milliseconds timeout) const;

  // Models
  Json model(const std::string& id) const;
  Json model_report(const std::string& id, const std::string& split) const;
  Json model_code(const std::string& id, const std::string& dialect, bool with_benchmark = false) const;

  // Deployments
  /// Errors: kConflict "MODEL_NOT_DEPLOYABLE" unless the trial completed.
  Json deploy(const std::string& model_id);
  Json list_deployments() const;
  Json deployment(const std::string& id) const;
  /// Errors: kConflict "DEPLOYMENT_RETIRED" when already retired.
  Json retire(const std::string& id);
  /// Body: {"rows": [{column: value, ...}, ...]} or {"row": {...}};
  /// forecasting models take {"horizon": n}.
  /// Errors: kGone "DEPLOYMENT_RETIRED", kInvalidArgument "INVALID_PREDICT_REQUEST".
  Json predict(const std::string& deployment_id, const Json& body);

 private:
  struct TrialState;
  struct ModelEntry;
  struct DeploymentState;

  std::shared_ptr<TrialState> find_trial(const std::string& id) const;
  std::shared_ptr<const ModelEntry> find_model(const std::string& id) const;
  std::shared_ptr<DeploymentState> find_deployment(const std::string& id) const;

  void load();
  void load_trial(const std::filesystem::path& dir);
  void register_models(const TrialState& t, const Json& front,
                       std::vector<trial::FrontArtifact> artifacts);
  void worker_loop(std::stop_token stop);
  void run(const std::shared_ptr<TrialState>& t);
  void record_event(TrialState& t, const trial::TrialEvent& e);
  Json trial_doc(const TrialState& t) const;
  Json deployment_doc(const DeploymentState& d) const;
  void persist_deployment(const DeploymentState& d) const;

  std::filesystem::path trial_dir(const std::string& id) const;

  ServiceConfig config_;
  data::DatasetStore datasets_;

  mutable std::mutex mu_;  // guards the maps and id counters
  std::map<std::string, std::shared_ptr<TrialState>> trials_;
  std::map<std::string, std::shared_ptr<const ModelEntry>> models_;
  std::map<std::string, std::shared_ptr<DeploymentState>> deployments_;
  std::size_t next_trial_ = 1;
  std::size_t next_deployment_ = 1;

  std::mutex queue_mu_;
  std::condition_variable_any queue_cv_;
  std::deque<std::string> queue_;
  std::atomic<bool> stopping_{false};
  std::vector<std::jthread> workers_;
};

}  // namespace deskml::service
