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

#include "deskml/service/studio.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "deskml/codegen/emit.hpp"
#include "deskml/codegen/native.hpp"
#include "deskml/codegen/passes.hpp"
#include "deskml/common/error.hpp"
#include "deskml/common/files.hpp"
#include "deskml/common/strings.hpp"
#include "deskml/data/correlation.hpp"
#include "deskml/data/preview.hpp"
#include "deskml/data/profile.hpp"
#include "deskml/eval/green.hpp"
#include "deskml/models/family.hpp"

namespace deskml::service {

namespace fs = std::filesystem;

struct Studio::TrialState {
  std::string id;
  std::string created_at;
  trial::TrialConfig config;
  Json request;

  mutable std::mutex mu;
  mutable std::condition_variable done_cv;
  trial::TrialStatus status = trial::TrialStatus::kPending;
  std::vector<Json> events;
  long long next_seq = 1;
  std::size_t generations_done = 0;
  std::size_t evaluations = 0;
  std::optional<Json> result;  // terminal result document
  std::optional<Json> front;   // terminal front document
  std::optional<trial::Checkpoint> resume;
  std::optional<Json> held_terminal;  // terminal event, appended after the result is stored
  std::atomic<bool> cancel{false};
};

struct Studio::ModelEntry {
  std::string id;
  std::string trial_id;
  std::string candidate_id;
  Json member;  // front member document
  bool is_best = false;
  bool deployable = false;
  std::optional<features::FittedPipeline> pipeline;
  models::TrainedModel model;
  std::vector<std::string> labels;
};

struct Studio::DeploymentState {
  std::string id;
  std::string model_id;
  std::string created_at;
  mutable std::mutex mu;
  bool active = true;
  std::string retired_at;
  std::uint64_t predictions = 0;
  std::uint64_t requests = 0;
  double compute_seconds = 0.0;
  double electricity_kwh = 0.0;
  double carbon_kg = 0.0;
};

namespace {

std::string sequence_id(const char* prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%06zu", prefix, n);
  return buf;
}

std::size_t sequence_number(const std::string& id) {
  const auto dash = id.rfind('-');
  if (dash == std::string::npos) return 0;
  const auto n = parse_number(id.substr(dash + 1));
  return n ? static_cast<std::size_t>(*n) : 0;
}

std::string model_id_of(const std::string& trial_id, const std::string& candidate_id) {
  return trial_id + "." + candidate_id;
}

/// Reads a JSON-lines file, ignoring a torn trailing line.
std::vector<Json> read_lines(const fs::path& path) {
  std::vector<Json> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::exception&) {
      break;
    }
  }
  return out;
}

std::string cell_of(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number()) return format_number(v.get<double>());
  fail(ErrorKind::kInvalidArgument, "INVALID_PREDICT_REQUEST", "cell values must be strings, numbers, booleans or null");
}

}  // namespace

// ---------------------------------------------------------------------------
// Lifecycle

Studio::Studio(ServiceConfig config) : config_(std::move(config)), datasets_(config_.data_dir / "datasets") {
  fs::create_directories(config_.data_dir / "trials");
  fs::create_directories(config_.data_dir / "deployments");
  load();
  for (std::size_t i = 0; i < config_.max_running; ++i) {
    workers_.emplace_back([this](std::stop_token st) { worker_loop(st); });
  }
}

Studio::~Studio() {
  stopping_ = true;
  for (auto& w : workers_) w.request_stop();
  queue_cv_.notify_all();
  workers_.clear();
}

fs::path Studio::trial_dir(const std::string& id) const { return config_.data_dir / "trials" / id; }

void Studio::load() {
  datasets_.load_all();
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(config_.data_dir / "trials")) {
    if (e.is_directory() && fs::exists(e.path() / "trial.json")) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) load_trial(d);

  std::vector<fs::path> deps;
  for (const auto& e : fs::directory_iterator(config_.data_dir / "deployments")) {
    if (e.path().extension() == ".json") deps.push_back(e.path());
  }
  std::sort(deps.begin(), deps.end());
  for (const auto& p : deps) {
    const auto j = Json::parse(read_file(p));
    auto d = std::make_shared<DeploymentState>();
    d->id = j.at("id").get<std::string>();
    d->model_id = j.at("model_id").get<std::string>();
    d->created_at = j.at("created_at").get<std::string>();
    d->active = j.at("status") == "active";
    d->retired_at = j.value("retired_at", Json(nullptr)).is_string() ? j.at("retired_at").get<std::string>() : "";
    d->predictions = j.at("predictions").get<std::uint64_t>();
    d->requests = j.at("requests").get<std::uint64_t>();
    const auto& g = j.at("green");
    d->compute_seconds = g.at("compute_seconds").get<double>();
    d->electricity_kwh = g.at("electricity_kwh").get<double>();
    d->carbon_kg = g.at("carbon_kg").get<double>();
    next_deployment_ = std::max(next_deployment_, sequence_number(d->id) + 1);
    deployments_[d->id] = std::move(d);
  }
}

void Studio::load_trial(const fs::path& dir) {
  const auto doc = Json::parse(read_file(dir / "trial.json"));
  auto t = std::make_shared<TrialState>();
  t->id = doc.at("id").get<std::string>();
  t->created_at = doc.at("created_at").get<std::string>();
  t->request = doc.at("request");
  t->config = trial::trial_config_from_json(doc.at("config"));
  next_trial_ = std::max(next_trial_, sequence_number(t->id) + 1);

  auto events = read_lines(dir / "events.jsonl");
  for (const auto& e : events) t->next_seq = std::max(t->next_seq, e.at("seq").get<long long>() + 1);

  if (fs::exists(dir / "result.json")) {
    t->result = Json::parse(read_file(dir / "result.json"));
    t->status = trial::status_from_name(t->result->at("status").get<std::string>());
    if (fs::exists(dir / "front.json")) t->front = Json::parse(read_file(dir / "front.json"));
    t->events = std::move(events);
    t->generations_done = t->result->at("generations").size();
    t->evaluations = t->result->at("evaluations").get<std::size_t>();
    if (t->front) {
      std::vector<trial::FrontArtifact> artifacts;
      for (const auto& m : t->front->at("members")) {
        const auto cid = m.at("id").get<std::string>();
        const auto mdir = dir / "models" / cid;
        trial::FrontArtifact a;
        a.candidate_id = cid;
        a.model = models::trained_model_from_json(Json::parse(read_file(mdir / "model.json")));
        if (fs::exists(mdir / "pipeline.json")) {
          a.pipeline = features::fitted_pipeline_from_json(Json::parse(read_file(mdir / "pipeline.json")));
        }
        artifacts.push_back(std::move(a));
      }
      register_models(*t, *t->front, std::move(artifacts));
    }
    std::lock_guard lock(mu_);
    trials_[t->id] = std::move(t);
    return;
  }

  // Unfinished: keep the log up to the checkpointed generation and resume.
  std::optional<trial::Checkpoint> cp;
  if (fs::exists(dir / "checkpoint.json")) cp = trial::checkpoint_from_json(Json::parse(read_file(dir / "checkpoint.json")));
  std::vector<Json> kept;
  if (cp) {
    const long long last_gen = static_cast<long long>(cp->next_generation) - 1;
    long long cut = 0;
    for (const auto& e : events) {
      if (e.at("kind") == "generation_done" && e.at("payload").at("generation").get<long long>() == last_gen) {
        cut = e.at("seq").get<long long>();
      }
    }
    for (const auto& e : events) {
      if (e.at("seq").get<long long>() <= cut) kept.push_back(e);
    }
    t->generations_done = cp->generations.size();
    t->evaluations = cp->archive.size();
    t->resume = std::move(cp);
  }
  std::string lines;
  for (const auto& e : kept) lines += e.dump() + "\n";
  write_file_atomic(dir / "events.jsonl", lines);
  t->events = std::move(kept);
  t->status = trial::TrialStatus::kPending;
  const auto id = t->id;
  {
    std::lock_guard lock(mu_);
    trials_[id] = std::move(t);
  }
  std::lock_guard lock(queue_mu_);
  queue_.push_back(id);
}

// ---------------------------------------------------------------------------
// Datasets

Json Studio::upload_dataset(std::string_view payload, data::Format format, std::string name) {
  if (payload.size() > config_.max_upload_bytes) {
    fail(ErrorKind::kPayloadTooLarge, "PAYLOAD_TOO_LARGE",
         "upload of " + std::to_string(payload.size()) + " bytes exceeds the limit of " +
             std::to_string(config_.max_upload_bytes));
  }
  auto ds = datasets_.add(data::ingest(payload, format, std::move(name)));
  return data::dataset_meta_json(*ds);
}

Json Studio::list_datasets() const {
  Json items = Json::array();
  for (const auto& ds : datasets_.list()) items.push_back(data::dataset_meta_json(*ds));
  return {{"datasets", items}};
}

Json Studio::dataset(const std::string& id) const { return data::dataset_meta_json(*datasets_.get(id)); }

Json Studio::dataset_profile(const std::string& id) const {
  const auto ds = datasets_.get(id);
  return {{"dataset_id", id}, {"row_count", ds->row_count()}, {"columns", data::profiles_json(data::profile(ds->table))}};
}

Json Studio::dataset_correlations(const std::string& id) const {
  const auto ds = datasets_.get(id);
  Json j = data::correlations(ds->table).to_json();
  j["dataset_id"] = id;
  return j;
}

Json Studio::dataset_rows(const std::string& id, long offset, long limit) const {
  const auto ds = datasets_.get(id);
  Json j = data::preview(ds->table, offset, limit);
  j["dataset_id"] = id;
  return j;
}

// ---------------------------------------------------------------------------
// Trials

std::shared_ptr<Studio::TrialState> Studio::find_trial(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = trials_.find(id);
  if (it == trials_.end()) fail(ErrorKind::kNotFound, "TRIAL_NOT_FOUND", "no trial '" + id + "'");
  return it->second;
}

Json Studio::create_trial(const Json& body) {
  if (!body.is_object()) fail(ErrorKind::kInvalidArgument, "INVALID_CONFIG", "trial request must be a JSON object");
  auto config = trial::trial_config_from_json(body);
  const auto ds = datasets_.get(config.dataset_id);
  config.task = trial::infer_task(ds->table, config.target, config.datetime_index, config.task);
  if (config.workers == 0) config.workers = config_.trial_workers;
  // Surfaces unusable targets and undersized splits before queueing.
  (void)trial::make_splits(ds->table, trial::prepare_target(ds->table, config.target, *config.task), config);
  trial::validate(config);

  auto t = std::make_shared<TrialState>();
  t->created_at = utc_timestamp();
  t->request = body;
  t->config = config;
  {
    std::lock_guard qlock(queue_mu_);
    if (queue_.size() >= config_.max_queue) {
      fail(ErrorKind::kResourceExhausted, "QUEUE_FULL",
           std::to_string(queue_.size()) + " trials are already waiting; retry later");
    }
    {
      std::lock_guard lock(mu_);
      t->id = sequence_id("tr", next_trial_++);
      fs::create_directories(trial_dir(t->id));
      write_file_atomic(trial_dir(t->id) / "trial.json",
                        Json{{"id", t->id}, {"created_at", t->created_at}, {"request", body},
                             {"config", trial::to_json(config)}}
                                .dump(2));
      write_file_atomic(trial_dir(t->id) / "events.jsonl", "");
      trials_[t->id] = t;
    }
    queue_.push_back(t->id);
  }
  queue_cv_.notify_one();
  std::lock_guard lock(t->mu);
  return trial_doc(*t);
}

Json Studio::trial_doc(const TrialState& t) const {
  Json doc{{"id", t.id},
           {"status", trial::status_name(t.status)},
           {"created_at", t.created_at},
           {"dataset_id", t.config.dataset_id},
           {"target", t.config.target},
           {"config", trial::to_json(t.config)},
           {"progress",
            {{"generations", t.generations_done},
             {"evaluations", t.evaluations},
             {"events", t.events.size()},
             {"last_seq", t.events.empty() ? 0 : t.events.back().at("seq").get<long long>()}}},
           {"result", t.result ? *t.result : Json(nullptr)}};
  if (t.result) {
    doc["error"] = t.result->at("error");
    doc["best"] = t.result->at("best");
    doc["best_model_id"] = t.result->at("best").is_string()
                               ? Json(model_id_of(t.id, t.result->at("best").get<std::string>()))
                               : Json(nullptr);
  } else {
    doc["error"] = nullptr;
    doc["best"] = nullptr;
    doc["best_model_id"] = nullptr;
  }
  return doc;
}

Json Studio::list_trials() const {
  std::vector<std::shared_ptr<TrialState>> all;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, t] : trials_) all.push_back(t);
  }
  Json items = Json::array();
  for (const auto& t : all) {
    std::lock_guard lock(t->mu);
    Json d = trial_doc(*t);
    d.erase("result");
    items.push_back(std::move(d));
  }
  return {{"trials", items}};
}

Json Studio::trial(const std::string& id) const {
  const auto t = find_trial(id);
  std::lock_guard lock(t->mu);
  return trial_doc(*t);
}

Json Studio::trial_events(const std::string& id, long long after) const {
  const auto t = find_trial(id);
  std::lock_guard lock(t->mu);
  Json items = Json::array();
  for (const auto& e : t->events) {
    if (e.at("seq").get<long long>() > after) items.push_back(e);
  }
  const long long last = t->events.empty() ? after : std::max(after, t->events.back().at("seq").get<long long>());
  return {{"trial_id", id},
          {"status", trial::status_name(t->status)},
          {"terminal", trial::is_terminal(t->status)},
          {"events", items},
          {"next_after", last}};
}

Json Studio::cancel_trial(const std::string& id) {
  const auto t = find_trial(id);
  bool was_pending = false;
  {
    std::lock_guard lock(t->mu);
    if (trial::is_terminal(t->status)) {
      fail(ErrorKind::kConflict, "TRIAL_TERMINAL",
           "trial '" + id + "' is already " + std::string(trial::status_name(t->status)));
    }
    t->cancel = true;
    was_pending = t->status == trial::TrialStatus::kPending;
  }
  if (was_pending) {
    // Never started: finish it here unless a worker claimed it meanwhile.
    bool removed = false;
    {
      std::lock_guard qlock(queue_mu_);
      auto it = std::find(queue_.begin(), queue_.end(), id);
      if (it != queue_.end()) {
        queue_.erase(it);
        removed = true;
      }
    }
    if (removed) {
      trial::TrialResult r;
      r.id = id;
      r.config = t->config;
      r.task = t->config.task.value_or(models::Task::kClassification);
      r.status = trial::TrialStatus::kCancelled;
      if (t->resume) {
        r.generations = t->resume->generations;
        r.evaluations = t->resume->archive.size();
        r.cache_hits = t->resume->cache_hits;
      }
      Json result = trial::to_json(r);
      write_file_atomic(trial_dir(id) / "result.json", result.dump(2));
      std::lock_guard lock(t->mu);
      t->result = std::move(result);
      t->status = trial::TrialStatus::kCancelled;
      const Json summary{{"generations", r.generations.size()}, {"evaluations", r.evaluations},
                         {"front_size", 0}, {"best", nullptr}};
      Json e{{"trial_id", id}, {"seq", t->next_seq++}, {"kind", "cancelled"}, {"payload", summary}};
      append_line(trial_dir(id) / "events.jsonl", e.dump());
      t->events.push_back(std::move(e));
      t->done_cv.notify_all();
    }
  }
  std::lock_guard lock(t->mu);
  return trial_doc(*t);
}

Json Studio::trial_front(const std::string& id) const {
  const auto t = find_trial(id);
  std::lock_guard lock(t->mu);
  if (!trial::is_terminal(t->status)) {
    fail(ErrorKind::kConflict, "TRIAL_NOT_FINISHED", "trial '" + id + "' is still " +
                                                         std::string(trial::status_name(t->status)));
  }
  if (!t->front) {
    return {{"trial_id", id}, {"objectives", Json::array()}, {"best", nullptr}, {"best_model_id", nullptr},
            {"members", Json::array()}};
  }
  return *t->front;
}

Json Studio::wait_trial(const std::string& id, std::chrono::milliseconds timeout) const {
  const auto t = find_trial(id);
  std::unique_lock lock(t->mu);
  t->done_cv.wait_for(lock, timeout, [&] { return trial::is_terminal(t->status); });
  return trial_doc(*t);
}

void Studio::record_event(TrialState& t, const trial::TrialEvent& e) {
  std::lock_guard lock(t.mu);
  const auto kind = trial::event_kind_name(e.kind);
  Json doc{{"trial_id", t.id}, {"seq", 0}, {"kind", kind}, {"payload", e.payload}};
  const bool terminal = e.kind == trial::EventKind::kCompleted || e.kind == trial::EventKind::kCancelled ||
                        e.kind == trial::EventKind::kFailed;
  if (terminal) {
    t.held_terminal = std::move(doc);
    return;
  }
  doc["seq"] = t.next_seq++;
  if (e.kind == trial::EventKind::kGenerationDone) {
    t.generations_done = e.payload.at("generation").get<std::size_t>() + 1;
  }
  if (e.kind == trial::EventKind::kCandidateDone) ++t.evaluations;
  append_line(trial_dir(t.id) / "events.jsonl", doc.dump());
  t.events.push_back(std::move(doc));
}

void Studio::worker_loop(std::stop_token stop) {
  while (!stop.stop_requested()) {
    std::string id;
    {
      std::unique_lock lock(queue_mu_);
      if (!queue_cv_.wait(lock, stop, [&] { return !queue_.empty(); })) return;
      id = queue_.front();
      queue_.pop_front();
    }
    std::shared_ptr<TrialState> t;
    {
      std::lock_guard lock(mu_);
      t = trials_.at(id);
    }
    run(t);
  }
}

void Studio::run(const std::shared_ptr<TrialState>& t) {
  {
    std::lock_guard lock(t->mu);
    if (trial::is_terminal(t->status)) return;
    t->status = trial::TrialStatus::kRunning;
  }
  const auto dir = trial_dir(t->id);
  trial::RunOptions options;
  options.trial_id = t->id;
  options.power = config_.power;
  options.resume = t->resume;
  options.on_event = [&](const trial::TrialEvent& e) {
    if (!stopping_) record_event(*t, e);
  };
  options.cancel_requested = [&] { return t->cancel.load() || stopping_.load(); };
  options.on_checkpoint = [&](const trial::Checkpoint& cp) {
    if (!stopping_) write_file_atomic(dir / "checkpoint.json", trial::to_json(cp).dump());
  };

  trial::TrialOutcome outcome;
  try {
    const auto ds = datasets_.get(t->config.dataset_id);
    outcome = trial::run_trial(t->config, ds->table, options);
  } catch (const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    outcome.result.id = t->id;
    outcome.result.config = t->config;
    outcome.result.status = trial::TrialStatus::kFailed;
    outcome.result.error = err ? err->code() + ": " + err->what() : std::string(e.what());
    std::lock_guard lock(t->mu);
    t->held_terminal = Json{{"trial_id", t->id},
                            {"seq", 0},
                            {"kind", "failed"},
                            {"payload", {{"generations", 0}, {"evaluations", 0}, {"front_size", 0}, {"best", nullptr},
                                         {"error", outcome.result.error}}}};
  }
  if (stopping_ && !t->cancel) return;  // interrupted by shutdown: resumes on next start

  // Artifacts first, so a stored result always has its models.
  Json front;
  if (!outcome.result.front.empty()) {
    front = trial::front_json(outcome.result);
    front["best_model_id"] =
        outcome.result.best ? Json(model_id_of(t->id, *outcome.result.best)) : Json(nullptr);
    for (auto& m : front.at("members")) m["model_id"] = model_id_of(t->id, m.at("id").get<std::string>());
    for (const auto& a : outcome.artifacts) {
      const auto mdir = dir / "models" / a.candidate_id;
      fs::create_directories(mdir);
      write_file_atomic(mdir / "model.json", models::to_json(a.model).dump());
      if (a.pipeline) write_file_atomic(mdir / "pipeline.json", features::to_json(*a.pipeline).dump());
    }
    write_file_atomic(dir / "front.json", front.dump(2));
  }
  const Json result = trial::to_json(outcome.result);
  write_file_atomic(dir / "result.json", result.dump(2));

  std::lock_guard lock(t->mu);
  t->result = result;
  if (!front.is_null()) {
    t->front = front;
    register_models(*t, front, std::move(outcome.artifacts));
  }
  t->status = outcome.result.status;
  t->evaluations = outcome.result.evaluations;
  t->generations_done = outcome.result.generations.size();
  if (t->held_terminal) {
    auto e = std::move(*t->held_terminal);
    t->held_terminal.reset();
    e["seq"] = t->next_seq++;
    append_line(dir / "events.jsonl", e.dump());
    t->events.push_back(std::move(e));
  }
  t->done_cv.notify_all();
}

void Studio::register_models(const TrialState& t, const Json& front, std::vector<trial::FrontArtifact> artifacts) {
  const auto& members = front.at("members");
  const auto best = front.at("best");
  const bool deployable = t.status == trial::TrialStatus::kCompleted ||
                          (t.result && t.result->at("status") == "completed");
  std::lock_guard lock(mu_);
  for (std::size_t i = 0; i < artifacts.size() && i < members.size(); ++i) {
    auto e = std::make_shared<ModelEntry>();
    e->candidate_id = artifacts[i].candidate_id;
    e->trial_id = t.id;
    e->id = model_id_of(t.id, e->candidate_id);
    e->member = members[i];
    e->member["model_id"] = e->id;
    e->is_best = best.is_string() && best.get<std::string>() == e->candidate_id;
    e->deployable = deployable;
    e->pipeline = std::move(artifacts[i].pipeline);
    e->model = std::move(artifacts[i].model);
    e->labels = e->model.classes;
    models_[e->id] = std::move(e);
  }
}

// ---------------------------------------------------------------------------
// Models

std::shared_ptr<const Studio::ModelEntry> Studio::find_model(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = models_.find(id);
  if (it == models_.end()) fail(ErrorKind::kNotFound, "MODEL_NOT_FOUND", "no model '" + id + "'");
  return it->second;
}

namespace {

Json input_schema(const std::optional<features::FittedPipeline>& p) {
  Json cols = Json::array();
  if (!p) return cols;
  for (const auto& [name, type] : p->source_columns) {
    cols.push_back({{"name", name}, {"type", data::type_name(type)}});
  }
  return cols;
}

bool lowerable(models::Family f) {
  using models::Family;
  return f == Family::kLinearRegression || f == Family::kRidge || f == Family::kLogisticRegression ||
         f == Family::kDecisionTree || f == Family::kRandomForest || f == Family::kGradientBoosting;
}

}  // namespace

Json Studio::model(const std::string& id) const {
  const auto m = find_model(id);
  const bool codegen = m->pipeline && lowerable(m->model.family) && !m->model.degenerate;
  Json dialects = Json::array();
  if (codegen || (m->pipeline && m->model.degenerate)) dialects = {"portable_c", "engine_native"};
  return {{"id", m->id},
          {"trial_id", m->trial_id},
          {"candidate_id", m->candidate_id},
          {"family", models::family_name(m->model.family)},
          {"task", models::task_name(m->model.task)},
          {"classes", m->model.classes},
          {"hyperparams", m->model.hyperparams},
          {"genome", m->member.at("genome")},
          {"objectives", m->member.at("objectives")},
          {"feature_count", m->member.at("feature_count")},
          {"features", m->model.feature_names},
          {"inputs", input_schema(m->pipeline)},
          {"is_best", m->is_best},
          {"deployable", m->deployable},
          {"codegen_dialects", dialects},
          {"parameter_count", models::parameter_count(m->model)},
          {"explainability", models::explainability(m->model)}};
}

Json Studio::model_report(const std::string& id, const std::string& split) const {
  const auto m = find_model(id);
  const auto& reports = m->member.at("reports");
  if (!reports.contains(split)) {
    fail(ErrorKind::kInvalidArgument, "INVALID_SPLIT", "split must be train, validation or test, got '" + split + "'");
  }
  return {{"model_id", id}, {"split", split}, {"report", reports.at(split)}};
}

Json Studio::model_code(const std::string& id, const std::string& dialect_name, bool with_benchmark) const {
  const auto m = find_model(id);
  const auto dialect = codegen::dialect_from_name(dialect_name);
  if (!m->pipeline) {
    fail(ErrorKind::kUnsupported, "UNSUPPORTED_FAMILY",
         std::string(models::family_name(m->model.family)) + " models have no code generator");
  }
  auto ir = codegen::lower(m->model, *m->pipeline);
  // Branch statistics from the trial's training rows.
  const auto ds = datasets_.get(find_trial(m->trial_id)->config.dataset_id);
  const auto& cfg = find_trial(m->trial_id)->config;
  const auto target = trial::prepare_target(ds->table, cfg.target, m->model.task);
  const auto splits = trial::make_splits(ds->table, target, cfg);
  const Matrix encoded = m->pipeline->encode(ds->table, splits.train);
  codegen::profile_visits(ir, encoded);
  const auto passes = codegen::default_passes();
  ir = codegen::optimize(std::move(ir), passes);
  const auto artifact = codegen::emit(ir, dialect);
  Json doc{{"model_id", id},
           {"dialect", codegen::dialect_name(dialect)},
           {"file_name", artifact.file_name},
           {"source", artifact.source},
           {"contract", artifact.contract},
           {"checksum", artifact.checksum},
           {"passes", ir.passes}};
  if (with_benchmark) {
    const codegen::NativeModel native(ir);
    doc["benchmark"] = codegen::to_json(codegen::benchmark(m->model, &*m->pipeline, native, encoded));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Deployments

std::shared_ptr<Studio::DeploymentState> Studio::find_deployment(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = deployments_.find(id);
  if (it == deployments_.end()) fail(ErrorKind::kNotFound, "DEPLOYMENT_NOT_FOUND", "no deployment '" + id + "'");
  return it->second;
}

Json Studio::deployment_doc(const DeploymentState& d) const {
  const auto m = find_model(d.model_id);
  return {{"id", d.id},
          {"model_id", d.model_id},
          {"trial_id", m->trial_id},
          {"family", models::family_name(m->model.family)},
          {"task", models::task_name(m->model.task)},
          {"classes", m->model.classes},
          {"inputs", input_schema(m->pipeline)},
          {"status", d.active ? "active" : "retired"},
          {"endpoint", "/deployments/" + d.id + "/predict"},
          {"created_at", d.created_at},
          {"retired_at", d.retired_at.empty() ? Json(nullptr) : Json(d.retired_at)},
          {"predictions", d.predictions},
          {"requests", d.requests},
          {"green",
           {{"compute_seconds", d.compute_seconds},
            {"electricity_kwh", d.electricity_kwh},
            {"carbon_kg", d.carbon_kg},
            {"power_watts", config_.power.power_watts},
            {"grid_intensity_kg_per_kwh", config_.power.grid_intensity_kg_per_kwh}}}};
}

void Studio::persist_deployment(const DeploymentState& d) const {
  write_file_atomic(config_.data_dir / "deployments" / (d.id + ".json"), deployment_doc(d).dump(2));
}

Json Studio::deploy(const std::string& model_id) {
  const auto m = find_model(model_id);
  if (!m->deployable) {
    fail(ErrorKind::kConflict, "MODEL_NOT_DEPLOYABLE",
         "model '" + model_id + "' does not belong to a completed trial");
  }
  auto d = std::make_shared<DeploymentState>();
  d->model_id = model_id;
  d->created_at = utc_timestamp();
  {
    std::lock_guard lock(mu_);
    d->id = sequence_id("dp", next_deployment_++);
    deployments_[d->id] = d;
  }
  std::lock_guard lock(d->mu);
  persist_deployment(*d);
  return deployment_doc(*d);
}

Json Studio::list_deployments() const {
  std::vector<std::shared_ptr<DeploymentState>> all;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, d] : deployments_) all.push_back(d);
  }
  Json items = Json::array();
  for (const auto& d : all) {
    std::lock_guard lock(d->mu);
    items.push_back(deployment_doc(*d));
  }
  return {{"deployments", items}};
}

Json Studio::deployment(const std::string& id) const {
  const auto d = find_deployment(id);
  std::lock_guard lock(d->mu);
  return deployment_doc(*d);
}

Json Studio::retire(const std::string& id) {
  const auto d = find_deployment(id);
  std::lock_guard lock(d->mu);
  if (!d->active) fail(ErrorKind::kConflict, "DEPLOYMENT_RETIRED", "deployment '" + id + "' is already retired");
  d->active = false;
  d->retired_at = utc_timestamp();
  persist_deployment(*d);
  return deployment_doc(*d);
}

Json Studio::predict(const std::string& deployment_id, const Json& body) {
  const auto d = find_deployment(deployment_id);
  {
    std::lock_guard lock(d->mu);
    if (!d->active) fail(ErrorKind::kGone, "DEPLOYMENT_RETIRED", "deployment '" + deployment_id + "' is retired");
  }
  const auto m = find_model(d->model_id);
  auto bad = [](const std::string& msg) { fail(ErrorKind::kInvalidArgument, "INVALID_PREDICT_REQUEST", msg); };
  if (!body.is_object()) bad("request body must be a JSON object");

  Json predictions = Json::array();
  std::size_t count = 0;
  if (m->model.task == models::Task::kForecasting) {
    if (!body.contains("horizon") || !body.at("horizon").is_number_integer()) {
      bad("forecasting deployments take {\"horizon\": n}");
    }
    const auto values = models::forecast(m->model, body.at("horizon").get<int>());
    for (double v : values) predictions.push_back({{"value", number_to_json(v)}});
    count = values.size();
  } else {
    std::vector<Json> rows;
    if (body.contains("rows")) {
      if (!body.at("rows").is_array()) bad("'rows' must be an array of objects");
      for (const auto& r : body.at("rows")) rows.push_back(r);
    } else if (body.contains("row")) {
      rows.push_back(body.at("row"));
    }
    if (rows.empty()) bad("provide 'row' or a non-empty 'rows' array");
    for (const auto& r : rows) {
      if (!r.is_object()) bad("each row must be an object keyed by column name");
    }
    std::vector<data::Column> columns;
    for (const auto& [name, type] : m->pipeline->source_columns) {
      std::vector<std::string> cells;
      for (const auto& r : rows) cells.push_back(r.contains(name) ? cell_of(r.at(name)) : "");
      columns.push_back(data::make_column(name, std::move(cells), type));
    }
    const data::Table table(std::move(columns));
    std::vector<std::size_t> all(rows.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto p = models::predict(m->model, m->pipeline->transform(table, all));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (m->model.is_classifier()) {
        Json probs = Json::object();
        for (std::size_t k = 0; k < m->labels.size(); ++k) probs[m->labels[k]] = p.probabilities(r, k);
        predictions.push_back(
            {{"label", m->labels.at(static_cast<std::size_t>(p.values[r]))}, {"probabilities", probs}});
      } else {
        predictions.push_back({{"value", number_to_json(p.values[r])}});
      }
    }
    count = rows.size();
  }

  const double seconds = static_cast<double>(count) * m->model.resources.predict_seconds_per_1000 / 1000.0;
  const auto green = eval::green_estimate(seconds, eval::EnergyBasis::kPrediction, config_.power);
  {
    std::lock_guard lock(d->mu);
    if (!d->active) fail(ErrorKind::kGone, "DEPLOYMENT_RETIRED", "deployment '" + deployment_id + "' is retired");
    d->predictions += count;
    d->requests += 1;
    d->compute_seconds += seconds;
    d->electricity_kwh += green.electricity_kwh;
    d->carbon_kg += green.carbon_kg;
    persist_deployment(*d);
  }
  return {{"deployment_id", deployment_id},
          {"model_id", d->model_id},
          {"task", models::task_name(m->model.task)},
          {"count", count},
          {"predictions", predictions},
          {"green", eval::to_json(green)}};
}

}  // namespace deskml::service
