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

#include "deskml/trial/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cfloat>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "deskml/common/error.hpp"
#include "deskml/common/hash.hpp"
#include "deskml/common/rng.hpp"
#include "deskml/common/stopwatch.hpp"

namespace deskml::trial {

std::string_view status_name(TrialStatus s) noexcept {
  switch (s) {
    case TrialStatus::kPending: return "pending";
    case TrialStatus::kRunning: return "running";
    case TrialStatus::kCancelled: return "cancelled";
    case TrialStatus::kFailed: return "failed";
    case TrialStatus::kCompleted: return "completed";
  }
  return "pending";
}

TrialStatus status_from_name(std::string_view s) {
  for (auto v : {TrialStatus::kPending, TrialStatus::kRunning, TrialStatus::kCancelled, TrialStatus::kFailed,
                 TrialStatus::kCompleted}) {
    if (status_name(v) == s) return v;
  }
  fail(ErrorKind::kInvalidArgument, "INVALID_STATUS", "unknown trial status '" + std::string(s) + "'");
}

bool is_terminal(TrialStatus s) noexcept {
  return s == TrialStatus::kCancelled || s == TrialStatus::kFailed || s == TrialStatus::kCompleted;
}

std::string_view event_kind_name(EventKind k) noexcept {
  switch (k) {
    case EventKind::kStarted: return "started";
    case EventKind::kCandidateDone: return "candidate_done";
    case EventKind::kGenerationDone: return "generation_done";
    case EventKind::kCancelled: return "cancelled";
    case EventKind::kCompleted: return "completed";
    case EventKind::kFailed: return "failed";
  }
  return "started";
}

// ---------------------------------------------------------------------------
// Target and splits

PreparedTarget prepare_target(const data::Table& table, const std::string& target, models::Task task) {
  const auto& col = table.column(table.index_of(target));
  PreparedTarget out;
  out.task = task;
  out.values.assign(col.size(), std::nan(""));
  std::size_t present = 0;
  if (task == models::Task::kClassification) {
    std::vector<std::string> labels;
    {
      std::vector<std::string> cells;
      for (std::size_t r = 0; r < col.size(); ++r) {
        if (!col.is_missing(r)) cells.push_back(col.cells[r]);
      }
      std::sort(cells.begin(), cells.end());
      cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
      labels = std::move(cells);
    }
    if (col.type == data::ColumnType::kNumeric) {
      auto num = [](const std::string& s) { return std::strtod(s.c_str(), nullptr); };
      std::stable_sort(labels.begin(), labels.end(),
                       [&](const std::string& a, const std::string& b) { return num(a) < num(b); });
    }
    std::unordered_map<std::string, double> code;
    for (std::size_t i = 0; i < labels.size(); ++i) code.emplace(labels[i], static_cast<double>(i));
    for (std::size_t r = 0; r < col.size(); ++r) {
      if (col.is_missing(r)) continue;
      out.values[r] = code.at(col.cells[r]);
      ++present;
    }
    if (labels.size() < 2) {
      fail(ErrorKind::kUnprocessable, "UNUSABLE_TARGET",
           "classification target '" + target + "' has fewer than two classes");
    }
    out.labels = std::move(labels);
  } else {
    if (!col.has_values() || col.type != data::ColumnType::kNumeric) {
      fail(ErrorKind::kUnprocessable, "UNUSABLE_TARGET", "target '" + target + "' is not numeric");
    }
    for (std::size_t r = 0; r < col.size(); ++r) {
      if (col.is_missing(r)) continue;
      out.values[r] = col.values[r];
      ++present;
    }
  }
  if (present < 2) fail(ErrorKind::kUnprocessable, "UNUSABLE_TARGET", "target '" + target + "' has fewer than two values");
  return out;
}

namespace {

constexpr std::uint64_t kSplitTag = 0x53504c4954ULL;

std::size_t portion(std::size_t n, double ratio) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratio));
}

void cut(std::span<const std::size_t> rows, const SplitRatios& ratios, SplitRows& out) {
  const std::size_t n = rows.size();
  const std::size_t n_train = std::min(n, portion(n, ratios.train));
  const std::size_t n_val = std::min(n - n_train, portion(n, ratios.validation));
  out.train.insert(out.train.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.validation.insert(out.validation.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train),
                        rows.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test.insert(out.test.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), rows.end());
}

}  // namespace

SplitRows make_splits(const data::Table& table, const PreparedTarget& target, const TrialConfig& config) {
  std::vector<std::size_t> usable;
  for (std::size_t r = 0; r < target.values.size(); ++r) {
    if (!std::isnan(target.values[r])) usable.push_back(r);
  }
  SplitRows out;
  if (target.task == models::Task::kForecasting) {
    const auto& idx = table.column(table.index_of(*config.datetime_index));
    std::erase_if(usable, [&](std::size_t r) { return idx.is_missing(r); });
    std::stable_sort(usable.begin(), usable.end(),
                     [&](std::size_t a, std::size_t b) { return idx.values[a] < idx.values[b]; });
    cut(usable, config.split, out);
  } else {
    Rng rng(derive_seed(config.seed, kSplitTag));
    rng.shuffle(std::span<std::size_t>(usable));
    if (target.task == models::Task::kClassification) {
      std::vector<std::vector<std::size_t>> by_class(target.labels.size());
      for (auto r : usable) by_class[static_cast<std::size_t>(target.values[r])].push_back(r);
      for (const auto& rows : by_class) cut(rows, config.split, out);
    } else {
      cut(usable, config.split, out);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.validation.begin(), out.validation.end());
    std::sort(out.test.begin(), out.test.end());
  }
  if (out.train.empty() || out.validation.empty() || out.test.empty()) {
    fail(ErrorKind::kUnprocessable, "SPLIT_TOO_SMALL",
         "the dataset has too few usable rows (" + std::to_string(usable.size()) +
             ") for non-empty train, validation and test splits");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialisation

namespace {

Json objectives_json(const Objectives& o) {
  Json out = Json::array();
  for (double v : o) out.push_back(number_to_json(v));
  return out;
}

Objectives objectives_from(const Json& j) {
  Objectives out;
  for (const auto& v : j) out.push_back(number_from_json(v));
  return out;
}

Json snapshot_json(const GenerationSnapshot& s) {
  Json ranks = Json::array(), crowding = Json::array();
  for (const auto& st : s.standings) {
    ranks.push_back(st.rank);
    crowding.push_back(number_to_json(st.crowding));
  }
  return {{"generation", s.generation}, {"population", s.population}, {"ranks", ranks},
          {"crowding", crowding},       {"front", s.front},           {"evaluations", s.evaluations},
          {"best_primary", number_to_json(s.best_primary)}};
}

GenerationSnapshot snapshot_from(const Json& j) {
  GenerationSnapshot s;
  s.generation = j.at("generation").get<std::size_t>();
  s.population = j.at("population").get<std::vector<std::string>>();
  const auto& ranks = j.at("ranks");
  const auto& crowding = j.at("crowding");
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    s.standings.push_back({ranks[i].get<std::size_t>(), number_from_json(crowding[i])});
  }
  s.front = j.at("front").get<std::vector<std::string>>();
  s.evaluations = j.at("evaluations").get<std::size_t>();
  s.best_primary = number_from_json(j.at("best_primary"));
  return s;
}

}  // namespace

Json to_json(const CandidateRecord& r) {
  return {{"id", r.id},
          {"hash", hex64(r.hash)},
          {"genome", to_json(r.genome)},
          {"generation", r.generation},
          {"ok", r.ok},
          {"error", r.error},
          {"objectives", objectives_json(r.objectives)},
          {"metrics", r.metrics},
          {"fit_seconds", r.fit_seconds},
          {"feature_count", r.feature_count}};
}

CandidateRecord candidate_record_from_json(const Json& j) {
  CandidateRecord r;
  r.id = j.at("id").get<std::string>();
  r.hash = std::stoull(j.at("hash").get<std::string>(), nullptr, 16);
  r.genome = genome_from_json(j.at("genome"));
  r.generation = j.at("generation").get<std::size_t>();
  r.ok = j.at("ok").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.objectives = objectives_from(j.at("objectives"));
  r.metrics = j.at("metrics");
  r.fit_seconds = j.at("fit_seconds").get<double>();
  r.feature_count = j.at("feature_count").get<std::size_t>();
  return r;
}

Json to_json(const Checkpoint& c) {
  Json archive = Json::array(), generations = Json::array();
  for (const auto& r : c.archive) archive.push_back(to_json(r));
  for (const auto& s : c.generations) generations.push_back(snapshot_json(s));
  return {{"next_generation", c.next_generation},
          {"population", c.population},
          {"archive", archive},
          {"generations", generations},
          {"cache_hits", c.cache_hits}};
}

Checkpoint checkpoint_from_json(const Json& j) {
  Checkpoint c;
  c.next_generation = j.at("next_generation").get<std::size_t>();
  c.population = j.at("population").get<std::vector<std::string>>();
  for (const auto& r : j.at("archive")) c.archive.push_back(candidate_record_from_json(r));
  for (const auto& s : j.at("generations")) c.generations.push_back(snapshot_from(s));
  c.cache_hits = j.at("cache_hits").get<std::size_t>();
  return c;
}

namespace {

Json member_json(const TrialResult& r, const FrontMember& m) {
  Json named = Json::object();
  for (std::size_t i = 0; i < r.config.objectives.size() && i < m.candidate.objectives.size(); ++i) {
    named[r.config.objectives[i].name] = number_to_json(m.candidate.objectives[i]);
  }
  Json reports = Json::object();
  for (const auto& [split, report] : m.reports) reports[std::string(eval::split_name(split))] = to_json(report);
  return {{"id", m.candidate.id},
          {"family", models::family_name(m.candidate.genome.family)},
          {"genome", to_json(m.candidate.genome)},
          {"generation", m.candidate.generation},
          {"objectives", named},
          {"objective_vector", objectives_json(m.candidate.objectives)},
          {"feature_count", m.candidate.feature_count},
          {"fit_seconds", m.candidate.fit_seconds},
          {"reports", reports}};
}

}  // namespace

Json front_json(const TrialResult& r) {
  Json members = Json::array();
  for (const auto& m : r.front) members.push_back(member_json(r, m));
  Json names = Json::array();
  for (const auto& o : r.config.objectives) names.push_back(o.name);
  return {{"trial_id", r.id},
          {"objectives", names},
          {"best", r.best ? Json(*r.best) : Json(nullptr)},
          {"members", members}};
}

Json to_json(const TrialResult& r) {
  Json generations = Json::array();
  for (const auto& s : r.generations) generations.push_back(snapshot_json(s));
  Json names = Json::array();
  for (const auto& o : r.config.objectives) names.push_back(o.name);
  return {{"id", r.id},
          {"status", status_name(r.status)},
          {"error", r.error.empty() ? Json(nullptr) : Json(r.error)},
          {"task", models::task_name(r.task)},
          {"config", to_json(r.config)},
          {"labels", r.labels},
          {"loss_metric", loss_metric_name(r.config.loss_metric(r.task))},
          {"objectives", names},
          {"splits", {{"train", r.train_rows}, {"validation", r.validation_rows}, {"test", r.test_rows}}},
          {"generations", generations},
          {"front", front_json(r).at("members")},
          {"best", r.best ? Json(*r.best) : Json(nullptr)},
          {"evaluations", r.evaluations},
          {"cache_hits", r.cache_hits},
          {"failures", r.failures},
          {"wall_seconds", r.wall_seconds},
          {"compute_seconds", r.compute_seconds},
          {"green", to_json(r.green)}};
}

// ---------------------------------------------------------------------------
// Selection

std::size_t select_best(std::span<const Objectives> objectives, std::span<const std::uint64_t> hashes) {
  if (objectives.empty()) fail(ErrorKind::kInvalidArgument, "EMPTY_FRONT", "select_best needs a non-empty front");
  std::size_t best = 0;
  for (std::size_t i = 1; i < objectives.size(); ++i) {
    const auto& a = objectives[i];
    const auto& b = objectives[best];
    if (a < b || (a == b && hashes[i] < hashes[best])) best = i;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Search

namespace {

std::vector<double> gather(const std::vector<double>& values, std::span<const std::size_t> rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(values[r]);
  return out;
}

struct Context {
  const TrialConfig& config;
  const data::Table& table;
  models::Task task;
  PreparedTarget target;
  SplitRows splits;
  LossMetric loss;
  eval::PowerConfig power;
};

struct Fitted {
  std::optional<features::FittedPipeline> pipeline;
  models::TrainedModel model;
};

Fitted fit_candidate(const Context& ctx, const Genome& g, std::uint64_t hash) {
  Fitted f;
  const models::FitOptions options{derive_seed(ctx.config.seed, hash), ctx.config.timing};
  if (ctx.task == models::Task::kForecasting) {
    const models::TargetValues y{ctx.task, gather(ctx.target.values, ctx.splits.train), {}};
    f.model = models::fit(g.family, g.hyperparams, Matrix(), {}, y, options);
    return f;
  }
  f.pipeline = features::fit(pipeline_spec(*g.pipeline, ctx.config.include), ctx.table, ctx.config.target,
                             ctx.splits.train);
  if (f.pipeline->output_names.empty()) {
    fail(ErrorKind::kUnprocessable, "NO_FEATURES", "the pipeline produced no usable features");
  }
  const Matrix x = f.pipeline->transform(ctx.table, ctx.splits.train);
  const models::TargetValues y{ctx.task, gather(ctx.target.values, ctx.splits.train), ctx.target.labels};
  f.model = models::fit(g.family, g.hyperparams, x, f.pipeline->output_names, y, options);
  return f;
}

eval::EvalReport report_on(const Context& ctx, const Fitted& f, std::span<const std::size_t> rows, eval::Split split) {
  const auto truth = gather(ctx.target.values, rows);
  const auto x = f.pipeline->transform(ctx.table, rows);
  const auto pred = models::predict(f.model, x);
  if (ctx.task == models::Task::kClassification) {
    return eval::classification_report(truth, pred.probabilities, ctx.target.labels, ctx.config.threshold, split);
  }
  return eval::regression_report(truth, pred.values, split, ctx.task);
}

eval::EvalReport forecast_report(const Context& ctx, const Fitted& f, eval::Split split) {
  const auto train = gather(ctx.target.values, ctx.splits.train);
  const auto val = gather(ctx.target.values, ctx.splits.validation);
  switch (split) {
    case eval::Split::kValidation:
      return eval::regression_report(val, models::forecast(f.model, static_cast<int>(val.size())), split, ctx.task);
    case eval::Split::kTest: {
      auto history = train;
      history.insert(history.end(), val.begin(), val.end());
      const auto test = gather(ctx.target.values, ctx.splits.test);
      return eval::regression_report(test, models::forecast(f.model, history, static_cast<int>(test.size())), split,
                                     ctx.task);
    }
    case eval::Split::kTrain:
      break;
  }
  // One-step-ahead predictions over the training history.
  std::vector<double> truth, pred;
  for (std::size_t i = 1; i < train.size(); ++i) {
    try {
      pred.push_back(models::forecast(f.model, std::span<const double>(train.data(), i), 1).front());
      truth.push_back(train[i]);
    } catch (const Error&) {
      // history shorter than the season
    }
  }
  if (truth.empty()) {
    truth.push_back(train.back());
    pred.push_back(train.back());
  }
  return eval::regression_report(truth, pred, split, ctx.task);
}

eval::EvalReport split_report(const Context& ctx, const Fitted& f, eval::Split split) {
  if (ctx.task == models::Task::kForecasting) return forecast_report(ctx, f, split);
  const auto& rows = split == eval::Split::kTrain        ? ctx.splits.train
                     : split == eval::Split::kValidation ? ctx.splits.validation
                                                         : ctx.splits.test;
  return report_on(ctx, f, rows, split);
}

double objective_value(const Context& ctx, ObjectiveKind kind, const Fitted& f, const eval::EvalReport& val) {
  const auto& res = f.model.resources;
  switch (kind) {
    case ObjectiveKind::kLoss:
      switch (ctx.loss) {
        case LossMetric::kOneMinusF1: return 1.0 - val.classification->f1;
        case LossMetric::kLogLoss: return val.classification->log_loss;
        case LossMetric::kRmse: return val.regression->rmse;
      }
      break;
    case ObjectiveKind::kTrainingTime: return res.fit_seconds;
    case ObjectiveKind::kPredictionTime: return res.predict_seconds_per_1000;
    case ObjectiveKind::kElectricity:
      return eval::green_estimate(res.fit_seconds, eval::EnergyBasis::kTraining, ctx.power).electricity_kwh;
    case ObjectiveKind::kEmissions:
      return eval::green_estimate(res.fit_seconds, eval::EnergyBasis::kTraining, ctx.power).carbon_kg;
    case ObjectiveKind::kExplainability: return models::explainability(f.model);
  }
  return DBL_MAX;
}

CandidateRecord evaluate(const Context& ctx, const Genome& g, std::size_t generation) {
  CandidateRecord r;
  r.genome = g;
  r.hash = genome_hash(g);
  r.id = hex64(r.hash);
  r.generation = generation;
  try {
    const Fitted f = fit_candidate(ctx, g, r.hash);
    const auto val = split_report(ctx, f, eval::Split::kValidation);
    Objectives obj;
    for (const auto& o : ctx.config.objectives) {
      const double v = objective_value(ctx, o.kind, f, val);
      if (!std::isfinite(v)) fail(ErrorKind::kInternal, "NON_FINITE_OBJECTIVE", "objective '" + o.name + "' is not finite");
      obj.push_back(v);
    }
    r.objectives = std::move(obj);
    r.metrics = to_json(val).at("metrics");
    r.fit_seconds = f.model.resources.fit_seconds;
    r.feature_count = f.model.feature_names.size();
    r.ok = true;
  } catch (const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    r.ok = false;
    r.error = err ? err->code() + ": " + err->what() : std::string(e.what());
    r.objectives.assign(ctx.config.objectives.size(), DBL_MAX);
    r.metrics = nullptr;
  }
  return r;
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads; stops handing out
/// work once `stop` returns true.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn,
                  const std::function<bool()>& stop) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      if (stop()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  const std::size_t threads = std::min(workers, n);
  if (threads <= 1) {
    work();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
}

std::vector<models::Family> trial_families(const TrialConfig& config, models::Task task) {
  std::vector<models::Family> out;
  const auto& requested = config.families.empty() ? models::families_for(task) : config.families;
  for (auto f : requested) {
    if (!models::supports(f, task)) {
      fail(ErrorKind::kInvalidArgument, "INVALID_CONFIG",
           std::string(models::family_name(f)) + " does not support " + std::string(models::task_name(task)));
    }
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  }
  return out;
}

}  // namespace

TrialOutcome run_trial(const TrialConfig& config, const data::Table& table, const RunOptions& options) {
  validate(config);
  const auto task = infer_task(table, config.target, config.datetime_index, config.task);
  Context ctx{config, table, task, prepare_target(table, config.target, task), {}, config.loss_metric(task),
              options.power};
  ctx.splits = make_splits(table, ctx.target, config);
  const GenomeSpace space{trial_families(config, task), task != models::Task::kForecasting, config.pipeline_search};

  TrialOutcome outcome;
  auto& result = outcome.result;
  result.id = options.trial_id;
  result.config = config;
  result.task = task;
  result.labels = ctx.target.labels;
  result.train_rows = ctx.splits.train.size();
  result.validation_rows = ctx.splits.validation.size();
  result.test_rows = ctx.splits.test.size();
  result.status = TrialStatus::kRunning;

  std::mutex event_mu;
  auto emit = [&](EventKind kind, Json payload) {
    if (!options.on_event) return;
    std::lock_guard lock(event_mu);
    options.on_event(TrialEvent{kind, std::move(payload)});
  };
  auto cancel_requested = [&] { return options.cancel_requested && options.cancel_requested(); };

  Stopwatch wall;
  std::vector<CandidateRecord> archive;
  std::unordered_map<std::uint64_t, std::size_t> cache;  // hash -> archive index
  std::vector<std::size_t> population;                    // archive indices
  std::size_t start = 0;
  if (options.resume) {
    for (const auto& r : options.resume->archive) {
      cache.emplace(r.hash, archive.size());
      archive.push_back(r);
    }
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < archive.size(); ++i) by_id.emplace(archive[i].id, i);
    for (const auto& id : options.resume->population) population.push_back(by_id.at(id));
    result.generations = options.resume->generations;
    result.cache_hits = options.resume->cache_hits;
    start = options.resume->next_generation;
  }
  emit(EventKind::kStarted, {{"generation", start},
                             {"resumed", options.resume.has_value()},
                             {"task", models::task_name(task)},
                             {"population", config.population},
                             {"generations", config.generations}});

  const std::size_t workers =
      config.workers > 0 ? config.workers : std::max<std::size_t>(1, std::thread::hardware_concurrency());

  // Evaluates genomes not yet in the archive; returns their archive indices
  // (or nullopt for genomes skipped after a cancellation request).
  auto evaluate_batch = [&](const std::vector<Genome>& genomes, std::size_t generation) {
    std::vector<std::optional<std::size_t>> placed(genomes.size());
    std::vector<std::size_t> fresh;  // positions of first occurrences of new genomes
    std::unordered_map<std::uint64_t, std::size_t> pending;
    std::vector<std::uint64_t> hashes(genomes.size());
    for (std::size_t i = 0; i < genomes.size(); ++i) {
      hashes[i] = genome_hash(genomes[i]);
      if (auto it = cache.find(hashes[i]); it != cache.end()) {
        placed[i] = it->second;
        ++result.cache_hits;
      } else if (pending.contains(hashes[i])) {
        ++result.cache_hits;
      } else {
        pending.emplace(hashes[i], fresh.size());
        fresh.push_back(i);
      }
    }
    std::vector<std::optional<CandidateRecord>> done(fresh.size());
    parallel_for(
        fresh.size(), workers,
        [&](std::size_t k) {
          done[k] = evaluate(ctx, genomes[fresh[k]], generation);
          const auto& r = *done[k];
          emit(EventKind::kCandidateDone, {{"generation", generation},
                                          {"candidate", r.id},
                                          {"family", models::family_name(r.genome.family)},
                                          {"ok", r.ok},
                                          {"objectives", objectives_json(r.objectives)},
                                          {"error", r.ok ? Json(nullptr) : Json(r.error)}});
        },
        cancel_requested);
    for (std::size_t k = 0; k < fresh.size(); ++k) {
      if (!done[k]) continue;
      cache.emplace(done[k]->hash, archive.size());
      archive.push_back(std::move(*done[k]));
    }
    for (std::size_t i = 0; i < genomes.size(); ++i) {
      if (placed[i]) continue;
      if (auto it = cache.find(hashes[i]); it != cache.end()) placed[i] = it->second;
    }
    return placed;
  };

  auto objectives_of = [&](std::span<const std::size_t> members) {
    std::vector<Objectives> out;
    out.reserve(members.size());
    for (auto i : members) out.push_back(archive[i].objectives);
    return out;
  };

  // Non-dominated successful archive members, sorted by objectives then hash.
  auto archive_front = [&] {
    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < archive.size(); ++i) {
      if (archive[i].ok) ok.push_back(i);
    }
    std::vector<std::size_t> front;
    if (ok.empty()) return front;
    const auto objs = objectives_of(ok);
    const auto fronts = nondominated_sort(objs);
    for (auto k : fronts.front()) front.push_back(ok[k]);
    std::sort(front.begin(), front.end(), [&](std::size_t a, std::size_t b) {
      if (archive[a].objectives != archive[b].objectives) return archive[a].objectives < archive[b].objectives;
      return archive[a].hash < archive[b].hash;
    });
    return front;
  };

  bool cancelled = false;
  try {
    for (std::size_t gen = start; gen < config.generations; ++gen) {
      if (cancel_requested()) {
        cancelled = true;
        break;
      }
      std::vector<Genome> batch;
      if (gen == 0) {
        Rng rng(derive_seed(config.seed, 0));
        for (std::size_t i = 0; i < config.population; ++i) {
          batch.push_back(space.sample_with_family(space.families[i % space.families.size()], rng));
        }
      } else {
        Rng rng(derive_seed(config.seed, 1000 + gen));
        std::vector<Genome> parents;
        for (auto i : population) parents.push_back(archive[i].genome);
        const auto standings = rank_population(objectives_of(population));
        batch = make_offspring(parents, standings, space, config.population, rng);
      }
      const auto placed = evaluate_batch(batch, gen);
      if (std::any_of(placed.begin(), placed.end(), [](const auto& p) { return !p.has_value(); })) {
        cancelled = true;
        break;
      }
      std::vector<std::size_t> members;
      for (const auto& p : placed) members.push_back(*p);
      if (gen == 0) {
        population = members;
      } else {
        // (mu + lambda) over the distinct members of parents and offspring.
        std::vector<std::size_t> pool;
        std::vector<std::size_t> duplicates;
        for (auto i : population) pool.push_back(i);
        for (auto i : members) pool.push_back(i);
        std::vector<std::size_t> distinct;
        for (auto i : pool) {
          if (std::find(distinct.begin(), distinct.end(), i) == distinct.end()) distinct.push_back(i);
          else duplicates.push_back(i);
        }
        std::vector<std::uint64_t> hashes;
        for (auto i : distinct) hashes.push_back(archive[i].hash);
        const auto keep = truncate(objectives_of(distinct), hashes, std::min(config.population, distinct.size()));
        std::vector<std::size_t> next;
        for (auto k : keep) next.push_back(distinct[k]);
        for (std::size_t k = 0; next.size() < config.population && k < duplicates.size(); ++k) {
          next.push_back(duplicates[k]);
        }
        population = std::move(next);
      }

      GenerationSnapshot snap;
      snap.generation = gen;
      for (auto i : population) snap.population.push_back(archive[i].id);
      snap.standings = rank_population(objectives_of(population));
      for (auto i : archive_front()) snap.front.push_back(archive[i].id);
      snap.evaluations = archive.size();
      snap.best_primary = DBL_MAX;
      for (const auto& r : archive) snap.best_primary = std::min(snap.best_primary, r.objectives.front());
      result.generations.push_back(snap);
      emit(EventKind::kGenerationDone, {{"generation", gen},
                                        {"evaluations", archive.size()},
                                        {"front_size", snap.front.size()},
                                        {"best_primary", number_to_json(snap.best_primary)}});
      if (options.on_checkpoint) {
        Checkpoint cp;
        cp.next_generation = gen + 1;
        cp.population = snap.population;
        cp.archive = archive;
        cp.generations = result.generations;
        cp.cache_hits = result.cache_hits;
        options.on_checkpoint(cp);
      }
    }

    result.evaluations = archive.size();
    for (const auto& r : archive) {
      if (!r.ok) ++result.failures;
      result.compute_seconds += r.fit_seconds;
    }
    result.green = eval::green_estimate(result.compute_seconds, eval::EnergyBasis::kTraining, options.power);

    const auto front = archive_front();
    if (front.empty() && !cancelled) {
      std::string reasons;
      for (std::size_t i = 0; i < archive.size() && i < 3; ++i) reasons += (i ? "; " : "") + archive[i].error;
      fail(ErrorKind::kUnprocessable, "ALL_CANDIDATES_FAILED",
           "every candidate failed to fit (" + std::to_string(archive.size()) + " evaluated): " + reasons);
    }
    for (auto i : front) {
      const auto& rec = archive[i];
      const Fitted f = fit_candidate(ctx, rec.genome, rec.hash);
      FrontMember m{rec, {}};
      for (auto split : {eval::Split::kTrain, eval::Split::kValidation, eval::Split::kTest}) {
        m.reports.emplace(split, split_report(ctx, f, split));
      }
      result.front.push_back(std::move(m));
      outcome.artifacts.push_back({rec.id, f.pipeline, f.model});
    }
    if (!result.front.empty()) {
      std::vector<Objectives> objs;
      std::vector<std::uint64_t> hashes;
      for (const auto& m : result.front) {
        objs.push_back(m.candidate.objectives);
        hashes.push_back(m.candidate.hash);
      }
      result.best = result.front[select_best(objs, hashes)].candidate.id;
    }
    result.status = cancelled ? TrialStatus::kCancelled : TrialStatus::kCompleted;
  } catch (const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    result.status = TrialStatus::kFailed;
    result.error = err ? err->code() + ": " + err->what() : std::string(e.what());
    result.evaluations = archive.size();
  }
  result.wall_seconds = wall.seconds();

  Json summary{{"generations", result.generations.size()},
               {"evaluations", result.evaluations},
               {"front_size", result.front.size()},
               {"best", result.best ? Json(*result.best) : Json(nullptr)}};
  switch (result.status) {
    case TrialStatus::kCancelled: emit(EventKind::kCancelled, summary); break;
    case TrialStatus::kFailed:
      summary["error"] = result.error;
      emit(EventKind::kFailed, summary);
      break;
    default: emit(EventKind::kCompleted, summary); break;
  }
  return outcome;
}

}  // namespace deskml::trial
