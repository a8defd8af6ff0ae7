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

#include <gtest/gtest.h>

#include <httplib.h>

#include <chrono>
#include <fstream>
#include <thread>

#include "deskml/common/error.hpp"
#include "deskml/common/files.hpp"
#include "deskml/data/synthetic.hpp"
#include "deskml/features/pipeline.hpp"
#include "deskml/models/model.hpp"
#include "deskml/service/config.hpp"
#include "deskml/service/schemas.hpp"
#include "deskml/service/server.hpp"
#include "deskml/service/studio.hpp"
#include "support/temp_dir.hpp"

namespace deskml::service {
namespace {

using namespace std::chrono_literals;
using testing::TempDir;

ServiceConfig config_in(const TempDir& dir, std::size_t max_running = 1, std::size_t max_queue = 16) {
  ServiceConfig c;
  c.data_dir = dir.path() / "data";
  c.max_running = max_running;
  c.max_queue = max_queue;
  c.trial_workers = 1;
  return c;
}

template <typename Pred>
bool eventually(Pred pred, std::chrono::milliseconds timeout = 120s) {
  const auto until = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < until) {
    if (pred()) return true;
    std::this_thread::sleep_for(5ms);
  }
  return pred();
}

std::string error_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

Json quick_trial(const std::string& dataset_id) {
  return {{"dataset_id", dataset_id},
          {"target", "Churn"},
          {"objectives", {"log_loss", "prediction_time"}},
          {"families", {"logistic_regression", "decision_tree"}},
          {"population", 4},
          {"generations", 2},
          {"seed", 3}};
}

Json slow_trial(const std::string& dataset_id) {
  return {{"dataset_id", dataset_id},
          {"target", "Churn"},
          {"objectives", {"log_loss", "prediction_time"}},
          {"population", 16},
          {"generations", 40},
          {"seed", 9}};
}

std::size_t count_kind(const Json& events, const std::string& kind) {
  std::size_t n = 0;
  for (const auto& e : events) n += e.at("kind") == kind;
  return n;
}

void expect_log_consistent(const Json& trial, const Json& events) {
  long long prev = 0;
  for (const auto& e : events) {
    EXPECT_GT(e.at("seq").get<long long>(), prev);
    prev = e.at("seq").get<long long>();
  }
  ASSERT_FALSE(events.empty());
  const auto last = events.back().at("kind").get<std::string>();
  EXPECT_EQ(last, trial.at("status").get<std::string>());
  EXPECT_EQ(count_kind(events, "completed") + count_kind(events, "cancelled") + count_kind(events, "failed"), 1u);
  const auto& result = trial.at("result");
  EXPECT_EQ(count_kind(events, "generation_done"), result.at("generations").size());
  EXPECT_EQ(count_kind(events, "candidate_done"), result.at("evaluations").get<std::size_t>());
}

// ---------------------------------------------------------------------------
// Config

TEST(ServiceConfigTest, FileThenEnvironment) {
  auto c = service_config_from_json({{"port", 9000}, {"power_watts", 40.0}, {"max_running", 2}});
  EXPECT_EQ(c.port, 9000);
  EXPECT_EQ(c.power.power_watts, 40.0);
  std::map<std::string, std::string> env{{"DESKML_PORT", "9100"}, {"DESKML_DATA_DIR", "/tmp/x"},
                                         {"DESKML_GRID_INTENSITY", "0.5"}, {"DESKML_API_KEY", "k"}};
  c = apply_environment(c, [&](const std::string& k) -> std::optional<std::string> {
    auto it = env.find(k);
    return it == env.end() ? std::nullopt : std::optional(it->second);
  });
  EXPECT_EQ(c.port, 9100);
  EXPECT_EQ(c.data_dir, "/tmp/x");
  EXPECT_EQ(c.power.grid_intensity_kg_per_kwh, 0.5);
  EXPECT_EQ(c.power.power_watts, 40.0);
  EXPECT_EQ(c.max_running, 2u);
  EXPECT_EQ(to_json(c).at("api_key"), "***");
}

TEST(ServiceConfigTest, Rejections) {
  EXPECT_EQ(error_code([] { service_config_from_json({{"colour", "red"}}); }), "INVALID_CONFIG");
  EXPECT_EQ(error_code([] { service_config_from_json({{"max_running", 0}}); }), "INVALID_CONFIG");
  EXPECT_EQ(error_code([] { service_config_from_json({{"power_watts", -1}}); }), "INVALID_CONFIG");
  EXPECT_EQ(error_code([] {
              apply_environment({}, [](const std::string& k) -> std::optional<std::string> {
                return k == "DESKML_PORT" ? std::optional<std::string>("eighty") : std::nullopt;
              });
            }),
            "INVALID_CONFIG");
}

TEST(SchemaTest, IndexAndTrialRequestKeys) {
  const auto index = schema_index();
  EXPECT_EQ(index.at("schemas").size(), schema_names().size());
  const auto s = schema("trial_request");
  std::set<std::string> keys;
  for (const auto& [k, v] : s.at("properties").items()) keys.insert(k);
  EXPECT_EQ(keys, (std::set<std::string>{"dataset_id", "target", "task", "datetime_index", "objectives", "include",
                                         "families", "pipeline_search", "population", "generations", "split", "seed",
                                         "timing", "threshold", "workers"}));
  EXPECT_EQ(s.at("properties").at("objectives").at("maxItems"), 3);
  EXPECT_EQ(error_code([] { schema("nope"); }), "SCHEMA_NOT_FOUND");
}

// ---------------------------------------------------------------------------
// Studio

class StudioTest : public ::testing::Test {
 protected:
  static const std::string& churn_csv() {
    static const std::string csv = data::synthetic_churn_csv(600, 21);
    return csv;
  }
  TempDir dir_;
};

TEST_F(StudioTest, UploadAndInspectDataset) {
  Studio s(config_in(dir_));
  const auto ds = s.upload_dataset(churn_csv(), data::Format::kCsv, "churn.csv");
  EXPECT_EQ(ds.at("column_count"), 21);
  EXPECT_EQ(ds.at("row_count"), 600);
  const auto id = ds.at("id").get<std::string>();
  EXPECT_EQ(s.dataset(id), ds);
  EXPECT_EQ(s.dataset_profile(id).at("columns").size(), 21u);
  EXPECT_EQ(s.dataset_rows(id, 10, 5).at("rows").size(), 5u);
  EXPECT_FALSE(s.dataset_correlations(id).at("columns").empty());
  EXPECT_EQ(s.list_datasets().at("datasets").size(), 1u);
  EXPECT_EQ(error_code([&] { s.dataset("ds-999999"); }), "DATASET_NOT_FOUND");
}

TEST_F(StudioTest, UploadCap) {
  auto c = config_in(dir_);
  c.max_upload_bytes = 100;
  Studio s(c);
  try {
    s.upload_dataset(churn_csv(), data::Format::kCsv, "big");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "PAYLOAD_TOO_LARGE");
    EXPECT_EQ(http_status(e.kind()), 413);
  }
}

TEST_F(StudioTest, TrialRequestRejections) {
  Studio s(config_in(dir_));
  const auto id = s.upload_dataset(churn_csv(), data::Format::kCsv, "churn").at("id").get<std::string>();
  auto four = quick_trial(id);
  four["objectives"] = {"loss", "training_time", "emissions", "explainability"};
  try {
    s.create_trial(four);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "OBJECTIVE_LIMIT");
    EXPECT_EQ(http_status(e.kind()), 422);
  }
  auto missing = quick_trial("ds-424242");
  EXPECT_EQ(error_code([&] { s.create_trial(missing); }), "DATASET_NOT_FOUND");
  auto bad_target = quick_trial(id);
  bad_target["target"] = "nope";
  EXPECT_EQ(error_code([&] { s.create_trial(bad_target); }), "UNKNOWN_COLUMN");
  auto extra = quick_trial(id);
  extra["colour"] = "red";
  EXPECT_EQ(error_code([&] { s.create_trial(extra); }), "INVALID_CONFIG");
  EXPECT_TRUE(s.list_trials().at("trials").empty());
  EXPECT_EQ(error_code([&] { s.trial("tr-000404"); }), "TRIAL_NOT_FOUND");
  EXPECT_EQ(error_code([&] { s.model("tr-000001.abc"); }), "MODEL_NOT_FOUND");
}

TEST_F(StudioTest, TrialLifecycleDeployAndPredict) {
  Studio s(config_in(dir_));
  const auto ds_id = s.upload_dataset(churn_csv(), data::Format::kCsv, "churn").at("id").get<std::string>();
  const auto created = s.create_trial(quick_trial(ds_id));
  const auto id = created.at("id").get<std::string>();
  EXPECT_TRUE(created.at("status") == "pending" || created.at("status") == "running");
  const auto trial = s.wait_trial(id, 120s);
  ASSERT_EQ(trial.at("status"), "completed") << trial.dump();
  EXPECT_EQ(error_code([&] { s.trial_front("x"); }), "TRIAL_NOT_FOUND");

  const auto events = s.trial_events(id, 0).at("events");
  expect_log_consistent(trial, events);
  const auto tail = s.trial_events(id, events[events.size() - 2].at("seq").get<long long>());
  EXPECT_EQ(tail.at("events").size(), 1u);
  EXPECT_TRUE(tail.at("terminal").get<bool>());

  // Reads do not mutate; cancelling a terminal trial is a conflict with no effect.
  EXPECT_EQ(s.trial(id), trial);
  EXPECT_EQ(error_code([&] { s.cancel_trial(id); }), "TRIAL_TERMINAL");
  EXPECT_EQ(error_code([&] { s.cancel_trial(id); }), "TRIAL_TERMINAL");
  EXPECT_EQ(s.trial(id), trial);
  EXPECT_EQ(s.trial_events(id, 0).at("events"), events);

  const auto front = s.trial_front(id);
  ASSERT_FALSE(front.at("members").empty());
  const auto model_id = trial.at("best_model_id").get<std::string>();
  EXPECT_EQ(front.at("best_model_id"), model_id);
  const auto model = s.model(model_id);
  EXPECT_TRUE(model.at("is_best").get<bool>());
  EXPECT_TRUE(model.at("deployable").get<bool>());
  EXPECT_EQ(model.at("classes"), (std::vector<std::string>{"No", "Yes"}));
  EXPECT_EQ(s.model_report(model_id, "test").at("split"), "test");
  EXPECT_EQ(error_code([&] { s.model_report(model_id, "holdout"); }), "INVALID_SPLIT");
  const auto code = s.model_code(model_id, "portable_c");
  EXPECT_EQ(code.at("contract").at("checksum"), code.at("checksum"));
  EXPECT_EQ(error_code([&] { s.model_code(model_id, "wasm"); }), "UNSUPPORTED_DIALECT");

  const auto dep = s.deploy(model_id);
  const auto dep_id = dep.at("id").get<std::string>();
  EXPECT_EQ(dep.at("status"), "active");
  EXPECT_EQ(dep.at("predictions"), 0);

  // One fixture row through the deployment and straight through the engine.
  const auto table = data::ingest(churn_csv(), data::Format::kCsv, "t").table;
  const auto cand = s.model(model_id).at("candidate_id").get<std::string>();
  const auto mdir = dir_.path() / "data" / "trials" / id / "models" / cand;
  const auto engine_model = models::trained_model_from_json(Json::parse(read_file(mdir / "model.json")));
  const auto engine_pipeline = features::fitted_pipeline_from_json(Json::parse(read_file(mdir / "pipeline.json")));
  const std::vector<std::size_t> rows{0, 1, 2};
  const auto engine = models::predict(engine_model, engine_pipeline.transform(table, rows));

  Json body_rows = Json::array();
  for (auto r : rows) {
    Json row = Json::object();
    for (const auto& col : table.columns()) row[col.name] = col.cells[r];
    body_rows.push_back(row);
  }
  const auto out = s.predict(dep_id, {{"rows", body_rows}});
  ASSERT_EQ(out.at("predictions").size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& p = out.at("predictions")[i];
    EXPECT_EQ(p.at("label"), engine_model.classes[static_cast<std::size_t>(engine.values[i])]);
    double sum = 0.0;
    for (std::size_t k = 0; k < engine_model.classes.size(); ++k) {
      EXPECT_EQ(p.at("probabilities").at(engine_model.classes[k]).get<double>(), engine.probabilities(i, k));
      sum += engine.probabilities(i, k);
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
  EXPECT_EQ(s.deployment(dep_id).at("predictions"), 3);
  s.predict(dep_id, {{"row", body_rows[0]}});
  const auto after = s.deployment(dep_id);
  EXPECT_EQ(after.at("predictions"), 4);
  EXPECT_EQ(after.at("requests"), 2);
  EXPECT_GE(after.at("green").at("electricity_kwh").get<double>(), 0.0);

  // Numbers in JSON form give the same answer as their text form.
  Json typed = body_rows[0];
  typed["tenure"] = std::stod(typed.at("tenure").get<std::string>());
  typed["MonthlyCharges"] = std::stod(typed.at("MonthlyCharges").get<std::string>());
  EXPECT_EQ(s.predict(dep_id, {{"row", typed}}).at("predictions"), s.predict(dep_id, {{"row", body_rows[0]}}).at("predictions"));

  EXPECT_EQ(error_code([&] { s.predict(dep_id, Json::object()); }), "INVALID_PREDICT_REQUEST");
  EXPECT_EQ(error_code([&] { s.predict(dep_id, {{"rows", Json::array()}}); }), "INVALID_PREDICT_REQUEST");
  EXPECT_EQ(error_code([&] { s.predict("dp-999999", {{"row", body_rows[0]}}); }), "DEPLOYMENT_NOT_FOUND");

  s.retire(dep_id);
  try {
    s.predict(dep_id, {{"row", body_rows[0]}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "DEPLOYMENT_RETIRED");
    EXPECT_EQ(http_status(e.kind()), 410);
  }
  EXPECT_EQ(error_code([&] { s.retire(dep_id); }), "DEPLOYMENT_RETIRED");
  EXPECT_EQ(s.deployment(dep_id).at("predictions"), 6);
}

TEST_F(StudioTest, ConcurrencyLimitKeepsSecondTrialPending) {
  Studio s(config_in(dir_, 1));
  const auto ds = s.upload_dataset(churn_csv(), data::Format::kCsv, "churn").at("id").get<std::string>();
  const auto a = s.create_trial(slow_trial(ds)).at("id").get<std::string>();
  ASSERT_TRUE(eventually([&] { return s.trial(a).at("status") == "running"; }));
  const auto b = s.create_trial(slow_trial(ds)).at("id").get<std::string>();
  std::this_thread::sleep_for(200ms);
  EXPECT_EQ(s.trial(a).at("status"), "running");
  EXPECT_EQ(s.trial(b).at("status"), "pending");
  s.cancel_trial(a);
  ASSERT_EQ(s.wait_trial(a, 60s).at("status"), "cancelled");
  ASSERT_TRUE(eventually([&] { return s.trial(b).at("status") != "pending"; }));
  s.cancel_trial(b);
  EXPECT_EQ(s.wait_trial(b, 60s).at("status"), "cancelled");
}

TEST_F(StudioTest, QueueFull) {
  Studio s(config_in(dir_, 1, 1));
  const auto ds = s.upload_dataset(churn_csv(), data::Format::kCsv, "churn").at("id").get<std::string>();
  const auto a = s.create_trial(slow_trial(ds)).at("id").get<std::string>();
  ASSERT_TRUE(eventually([&] { return s.trial(a).at("status") == "running"; }));
  const auto b = s.create_trial(slow_trial(ds)).at("id").get<std::string>();
  try {
    s.create_trial(slow_trial(ds));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "QUEUE_FULL");
    EXPECT_EQ(http_status(e.kind()), 429);
  }
  EXPECT_EQ(s.list_trials().at("trials").size(), 2u);
  // Cancelling a queued trial finishes it without running.
  const auto cb = s.cancel_trial(b);
  EXPECT_EQ(cb.at("status"), "cancelled");
  EXPECT_EQ(s.trial_events(b, 0).at("events").back().at("kind"), "cancelled");
  s.cancel_trial(a);
  EXPECT_EQ(s.wait_trial(a, 60s).at("status"), "cancelled");
}

TEST_F(StudioTest, CancelMidTrialKeepsPartialFront) {
  Studio s(config_in(dir_));
  const auto ds = s.upload_dataset(churn_csv(), data::Format::kCsv, "churn").at("id").get<std::string>();
  const auto id = s.create_trial(slow_trial(ds)).at("id").get<std::string>();
  ASSERT_TRUE(eventually([&] {
    const auto ev = s.trial_events(id, 0).at("events");
    for (const auto& e : ev) {
      if (e.at("kind") == "generation_done" && e.at("payload").at("generation") == 1) return true;
    }
    return false;
  }));
  s.cancel_trial(id);
  const auto t = s.wait_trial(id, 60s);
  ASSERT_EQ(t.at("status"), "cancelled");
  const auto events = s.trial_events(id, 0).at("events");
  EXPECT_EQ(events.back().at("kind"), "cancelled");
  expect_log_consistent(t, events);
  // Cancelled while the third generation (index 2) was running.
  EXPECT_GE(t.at("result").at("generations").size(), 2u);
  EXPECT_LT(t.at("result").at("generations").size(), 40u);
  EXPECT_FALSE(s.trial_front(id).at("members").empty());
  const auto model_id = t.at("best_model_id").get<std::string>();
  EXPECT_FALSE(s.model(model_id).at("deployable").get<bool>());
  EXPECT_EQ(error_code([&] { s.deploy(model_id); }), "MODEL_NOT_DEPLOYABLE");
}

TEST_F(StudioTest, RestartPreservesEverything) {
  Json dataset, trial, front, model, deployment, events, datasets, trials, deployments, report, code;
  std::string ds_id, trial_id, model_id, dep_id;
  {
    Studio s(config_in(dir_));
    ds_id = s.upload_dataset(churn_csv(), data::Format::kCsv, "churn").at("id").get<std::string>();
    trial_id = s.create_trial(quick_trial(ds_id)).at("id").get<std::string>();
    trial = s.wait_trial(trial_id, 120s);
    ASSERT_EQ(trial.at("status"), "completed");
    model_id = trial.at("best_model_id").get<std::string>();
    dep_id = s.deploy(model_id).at("id").get<std::string>();
    const auto row = s.dataset_rows(ds_id, 0, 1).at("rows")[0];
    Json obj = Json::object();
    const auto cols = s.dataset(ds_id).at("columns");
    for (std::size_t c = 0; c < cols.size(); ++c) obj[cols[c].at("name").get<std::string>()] = row[c];
    s.predict(dep_id, {{"row", obj}});
    dataset = s.dataset(ds_id);
    front = s.trial_front(trial_id);
    model = s.model(model_id);
    deployment = s.deployment(dep_id);
    events = s.trial_events(trial_id, 0);
    datasets = s.list_datasets();
    trials = s.list_trials();
    deployments = s.list_deployments();
    report = s.model_report(model_id, "validation");
    code = s.model_code(model_id, "engine_native");
  }
  Studio s(config_in(dir_));
  EXPECT_EQ(s.dataset(ds_id).dump(), dataset.dump());
  EXPECT_EQ(s.trial(trial_id).dump(), trial.dump());
  EXPECT_EQ(s.trial_front(trial_id).dump(), front.dump());
  EXPECT_EQ(s.model(model_id).dump(), model.dump());
  EXPECT_EQ(s.deployment(dep_id).dump(), deployment.dump());
  EXPECT_EQ(s.trial_events(trial_id, 0).dump(), events.dump());
  EXPECT_EQ(s.list_datasets().dump(), datasets.dump());
  EXPECT_EQ(s.list_trials().dump(), trials.dump());
  EXPECT_EQ(s.list_deployments().dump(), deployments.dump());
  EXPECT_EQ(s.model_report(model_id, "validation").dump(), report.dump());
  EXPECT_EQ(s.model_code(model_id, "engine_native").dump(), code.dump());
  // New ids continue after the persisted ones.
  EXPECT_EQ(s.upload_dataset(churn_csv(), data::Format::kCsv, "again").at("id"), "ds-000002");
  EXPECT_EQ(s.deploy(model_id).at("id"), "dp-000002");
}

TEST_F(StudioTest, RestartMidTrialResumesToTheSameResult) {
  auto body = slow_trial("ds-000001");
  body["generations"] = 4;
  body["population"] = 6;
  std::string id;
  {
    Studio s(config_in(dir_));
    s.upload_dataset(churn_csv(), data::Format::kCsv, "churn");
    id = s.create_trial(body).at("id").get<std::string>();
    ASSERT_TRUE(eventually([&] { return s.trial(id).at("progress").at("generations") == 2; }));
  }
  Json resumed;
  {
    Studio s(config_in(dir_));
    resumed = s.wait_trial(id, 120s);
    ASSERT_EQ(resumed.at("status"), "completed");
    expect_log_consistent(resumed, s.trial_events(id, 0).at("events"));
    EXPECT_EQ(count_kind(s.trial_events(id, 0).at("events"), "started"), 2u);
  }
  TempDir other;
  Studio s(config_in(other));
  s.upload_dataset(churn_csv(), data::Format::kCsv, "churn");
  const auto straight = s.wait_trial(s.create_trial(body).at("id").get<std::string>(), 120s);
  ASSERT_EQ(straight.at("status"), "completed");
  auto strip = [](Json r) {
    r.erase("wall_seconds");
    return r;
  };
  EXPECT_EQ(strip(resumed.at("result")), strip(straight.at("result")));
  EXPECT_EQ(resumed.at("best_model_id"), straight.at("best_model_id"));
}

// ---------------------------------------------------------------------------
// HTTP

class HttpTest : public ::testing::Test {
 protected:
  void start(ServiceConfig c) {
    studio_ = std::make_unique<Studio>(std::move(c));
    server_ = std::make_unique<HttpServer>(*studio_);
    port_ = server_->start("127.0.0.1", 0);
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(120, 0);
  }
  void TearDown() override {
    client_.reset();
    if (server_) server_->stop();
    server_.reset();
    studio_.reset();
  }

  std::pair<int, Json> get(const std::string& path) {
    auto r = client_->Get(path);
    return {r->status, r->body.empty() ? Json() : Json::parse(r->body)};
  }
  std::pair<int, Json> post(const std::string& path, const Json& body) {
    auto r = client_->Post(path, body.dump(), "application/json");
    return {r->status, r->body.empty() ? Json() : Json::parse(r->body)};
  }
  std::string upload() {
    httplib::MultipartFormDataItems items{{"file", data::synthetic_churn_csv(500, 4), "churn.csv", "text/csv"}};
    auto r = client_->Post("/datasets", items);
    EXPECT_EQ(r->status, 201) << r->body;
    return Json::parse(r->body).at("id").get<std::string>();
  }

  TempDir dir_;
  std::unique_ptr<Studio> studio_;
  std::unique_ptr<HttpServer> server_;
  std::unique_ptr<httplib::Client> client_;
  int port_ = 0;
};

TEST_F(HttpTest, StatusDiscipline) {
  start(config_in(dir_));
  const auto ds = upload();
  auto [st, profile] = get("/datasets/" + ds + "/profile");
  EXPECT_EQ(st, 200);
  EXPECT_EQ(profile.at("columns").size(), 21u);

  Json four = quick_trial(ds);
  four["objectives"] = {"loss", "training_time", "emissions", "explainability"};
  auto [s422, e422] = post("/trials", four);
  EXPECT_EQ(s422, 422);
  EXPECT_EQ(e422.at("error").at("code"), "OBJECTIVE_LIMIT");
  EXPECT_FALSE(e422.at("error").at("message").get<std::string>().empty());

  auto [s404, e404] = get("/models/unknown");
  EXPECT_EQ(s404, 404);
  EXPECT_EQ(e404.at("error").at("code"), "MODEL_NOT_FOUND");

  auto r = client_->Post("/trials", "{not json", "application/json");
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(Json::parse(r->body).at("error").at("code"), "INVALID_JSON");

  auto [sroute, eroute] = get("/nowhere");
  EXPECT_EQ(sroute, 404);
  EXPECT_EQ(eroute.at("error").at("code"), "ROUTE_NOT_FOUND");

  auto [srows, erows] = get("/datasets/" + ds + "/rows?offset=abc");
  EXPECT_EQ(srows, 400);
  EXPECT_EQ(erows.at("error").at("code"), "INVALID_PARAMETER");

  auto [ss, schemas] = get("/schemas");
  EXPECT_EQ(ss, 200);
  EXPECT_EQ(schemas.at("schemas").size(), schema_names().size());
  EXPECT_EQ(get("/schemas/trial_request").second, schema("trial_request"));
}

TEST_F(HttpTest, EndToEndMatchesEmbedded) {
  start(config_in(dir_));
  const auto ds = upload();
  auto [s201, created] = post("/trials", quick_trial(ds));
  ASSERT_EQ(s201, 201);
  const auto id = created.at("id").get<std::string>();
  long long after = 0;
  bool terminal = false;
  Json events = Json::array();
  for (int i = 0; i < 20000 && !terminal; ++i) {
    auto [st, page] = get("/trials/" + id + "/events?after=" + std::to_string(after));
    ASSERT_EQ(st, 200);
    for (const auto& e : page.at("events")) events.push_back(e);
    after = page.at("next_after").get<long long>();
    terminal = page.at("terminal").get<bool>();
    if (!terminal) std::this_thread::sleep_for(10ms);
  }
  ASSERT_TRUE(terminal);
  auto [st, trial] = get("/trials/" + id);
  ASSERT_EQ(trial.at("status"), "completed");
  expect_log_consistent(trial, events);
  EXPECT_EQ(trial, studio_->trial(id));

  auto [sf, front] = get("/trials/" + id + "/front");
  EXPECT_EQ(front, studio_->trial_front(id));
  const auto model_id = trial.at("best_model_id").get<std::string>();
  EXPECT_EQ(get("/models/" + model_id).second, studio_->model(model_id));
  EXPECT_EQ(get("/models/" + model_id + "/report?split=train").second, studio_->model_report(model_id, "train"));
  EXPECT_EQ(get("/models/" + model_id + "/code?dialect=portable_c").second,
            studio_->model_code(model_id, "portable_c"));
  EXPECT_EQ(get("/models/" + model_id + "/code?dialect=wasm").first, 422);

  auto [sc, conflict] = post("/trials/" + id + "/cancel", Json::object());
  EXPECT_EQ(sc, 409);
  EXPECT_EQ(conflict.at("error").at("code"), "TRIAL_TERMINAL");

  auto [sd, dep] = post("/models/" + model_id + "/deploy", Json::object());
  ASSERT_EQ(sd, 201);
  const auto dep_id = dep.at("id").get<std::string>();
  const auto row = get("/datasets/" + ds + "/rows?offset=7&limit=1").second;
  Json obj = Json::object();
  for (std::size_t c = 0; c < row.at("columns").size(); ++c) obj[row.at("columns")[c].get<std::string>()] = row.at("rows")[0][c];
  auto [sp, pred] = post("/deployments/" + dep_id + "/predict", {{"row", obj}});
  ASSERT_EQ(sp, 200) << pred.dump();
  EXPECT_EQ(pred, studio_->predict(dep_id, {{"row", obj}}));
  EXPECT_EQ(get("/deployments/" + dep_id).second.at("predictions"), 2);

  EXPECT_EQ(post("/deployments/" + dep_id + "/retire", Json::object()).first, 200);
  auto [sg, gone] = post("/deployments/" + dep_id + "/predict", {{"row", obj}});
  EXPECT_EQ(sg, 410);
  EXPECT_EQ(gone.at("error").at("code"), "DEPLOYMENT_RETIRED");
  EXPECT_EQ(post("/deployments/" + dep_id + "/retire", Json::object()).first, 409);
}

TEST_F(HttpTest, UploadLimitAndApiKey) {
  auto c = config_in(dir_);
  c.max_upload_bytes = 2000;
  c.api_key = "sesame";
  start(c);
  EXPECT_EQ(get("/health").first, 200);
  auto [s401, e401] = get("/datasets");
  EXPECT_EQ(s401, 401);
  EXPECT_EQ(e401.at("error").at("code"), "UNAUTHORIZED");
  client_->set_default_headers({{"X-API-Key", "sesame"}});
  EXPECT_EQ(get("/datasets").first, 200);
  httplib::MultipartFormDataItems items{{"file", data::synthetic_churn_csv(200, 4), "churn.csv", "text/csv"}};
  auto r = client_->Post("/datasets", items);
  EXPECT_EQ(r->status, 413);
  EXPECT_EQ(Json::parse(r->body).at("error").at("code"), "PAYLOAD_TOO_LARGE");
  auto small = client_->Post("/datasets?name=tiny.csv", "a,b\n1,x\n2,y\n", "text/csv");
  EXPECT_EQ(small->status, 201);
  EXPECT_EQ(Json::parse(small->body).at("column_count"), 2);
}

}  // namespace
}  // namespace deskml::service
