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

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

#include "deskml/common/error.hpp"
#include "deskml/common/files.hpp"
#include "deskml/common/json.hpp"
#include "deskml/common/strings.hpp"
#include "deskml/data/dataset.hpp"
#include "deskml/data/synthetic.hpp"
#include "deskml/service/config.hpp"
#include "deskml/service/server.hpp"
#include "deskml/service/studio.hpp"

namespace {

using deskml::Json;
namespace fs = std::filesystem;
using namespace std::chrono_literals;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitRejected = 2;
constexpr int kExitNetwork = 3;

/// An error document returned by a remote studio.
class RemoteError : public std::runtime_error {
 public:
  RemoteError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}
  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }

 private:
  int status_;
  std::string code_;
};

class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The operations the CLI needs, served either in-process or over HTTP.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual Json upload_dataset(const std::string& payload, const std::string& format, const std::string& name) = 0;
  virtual Json list_datasets() = 0;
  virtual Json dataset_profile(const std::string& id) = 0;
  virtual Json create_trial(const Json& body) = 0;
  virtual Json list_trials() = 0;
  virtual Json trial(const std::string& id) = 0;
  virtual Json trial_events(const std::string& id, long long after) = 0;
  virtual Json cancel_trial(const std::string& id) = 0;
  virtual Json trial_front(const std::string& id) = 0;
  virtual Json model_report(const std::string& id, const std::string& split) = 0;
  virtual Json model_code(const std::string& id, const std::string& dialect, bool benchmark) = 0;
  virtual Json deploy(const std::string& model_id) = 0;
  virtual Json list_deployments() = 0;
  virtual Json predict(const std::string& deployment_id, const Json& body) = 0;
  virtual Json retire(const std::string& deployment_id) = 0;
  /// Pause between event polls when following a trial.
  virtual std::chrono::milliseconds poll_interval() const = 0;
  /// Trials only make progress while this process runs.
  virtual bool in_process() const = 0;
};

class EmbeddedBackend final : public Backend {
 public:
  explicit EmbeddedBackend(deskml::service::ServiceConfig config) : studio_(std::move(config)) {}

  Json upload_dataset(const std::string& payload, const std::string& format, const std::string& name) override {
    return studio_.upload_dataset(payload, deskml::data::format_from_name(format), name);
  }
  Json list_datasets() override { return studio_.list_datasets(); }
  Json dataset_profile(const std::string& id) override { return studio_.dataset_profile(id); }
  Json create_trial(const Json& body) override { return studio_.create_trial(body); }
  Json list_trials() override { return studio_.list_trials(); }
  Json trial(const std::string& id) override { return studio_.trial(id); }
  Json trial_events(const std::string& id, long long after) override { return studio_.trial_events(id, after); }
  Json cancel_trial(const std::string& id) override { return studio_.cancel_trial(id); }
  Json trial_front(const std::string& id) override { return studio_.trial_front(id); }
  Json model_report(const std::string& id, const std::string& split) override {
    return studio_.model_report(id, split);
  }
  Json model_code(const std::string& id, const std::string& dialect, bool benchmark) override {
    return studio_.model_code(id, dialect, benchmark);
  }
  Json deploy(const std::string& model_id) override { return studio_.deploy(model_id); }
  Json list_deployments() override { return studio_.list_deployments(); }
  Json predict(const std::string& id, const Json& body) override { return studio_.predict(id, body); }
  Json retire(const std::string& id) override { return studio_.retire(id); }
  std::chrono::milliseconds poll_interval() const override { return 50ms; }
  bool in_process() const override { return true; }

 private:
  deskml::service::Studio studio_;
};

class RemoteBackend final : public Backend {
 public:
  RemoteBackend(const std::string& endpoint, const std::string& api_key) : client_(endpoint) {
    if (!client_.is_valid()) throw NetworkError("invalid endpoint '" + endpoint + "'");
    client_.set_connection_timeout(5, 0);
    client_.set_read_timeout(600, 0);
    if (!api_key.empty()) client_.set_default_headers({{"X-API-Key", api_key}});
  }

  Json upload_dataset(const std::string& payload, const std::string& format, const std::string& name) override {
    httplib::MultipartFormDataItems items{{"file", payload, name, "application/octet-stream"},
                                          {"name", name, "", ""},
                                          {"format", format, "", ""}};
    return check(client_.Post("/datasets", items));
  }
  Json list_datasets() override { return get("/datasets"); }
  Json dataset_profile(const std::string& id) override { return get("/datasets/" + id + "/profile"); }
  Json create_trial(const Json& body) override { return post("/trials", body); }
  Json list_trials() override { return get("/trials"); }
  Json trial(const std::string& id) override { return get("/trials/" + id); }
  Json trial_events(const std::string& id, long long after) override {
    return get("/trials/" + id + "/events?after=" + std::to_string(after));
  }
  Json cancel_trial(const std::string& id) override { return post("/trials/" + id + "/cancel", Json::object()); }
  Json trial_front(const std::string& id) override { return get("/trials/" + id + "/front"); }
  Json model_report(const std::string& id, const std::string& split) override {
    return get("/models/" + id + "/report?split=" + split);
  }
  Json model_code(const std::string& id, const std::string& dialect, bool benchmark) override {
    return get("/models/" + id + "/code?dialect=" + dialect + (benchmark ? "&benchmark=true" : ""));
  }
  Json deploy(const std::string& model_id) override { return post("/models/" + model_id + "/deploy", Json::object()); }
  Json list_deployments() override { return get("/deployments"); }
  Json predict(const std::string& id, const Json& body) override {
    return post("/deployments/" + id + "/predict", body);
  }
  Json retire(const std::string& id) override { return post("/deployments/" + id + "/retire", Json::object()); }
  std::chrono::milliseconds poll_interval() const override { return 1s; }
  bool in_process() const override { return false; }

 private:
  Json get(const std::string& path) { return check(client_.Get(path)); }
  Json post(const std::string& path, const Json& body) {
    return check(client_.Post(path, body.dump(), "application/json"));
  }

  static Json check(const httplib::Result& r) {
    if (!r) throw NetworkError("request failed: " + httplib::to_string(r.error()));
    Json doc;
    try {
      doc = r->body.empty() ? Json::object() : Json::parse(r->body);
    } catch (const Json::exception&) {
      throw RemoteError(r->status, "INVALID_RESPONSE", "non-JSON response with status " + std::to_string(r->status));
    }
    if (r->status >= 400) {
      const auto& e = doc.contains("error") ? doc.at("error") : Json::object();
      throw RemoteError(r->status, e.value("code", "HTTP_" + std::to_string(r->status)),
                        e.value("message", "request failed with status " + std::to_string(r->status)));
    }
    return doc;
  }

  httplib::Client client_;
};

// ---------------------------------------------------------------------------
// Output

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  return v.dump();
}

bool is_scalar(const Json& v) { return !v.is_object() && !v.is_array(); }

void print_rows(std::ostream& out, const Json& rows) {
  std::vector<std::string> cols;
  for (const auto& [k, v] : rows.front().items()) {
    if (is_scalar(v)) cols.push_back(k);
  }
  if (cols.empty()) {
    for (const auto& r : rows) out << "  " << r.dump() << '\n';
    return;
  }
  std::vector<std::size_t> width(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    width[c] = cols[c].size();
    for (const auto& r : rows) width[c] = std::max(width[c], scalar_text(r.value(cols[c], Json())).size());
  }
  auto line = [&](auto cell) {
    out << ' ';
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const std::string s = cell(c);
      out << ' ' << s << std::string(width[c] - s.size(), ' ');
    }
    out << '\n';
  };
  line([&](std::size_t c) { return cols[c]; });
  for (const auto& r : rows) line([&](std::size_t c) { return scalar_text(r.value(cols[c], Json())); });
}

void print_table(std::ostream& out, const Json& doc) {
  if (!doc.is_object()) {
    out << doc.dump(2) << '\n';
    return;
  }
  for (const auto& [k, v] : doc.items()) {
    if (is_scalar(v)) {
      out << k << ": " << scalar_text(v) << '\n';
    } else if (v.is_array() && !v.empty() && v.front().is_object()) {
      out << k << ":\n";
      print_rows(out, v);
    } else {
      const auto compact = v.dump();
      out << k << ": " << (compact.size() <= 100 ? compact : compact.substr(0, 97) + "...") << '\n';
    }
  }
}

struct Output {
  std::string format = "json";
  void operator()(const Json& doc) const {
    if (format == "table") print_table(std::cout, doc);
    else std::cout << doc.dump(2) << '\n';
  }
};

void print_event(const Json& e) {
  std::cerr << '[' << e.at("seq").get<long long>() << "] " << e.at("kind").get<std::string>();
  const auto& p = e.at("payload");
  if (p.is_object()) {
    for (const char* key : {"generation", "candidate", "family", "hypervolume", "front_size", "evaluations", "message"}) {
      if (p.contains(key)) std::cerr << ' ' << key << '=' << scalar_text(p.at(key));
    }
  }
  std::cerr << '\n';
}

/// Prints events until the trial is terminal; returns the final trial document.
Json follow(Backend& b, const std::string& id) {
  long long after = 0;
  while (true) {
    const auto page = b.trial_events(id, after);
    for (const auto& e : page.at("events")) print_event(e);
    after = page.at("next_after").get<long long>();
    if (page.at("terminal").get<bool>()) return b.trial(id);
    std::this_thread::sleep_for(b.poll_interval());
  }
}

// ---------------------------------------------------------------------------
// Argument helpers

std::pair<std::size_t, std::size_t> parse_budget(const std::string& text) {
  const auto x = deskml::to_lower(text).find('x');
  auto bad = [&]() -> std::pair<std::size_t, std::size_t> {
    deskml::fail(deskml::ErrorKind::kInvalidArgument, "INVALID_BUDGET",
                 "budget must look like PxG, e.g. 16x10; got '" + text + "'");
  };
  if (x == std::string::npos) bad();
  const auto p = deskml::parse_number(text.substr(0, x));
  const auto g = deskml::parse_number(text.substr(x + 1));
  if (!p || !g || *p < 1 || *g < 1 || *p != std::floor(*p) || *g != std::floor(*g)) bad();
  return {static_cast<std::size_t>(*p), static_cast<std::size_t>(*g)};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto item = deskml::trim(piece);
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  return deskml::read_file(path);
}

/// Accepts a bare row object, an array of rows, or a full predict body.
Json predict_body(const Json& in) {
  if (in.is_array()) return {{"rows", in}};
  if (in.is_object() && (in.contains("row") || in.contains("rows") || in.contains("horizon"))) return in;
  return {{"row", in}};
}

std::optional<std::string> env(const char* name) {
  if (const char* v = std::getenv(name); v != nullptr && *v != '\0') return std::string(v);
  return std::nullopt;
}

int serve(deskml::service::ServiceConfig config) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  deskml::service::Studio studio(config);
  deskml::service::HttpServer server(studio);
  const int port = server.bind(config.host, config.port);
  std::cerr << "deskml listening on http://" << config.host << ':' << port << " (data: " << config.data_dir.string()
            << ")\n";
  std::jthread stopper([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.listen();
  // Wake the stopper if the server ended on its own.
  pthread_kill(stopper.native_handle(), SIGTERM);
  return kExitOk;
}

int exit_code_for_status(int status) { return status >= 400 && status < 500 ? kExitRejected : kExitFailure; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deskml: tabular AutoML studio"};
  app.require_subcommand(1);

  std::string endpoint = env("DESKML_ENDPOINT").value_or("");
  std::string data_dir;
  std::string config_file;
  Output output;
  app.add_option("--endpoint", endpoint, "Remote studio URL, e.g. http://127.0.0.1:8080 (env DESKML_ENDPOINT)");
  app.add_option("--data-dir", data_dir, "Data directory for embedded mode (env DESKML_DATA_DIR)");
  app.add_option("--config", config_file, "Service config JSON file")->check(CLI::ExistingFile);
  app.add_option("--output", output.format, "Output format")->check(CLI::IsMember({"json", "table"}));

  std::function<int(Backend&)> action;
  auto on = [&](CLI::App* cmd, std::function<int(Backend&)> fn) { cmd->callback([&action, fn] { action = fn; }); };

  // dataset
  auto* dataset = app.add_subcommand("dataset", "Upload and inspect datasets");
  dataset->require_subcommand(1);
  std::string ds_file, ds_name, ds_format, ds_id;
  auto* ds_upload = dataset->add_subcommand("upload", "Upload a CSV or JSON file");
  ds_upload->add_option("file", ds_file, "Dataset file")->required()->check(CLI::ExistingFile);
  ds_upload->add_option("--name", ds_name, "Dataset name (defaults to the file name)");
  ds_upload->add_option("--format", ds_format, "csv or json (defaults to the file extension)")
      ->check(CLI::IsMember({"csv", "json"}));
  on(ds_upload, [&](Backend& b) {
    const fs::path p(ds_file);
    const auto format = !ds_format.empty() ? ds_format : deskml::to_lower(p.extension().string()) == ".json" ? "json" : "csv";
    output(b.upload_dataset(deskml::read_file(p), format, ds_name.empty() ? p.filename().string() : ds_name));
    return kExitOk;
  });
  auto* ds_profile = dataset->add_subcommand("profile", "Show a dataset profile");
  ds_profile->add_option("id", ds_id, "Dataset id")->required();
  on(ds_profile, [&](Backend& b) {
    output(b.dataset_profile(ds_id));
    return kExitOk;
  });
  std::size_t synth_rows = 7043;
  std::uint64_t synth_seed = 2023;
  std::string synth_out;
  auto* ds_synth = dataset->add_subcommand("synth", "Write the synthetic telco churn table as CSV");
  ds_synth->add_option("--rows", synth_rows, "Row count")->check(CLI::Range(std::size_t{1}, std::size_t{10000000}));
  ds_synth->add_option("--seed", synth_seed, "Generator seed");
  ds_synth->add_option("-o,--out", synth_out, "Output file (stdout when omitted)");
  on(dataset->add_subcommand("list", "List datasets"), [&](Backend& b) {
    output(b.list_datasets());
    return kExitOk;
  });

  // trial
  auto* trial = app.add_subcommand("trial", "Run and inspect trials");
  trial->require_subcommand(1);
  std::string tr_dataset, tr_target, tr_objectives, tr_budget, tr_families, tr_id, tr_task;
  std::optional<std::uint64_t> tr_seed;
  std::optional<std::size_t> tr_workers;
  bool tr_wait = false, tr_follow = false;
  auto* tr_create = trial->add_subcommand("create", "Start a trial");
  tr_create->add_option("--dataset", tr_dataset, "Dataset id")->required();
  tr_create->add_option("--target", tr_target, "Target column")->required();
  tr_create->add_option("--task", tr_task, "classification, regression or forecasting (inferred when omitted)");
  tr_create->add_option("--objectives", tr_objectives, "Comma-separated objectives, at most three");
  tr_create->add_option("--families", tr_families, "Comma-separated model families to search");
  tr_create->add_option("--budget", tr_budget, "Population x generations, e.g. 16x10");
  tr_create->add_option("--seed", tr_seed, "Random seed");
  tr_create->add_option("--workers", tr_workers, "Evaluation threads");
  tr_create->add_flag("--wait", tr_wait, "Follow progress until the trial finishes (always on in embedded mode)");
  on(tr_create, [&](Backend& b) {
    Json body{{"dataset_id", tr_dataset}, {"target", tr_target}};
    if (!tr_task.empty()) body["task"] = tr_task;
    if (!tr_objectives.empty()) body["objectives"] = split_list(tr_objectives);
    if (!tr_families.empty()) body["families"] = split_list(tr_families);
    if (!tr_budget.empty()) {
      const auto [p, g] = parse_budget(tr_budget);
      body["population"] = p;
      body["generations"] = g;
    }
    if (tr_seed) body["seed"] = *tr_seed;
    if (tr_workers) body["workers"] = *tr_workers;
    const auto created = b.create_trial(body);
    if (!tr_wait && !b.in_process()) {
      output(created);
      return kExitOk;
    }
    const auto done = follow(b, created.at("id").get<std::string>());
    output(done);
    return done.at("status") == "completed" ? kExitOk : kExitFailure;
  });
  auto* tr_status = trial->add_subcommand("status", "Show a trial");
  tr_status->add_option("id", tr_id, "Trial id")->required();
  tr_status->add_flag("--follow", tr_follow, "Stream events until the trial finishes");
  on(tr_status, [&](Backend& b) {
    output(tr_follow ? follow(b, tr_id) : b.trial(tr_id));
    return kExitOk;
  });
  auto* tr_front = trial->add_subcommand("front", "Show the Pareto front of a finished trial");
  tr_front->add_option("id", tr_id, "Trial id")->required();
  on(tr_front, [&](Backend& b) {
    output(b.trial_front(tr_id));
    return kExitOk;
  });
  auto* tr_cancel = trial->add_subcommand("cancel", "Cancel a trial");
  tr_cancel->add_option("id", tr_id, "Trial id")->required();
  on(tr_cancel, [&](Backend& b) {
    output(b.cancel_trial(tr_id));
    return kExitOk;
  });
  on(trial->add_subcommand("list", "List trials"), [&](Backend& b) {
    output(b.list_trials());
    return kExitOk;
  });

  // model
  auto* model = app.add_subcommand("model", "Inspect models and generate code");
  model->require_subcommand(1);
  std::string md_id, md_split = "test", md_dialect = "portable_c", md_out;
  bool md_bench = false;
  auto* md_report = model->add_subcommand("report", "Evaluation report on a split");
  md_report->add_option("id", md_id, "Model id")->required();
  md_report->add_option("--split", md_split, "train, validation or test");
  on(md_report, [&](Backend& b) {
    output(b.model_report(md_id, md_split));
    return kExitOk;
  });
  auto* md_code = model->add_subcommand("codegen", "Generate standalone inference code");
  md_code->add_option("id", md_id, "Model id")->required();
  md_code->add_option("--dialect", md_dialect, "portable_c or engine_native");
  md_code->add_option("-o,--out", md_out, "Directory for the source file and contract.json");
  md_code->add_flag("--benchmark", md_bench, "Compare interpreted and compiled inference speed");
  on(md_code, [&](Backend& b) {
    auto doc = b.model_code(md_id, md_dialect, md_bench);
    if (!md_out.empty()) {
      const fs::path dir(md_out);
      fs::create_directories(dir);
      deskml::write_file_atomic(dir / doc.at("file_name").get<std::string>(), doc.at("source").get<std::string>());
      deskml::write_file_atomic(dir / "contract.json", doc.at("contract").dump(2) + "\n");
      doc["written"] = {(dir / doc.at("file_name").get<std::string>()).string(), (dir / "contract.json").string()};
      doc.erase("source");
    }
    output(doc);
    return kExitOk;
  });

  // deployments
  std::string dp_model, dp_id, dp_input;
  std::optional<long> dp_horizon;
  auto* deploy = app.add_subcommand("deploy", "Deploy a model from a completed trial");
  deploy->add_option("model", dp_model, "Model id")->required();
  on(deploy, [&](Backend& b) {
    output(b.deploy(dp_model));
    return kExitOk;
  });
  auto* predict = app.add_subcommand("predict", "Score rows with a deployment");
  predict->add_option("deployment", dp_id, "Deployment id")->required();
  auto* input_opt = predict->add_option("--input", dp_input, "JSON file with a row, rows or a request body ('-' = stdin)");
  auto* horizon_opt = predict->add_option("--horizon", dp_horizon, "Forecast horizon");
  input_opt->excludes(horizon_opt);
  on(predict, [&](Backend& b) {
    Json body;
    if (dp_horizon) body = {{"horizon", *dp_horizon}};
    else if (!dp_input.empty()) body = predict_body(Json::parse(read_input(dp_input)));
    else deskml::fail(deskml::ErrorKind::kInvalidArgument, "INVALID_PREDICT_REQUEST", "pass --input or --horizon");
    output(b.predict(dp_id, body));
    return kExitOk;
  });
  auto* retire = app.add_subcommand("retire", "Retire a deployment");
  retire->add_option("deployment", dp_id, "Deployment id")->required();
  on(retire, [&](Backend& b) {
    output(b.retire(dp_id));
    return kExitOk;
  });
  on(app.add_subcommand("deployments", "List deployments"), [&](Backend& b) {
    output(b.list_deployments());
    return kExitOk;
  });

  // serve
  std::string sv_host;
  std::optional<int> sv_port;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--host", sv_host, "Listen address (env DESKML_HOST)");
  serve_cmd->add_option("--port", sv_port, "Listen port, 0 = any (env DESKML_PORT)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitRejected;
  }

  try {
    auto config = deskml::service::load_service_config(
        config_file.empty() ? std::nullopt : std::optional<fs::path>(config_file));
    if (!data_dir.empty()) config.data_dir = data_dir;
    if (ds_synth->parsed()) {
      const auto csv = deskml::data::synthetic_churn_csv(synth_rows, synth_seed);
      if (synth_out.empty()) std::cout << csv;
      else deskml::write_file_atomic(synth_out, csv);
      return kExitOk;
    }
    if (serve_cmd->parsed()) {
      if (!sv_host.empty()) config.host = sv_host;
      if (sv_port) config.port = *sv_port;
      return serve(std::move(config));
    }
    std::unique_ptr<Backend> backend;
    if (!endpoint.empty()) backend = std::make_unique<RemoteBackend>(endpoint, env("DESKML_API_KEY").value_or(""));
    else backend = std::make_unique<EmbeddedBackend>(std::move(config));
    return action(*backend);
  } catch (const NetworkError& e) {
    std::cerr << "error: NETWORK: " << e.what() << '\n';
    return kExitNetwork;
  } catch (const RemoteError& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << '\n';
    return exit_code_for_status(e.status());
  } catch (const deskml::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << '\n';
    return exit_code_for_status(deskml::http_status(e.kind()));
  } catch (const Json::exception& e) {
    std::cerr << "error: INVALID_JSON: " << e.what() << '\n';
    return kExitRejected;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
