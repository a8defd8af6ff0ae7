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

#include "deskml/models/hyperparams.hpp"

#include <algorithm>
#include <cmath>

#include "deskml/common/error.hpp"

namespace deskml::models {

namespace {

ParamDescriptor integer(std::string name, int lo, int hi, int def, bool log_scale = false) {
  return {std::move(name), ParamKind::kInteger, double(lo), double(hi), log_scale, {}, def};
}

ParamDescriptor real(std::string name, double lo, double hi, double def, bool log_scale = false) {
  return {std::move(name), ParamKind::kReal, lo, hi, log_scale, {}, def};
}

ParamDescriptor categorical(std::string name, std::vector<std::string> choices, std::string def) {
  return {std::move(name), ParamKind::kCategorical, 0, 0, false, std::move(choices), def};
}

ParamDescriptor boolean(std::string name, bool def) { return {std::move(name), ParamKind::kBoolean, 0, 1, false, {}, def}; }

bool value_ok(const ParamDescriptor& p, const Json& v) {
  switch (p.kind) {
    case ParamKind::kInteger: {
      if (!v.is_number_integer()) return false;
      const auto x = v.get<std::int64_t>();
      return x >= p.lo && x <= p.hi;
    }
    case ParamKind::kReal: {
      if (!v.is_number()) return false;
      const double x = v.get<double>();
      return std::isfinite(x) && x >= p.lo && x <= p.hi;
    }
    case ParamKind::kCategorical:
      return v.is_string() && std::find(p.choices.begin(), p.choices.end(), v.get<std::string>()) != p.choices.end();
    case ParamKind::kBoolean:
      return v.is_boolean();
  }
  return false;
}

}  // namespace

std::string_view param_kind_name(ParamKind k) noexcept {
  switch (k) {
    case ParamKind::kInteger: return "integer";
    case ParamKind::kReal: return "real";
    case ParamKind::kCategorical: return "categorical";
    case ParamKind::kBoolean: return "boolean";
  }
  return "real";
}

HyperparameterSpace::HyperparameterSpace(Family family, int version, std::vector<ParamDescriptor> params)
    : family_(family), version_(version), params_(std::move(params)) {}

Json HyperparameterSpace::defaults() const {
  Json out = Json::object();
  for (const auto& p : params_) out[p.name] = p.default_value;
  return out;
}

Json HyperparameterSpace::sample_param(const ParamDescriptor& p, Rng& rng) const {
  switch (p.kind) {
    case ParamKind::kInteger: {
      if (!p.log_scale) return rng.uniform_int(static_cast<std::int64_t>(p.lo), static_cast<std::int64_t>(p.hi));
      const double x = std::exp(rng.uniform(std::log(p.lo), std::log(p.hi + 1.0)));
      return static_cast<std::int64_t>(std::clamp(std::floor(x), p.lo, p.hi));
    }
    case ParamKind::kReal: {
      if (!p.log_scale) return rng.uniform(p.lo, p.hi);
      return std::clamp(std::exp(rng.uniform(std::log(p.lo), std::log(p.hi))), p.lo, p.hi);
    }
    case ParamKind::kCategorical:
      return p.choices[rng.index(p.choices.size())];
    case ParamKind::kBoolean:
      return rng.bernoulli(0.5);
  }
  return nullptr;
}

Json HyperparameterSpace::sample(Rng& rng) const {
  Json out = Json::object();
  for (const auto& p : params_) out[p.name] = sample_param(p, rng);
  return out;
}

bool HyperparameterSpace::contains(const Json& values) const noexcept {
  if (!values.is_object() || values.size() != params_.size()) return false;
  for (const auto& p : params_) {
    auto it = values.find(p.name);
    if (it == values.end() || !value_ok(p, *it)) return false;
  }
  return true;
}

Json HyperparameterSpace::resolve(const Json& partial) const {
  if (!partial.is_null() && !partial.is_object()) {
    fail(ErrorKind::kInvalidArgument, "INVALID_HYPERPARAMETER", "hyperparameters must be a JSON object");
  }
  Json out = defaults();
  if (partial.is_null()) return out;
  for (const auto& [key, value] : partial.items()) {
    auto it = std::find_if(params_.begin(), params_.end(), [&](const auto& p) { return p.name == key; });
    if (it == params_.end()) {
      fail(ErrorKind::kInvalidArgument, "INVALID_HYPERPARAMETER",
           "unknown hyperparameter '" + key + "' for " + std::string(family_name(family_)));
    }
    Json v = value;
    // Whole-valued reals are accepted for integer parameters.
    if (it->kind == ParamKind::kInteger && v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) {
      v = static_cast<std::int64_t>(v.get<double>());
    }
    if (!value_ok(*it, v)) {
      fail(ErrorKind::kInvalidArgument, "INVALID_HYPERPARAMETER",
           "hyperparameter '" + key + "' is outside the search space: " + value.dump());
    }
    out[key] = v;
  }
  return out;
}

Json HyperparameterSpace::to_json() const {
  Json params = Json::array();
  for (const auto& p : params_) {
    Json d{{"name", p.name}, {"kind", param_kind_name(p.kind)}, {"default", p.default_value}};
    if (p.kind == ParamKind::kInteger || p.kind == ParamKind::kReal) {
      d["low"] = p.lo;
      d["high"] = p.hi;
      d["log_scale"] = p.log_scale;
    }
    if (p.kind == ParamKind::kCategorical) d["choices"] = p.choices;
    params.push_back(std::move(d));
  }
  return {{"family", family_name(family_)}, {"version", version_}, {"params", params}};
}

const HyperparameterSpace& search_space(Family f) {
  static const std::vector<HyperparameterSpace> spaces = [] {
    std::vector<HyperparameterSpace> s;
    s.emplace_back(Family::kLinearRegression, 1, std::vector{boolean("fit_intercept", true)});
    s.emplace_back(Family::kRidge, 1, std::vector{real("alpha", 1e-4, 1e2, 1.0, true)});
    s.emplace_back(Family::kLogisticRegression, 1, std::vector{real("l2", 1e-6, 1e1, 1e-4, true)});
    s.emplace_back(Family::kGaussianNb, 1, std::vector{real("var_smoothing", 1e-12, 1e-3, 1e-9, true)});
    s.emplace_back(Family::kKnn, 1,
                   std::vector{integer("k", 1, 50, 5), categorical("weights", {"uniform", "distance"}, "uniform")});
    s.emplace_back(Family::kDecisionTree, 1,
                   std::vector{integer("max_depth", 1, 16, 6), integer("min_leaf", 1, 20, 1)});
    s.emplace_back(Family::kRandomForest, 1,
                   std::vector{integer("trees", 10, 200, 50, true), integer("max_depth", 2, 16, 8),
                               integer("min_leaf", 1, 20, 1),
                               categorical("max_features", {"sqrt", "log2", "all"}, "sqrt")});
    s.emplace_back(Family::kGradientBoosting, 1,
                   std::vector{integer("estimators", 10, 200, 50, true), real("learning_rate", 0.01, 0.5, 0.1, true),
                               integer("max_depth", 1, 6, 3), integer("min_leaf", 1, 20, 1)});
    s.emplace_back(Family::kNaiveForecaster, 1, std::vector<ParamDescriptor>{});
    s.emplace_back(Family::kSeasonalNaive, 1, std::vector{integer("season_length", 1, 52, 7)});
    s.emplace_back(Family::kDriftForecaster, 1, std::vector<ParamDescriptor>{});
    s.emplace_back(Family::kSesForecaster, 1, std::vector{real("alpha", 0.05, 1.0, 0.3)});
    return s;
  }();
  return spaces[static_cast<std::size_t>(f)];
}

int hp_int(const Json& hp, const char* name) { return hp.at(name).get<int>(); }
double hp_real(const Json& hp, const char* name) { return hp.at(name).get<double>(); }
bool hp_bool(const Json& hp, const char* name) { return hp.at(name).get<bool>(); }
std::string hp_string(const Json& hp, const char* name) { return hp.at(name).get<std::string>(); }

}  // namespace deskml::models
