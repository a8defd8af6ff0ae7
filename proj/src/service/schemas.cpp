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

#include "deskml/service/schemas.hpp"

#include <map>

#include "deskml/common/error.hpp"

namespace deskml::service {

namespace {

const std::map<std::string, std::string>& documents() {
  static const std::map<std::string, std::string> docs = {
      {"error", R"({
  "type": "object",
  "required": ["error"],
  "properties": {
    "error": {
      "type": "object",
      "required": ["code", "message", "kind"],
      "properties": {
        "code": {"type": "string"},
        "message": {"type": "string"},
        "kind": {"type": "string"}
      }
    }
  }
})"},
      {"trial_request", R"({
  "type": "object",
  "required": ["dataset_id", "target"],
  "additionalProperties": false,
  "properties": {
    "dataset_id": {"type": "string"},
    "target": {"type": "string"},
    "task": {"enum": ["classification", "regression", "forecasting", null]},
    "datetime_index": {"type": ["string", "null"]},
    "objectives": {
      "type": "array",
      "minItems": 1,
      "maxItems": 3,
      "uniqueItems": true,
      "items": {"enum": ["loss", "log_loss", "training_time", "prediction_time", "electricity", "emissions", "explainability"]}
    },
    "include": {"type": "array", "items": {"type": "string"}},
    "families": {"type": "array", "items": {"type": "string"}},
    "pipeline_search": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "imputation": {"type": "boolean"},
        "encoding": {"type": "boolean"},
        "scaling": {"type": "boolean"},
        "generation": {"type": "boolean"},
        "selection": {"type": "boolean"}
      }
    },
    "population": {"type": "integer", "minimum": 2, "maximum": 512},
    "generations": {"type": "integer", "minimum": 1, "maximum": 200},
    "split": {
      "type": "object",
      "properties": {
        "train": {"type": "number", "exclusiveMinimum": 0},
        "validation": {"type": "number", "exclusiveMinimum": 0},
        "test": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "seed": {"type": "integer", "minimum": 0},
    "timing": {"enum": ["modelled", "measured"]},
    "threshold": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
    "workers": {"type": "integer", "minimum": 0}
  }
})"},
      {"dataset", R"({
  "type": "object",
  "required": ["id", "name", "format", "created_at", "row_count", "column_count", "columns", "checksum", "warnings"],
  "properties": {
    "id": {"type": "string"},
    "name": {"type": "string"},
    "format": {"enum": ["csv", "json"]},
    "created_at": {"type": "string"},
    "row_count": {"type": "integer"},
    "column_count": {"type": "integer"},
    "checksum": {"type": "string"},
    "columns": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["name", "inferred_type", "missing_count", "cardinality"]
      }
    },
    "warnings": {"type": "array", "items": {"type": "string"}}
  }
})"},
      {"trial", R"({
  "type": "object",
  "required": ["id", "status", "created_at", "dataset_id", "target", "config", "progress", "result", "error", "best", "best_model_id"],
  "properties": {
    "id": {"type": "string"},
    "status": {"enum": ["pending", "running", "cancelled", "failed", "completed"]},
    "config": {"$ref": "/schemas/trial_request"},
    "progress": {
      "type": "object",
      "required": ["generations", "evaluations", "events", "last_seq"]
    },
    "result": {"type": ["object", "null"]},
    "error": {"type": ["string", "null"]},
    "best": {"type": ["string", "null"]},
    "best_model_id": {"type": ["string", "null"]}
  }
})"},
      {"trial_events", R"({
  "type": "object",
  "required": ["trial_id", "status", "terminal", "events", "next_after"],
  "properties": {
    "events": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["trial_id", "seq", "kind", "payload"],
        "properties": {
          "seq": {"type": "integer", "minimum": 1},
          "kind": {"enum": ["started", "candidate_done", "generation_done", "cancelled", "completed", "failed"]},
          "payload": {"type": "object"}
        }
      }
    },
    "next_after": {"type": "integer"}
  }
})"},
      {"front", R"({
  "type": "object",
  "required": ["trial_id", "objectives", "best", "best_model_id", "members"],
  "properties": {
    "objectives": {"type": "array", "items": {"type": "string"}},
    "members": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["id", "model_id", "family", "genome", "generation", "objectives", "objective_vector", "feature_count", "reports"]
      }
    }
  }
})"},
      {"model", R"({
  "type": "object",
  "required": ["id", "trial_id", "candidate_id", "family", "task", "classes", "hyperparams", "genome", "objectives", "inputs", "is_best", "deployable", "codegen_dialects"],
  "properties": {
    "inputs": {
      "type": "array",
      "items": {"type": "object", "required": ["name", "type"]}
    },
    "codegen_dialects": {"type": "array", "items": {"enum": ["portable_c", "engine_native"]}}
  }
})"},
      {"report", R"({
  "type": "object",
  "required": ["model_id", "split", "report"],
  "properties": {
    "split": {"enum": ["train", "validation", "test"]},
    "report": {"type": "object"}
  }
})"},
      {"code", R"({
  "type": "object",
  "required": ["model_id", "dialect", "file_name", "source", "contract", "checksum", "passes"],
  "properties": {
    "dialect": {"enum": ["portable_c", "engine_native"]},
    "contract": {
      "type": "object",
      "required": ["format", "version", "dialect", "entry", "inputs", "encodings", "outputs", "checksum"]
    },
    "benchmark": {
      "type": "object",
      "required": ["rows", "repeats", "interpreted_ns_per_row", "compiled_ns_per_row", "ratio", "interpreted_bytes", "compiled_bytes"]
    }
  }
})"},
      {"deployment", R"({
  "type": "object",
  "required": ["id", "model_id", "trial_id", "status", "endpoint", "created_at", "predictions", "requests", "green", "inputs"],
  "properties": {
    "status": {"enum": ["active", "retired"]},
    "predictions": {"type": "integer", "minimum": 0},
    "green": {
      "type": "object",
      "required": ["compute_seconds", "electricity_kwh", "carbon_kg"]
    }
  }
})"},
      {"predict_request", R"({
  "type": "object",
  "properties": {
    "row": {"type": "object"},
    "rows": {"type": "array", "minItems": 1, "items": {"type": "object"}},
    "horizon": {"type": "integer", "minimum": 1}
  },
  "minProperties": 1
})"},
      {"predict_response", R"({
  "type": "object",
  "required": ["deployment_id", "model_id", "task", "count", "predictions", "green"],
  "properties": {
    "predictions": {
      "type": "array",
      "items": {
        "type": "object",
        "properties": {
          "label": {"type": "string"},
          "probabilities": {"type": "object", "additionalProperties": {"type": "number"}},
          "value": {"type": ["number", "string", "null"]}
        }
      }
    }
  }
})"},
  };
  return docs;
}

}  // namespace

std::vector<std::string> schema_names() {
  std::vector<std::string> out;
  for (const auto& [name, doc] : documents()) out.push_back(name);
  return out;
}

Json schema(const std::string& name) {
  const auto& docs = documents();
  auto it = docs.find(name);
  if (it == docs.end()) fail(ErrorKind::kNotFound, "SCHEMA_NOT_FOUND", "no schema '" + name + "'");
  Json j = Json::parse(it->second);
  j["$schema"] = "https://json-schema.org/draft/2020-12/schema";
  j["$id"] = "/schemas/" + name;
  j["title"] = name;
  return j;
}

Json schema_index() {
  Json items = Json::array();
  for (const auto& name : schema_names()) items.push_back({{"name", name}, {"href", "/schemas/" + name}});
  return {{"schemas", items}};
}

}  // namespace deskml::service
