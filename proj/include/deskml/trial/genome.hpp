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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "deskml/common/json.hpp"
#include "deskml/common/rng.hpp"
#include "deskml/features/pipeline.hpp"
#include "deskml/models/family.hpp"

namespace deskml::trial {

/// Which pipeline dimensions the search may vary; disabled ones stay at their
/// defaults.
struct SearchToggles {
  bool imputation = true;
  bool encoding = true;
  bool scaling = true;
  bool generation = true;
  bool selection = true;

  friend bool operator==(const SearchToggles&, const SearchToggles&) = default;
};

Json to_json(const SearchToggles& t);
SearchToggles search_toggles_from_json(const Json& j);

inline constexpr int kMaxGenerated = 10;
inline constexpr int kMaxSelectK = 30;

struct PipelineGenes {
  features::Imputation numeric_imputation = features::Imputation::kMean;
  features::Imputation categorical_imputation = features::Imputation::kMode;
  features::Encoder encoder = features::Encoder::kOneHot;
  features::Scaler scaler = features::Scaler::kNone;
  std::array<bool, 4> ops{};  // +, -, *, /
  int max_generated = 0;
  features::Selection selection = features::Selection::kNone;
  int select_k = kMaxSelectK;

  friend bool operator==(const PipelineGenes&, const PipelineGenes&) = default;
};

struct Genome {
  models::Family family = models::Family::kLogisticRegression;
  Json hyperparams = Json::object();
  std::optional<PipelineGenes> pipeline;  // absent for forecasters

  friend bool operator==(const Genome& a, const Genome& b) {
    return a.family == b.family && a.hyperparams == b.hyperparams && a.pipeline == b.pipeline;
  }
};

Json to_json(const Genome& g);
Genome genome_from_json(const Json& j);

/// FNV-1a over the canonical JSON form.
std::uint64_t genome_hash(const Genome& g);
std::string genome_id(const Genome& g);

features::PipelineSpec pipeline_spec(const PipelineGenes& genes, const std::vector<std::string>& include);

/// The searchable space of one trial.
struct GenomeSpace {
  std::vector<models::Family> families;  // non-empty
  bool tabular = true;
  SearchToggles toggles;

  Genome sample(Rng& rng) const;
  Genome sample_with_family(models::Family family, Rng& rng) const;
  bool contains(const Genome& g) const;

  /// Uniform crossover: each gene from either parent with equal odds. Parents
  /// sharing a family also mix hyperparameters per parameter; otherwise the
  /// family and its hyperparameters travel together. Returns both children.
  std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, Rng& rng) const;

  /// Per-gene mutation with probability `rate`. Real and integer genes move by
  /// up to 10% of their range (log space for log-scaled ones) and are clamped;
  /// categorical and boolean genes are resampled. A mutated family resamples
  /// its hyperparameters.
  Genome mutate(const Genome& g, double rate, Rng& rng) const;
};

}  // namespace deskml::trial
