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

#include "deskml/trial/genome.hpp"

#include <algorithm>
#include <cmath>

#include "deskml/common/error.hpp"
#include "deskml/common/hash.hpp"
#include "deskml/models/hyperparams.hpp"

namespace deskml::trial {

using features::Encoder;
using features::GenOp;
using features::Imputation;
using features::Scaler;
using features::Selection;

Json to_json(const SearchToggles& t) {
  return {{"imputation", t.imputation},
          {"encoding", t.encoding},
          {"scaling", t.scaling},
          {"generation", t.generation},
          {"selection", t.selection}};
}

SearchToggles search_toggles_from_json(const Json& j) {
  SearchToggles t;
  if (j.is_null()) return t;
  if (!j.is_object()) fail(ErrorKind::kInvalidArgument, "INVALID_CONFIG", "pipeline_search must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_boolean()) fail(ErrorKind::kInvalidArgument, "INVALID_CONFIG", "pipeline_search." + key + " must be boolean");
    const bool v = value.get<bool>();
    if (key == "imputation") t.imputation = v;
    else if (key == "encoding") t.encoding = v;
    else if (key == "scaling") t.scaling = v;
    else if (key == "generation") t.generation = v;
    else if (key == "selection") t.selection = v;
    else fail(ErrorKind::kInvalidArgument, "INVALID_CONFIG", "unknown pipeline_search toggle '" + key + "'");
  }
  return t;
}

namespace {

constexpr std::array<GenOp, 4> kOps{GenOp::kAdd, GenOp::kSub, GenOp::kMul, GenOp::kDiv};

Json genes_to_json(const PipelineGenes& p) {
  Json ops = Json::array();
  for (std::size_t i = 0; i < kOps.size(); ++i) {
    if (p.ops[i]) ops.push_back(features::op_symbol(kOps[i]));
  }
  return {{"numeric_imputation", features::imputation_name(p.numeric_imputation)},
          {"categorical_imputation", features::imputation_name(p.categorical_imputation)},
          {"encoder", features::encoder_name(p.encoder)},
          {"scaler", features::scaler_name(p.scaler)},
          {"generation_ops", ops},
          {"max_generated", p.max_generated},
          {"selection", features::selection_name(p.selection)},
          {"select_k", p.select_k}};
}

PipelineGenes genes_from_json(const Json& j) {
  PipelineGenes p;
  p.numeric_imputation = features::imputation_from_name(j.at("numeric_imputation").get<std::string>());
  p.categorical_imputation = features::imputation_from_name(j.at("categorical_imputation").get<std::string>());
  p.encoder = features::encoder_from_name(j.at("encoder").get<std::string>());
  p.scaler = features::scaler_from_name(j.at("scaler").get<std::string>());
  for (const auto& s : j.at("generation_ops")) {
    const auto op = features::op_from_symbol(s.get<std::string>());
    p.ops[static_cast<std::size_t>(std::find(kOps.begin(), kOps.end(), op) - kOps.begin())] = true;
  }
  p.max_generated = j.at("max_generated").get<int>();
  p.selection = features::selection_from_name(j.at("selection").get<std::string>());
  p.select_k = j.at("select_k").get<int>();
  return p;
}

template <typename T, std::size_t N>
T pick(const std::array<T, N>& options, Rng& rng) {
  return options[rng.index(N)];
}

constexpr std::array kNumericImputations{Imputation::kMean, Imputation::kMedian, Imputation::kConstant};
constexpr std::array kCategoricalImputations{Imputation::kMode, Imputation::kConstant};
constexpr std::array kEncoders{Encoder::kOneHot, Encoder::kOrdinal};
constexpr std::array kScalers{Scaler::kNone, Scaler::kStandardize, Scaler::kMinMax};
constexpr std::array kSelections{Selection::kNone, Selection::kTopCorrelation, Selection::kTopMutualInfo};

// One gene of the pipeline block, resampled.
void resample_gene(PipelineGenes& p, int gene, const SearchToggles& t, Rng& rng) {
  switch (gene) {
    case 0: if (t.imputation) p.numeric_imputation = pick(kNumericImputations, rng); break;
    case 1: if (t.imputation) p.categorical_imputation = pick(kCategoricalImputations, rng); break;
    case 2: if (t.encoding) p.encoder = pick(kEncoders, rng); break;
    case 3: if (t.scaling) p.scaler = pick(kScalers, rng); break;
    case 4: case 5: case 6: case 7:
      if (t.generation) p.ops[static_cast<std::size_t>(gene - 4)] = rng.bernoulli(0.5);
      break;
    case 8: if (t.generation) p.max_generated = static_cast<int>(rng.uniform_int(0, kMaxGenerated)); break;
    case 9: if (t.selection) p.selection = pick(kSelections, rng); break;
    case 10: if (t.selection) p.select_k = static_cast<int>(rng.uniform_int(1, kMaxSelectK)); break;
    default: break;
  }
}

constexpr int kPipelineGenes = 11;

// Integer gene perturbation keeps at least one step so it can move.
int perturb_int(int v, int lo, int hi, Rng& rng) {
  const double step = std::max(1.0, 0.1 * (hi - lo));
  return static_cast<int>(std::clamp(std::lround(v + rng.uniform(-step, step)), long(lo), long(hi)));
}

void copy_gene(PipelineGenes& dst, const PipelineGenes& src, int gene) {
  switch (gene) {
    case 0: dst.numeric_imputation = src.numeric_imputation; break;
    case 1: dst.categorical_imputation = src.categorical_imputation; break;
    case 2: dst.encoder = src.encoder; break;
    case 3: dst.scaler = src.scaler; break;
    case 4: case 5: case 6: case 7: dst.ops[static_cast<std::size_t>(gene - 4)] = src.ops[static_cast<std::size_t>(gene - 4)]; break;
    case 8: dst.max_generated = src.max_generated; break;
    case 9: dst.selection = src.selection; break;
    case 10: dst.select_k = src.select_k; break;
    default: break;
  }
}

Json perturb_param(const models::ParamDescriptor& p, const Json& value, Rng& rng, const models::HyperparameterSpace& space) {
  using models::ParamKind;
  if (p.kind == ParamKind::kCategorical || p.kind == ParamKind::kBoolean) return space.sample_param(p, rng);
  const bool log = p.log_scale && p.lo > 0;
  const double lo = log ? std::log(p.lo) : p.lo;
  const double hi = log ? std::log(p.hi) : p.hi;
  double x = value.get<double>();
  if (log) x = std::log(x);
  const double width = 0.1 * (hi - lo);
  x = std::clamp(x + rng.uniform(-width, width), lo, hi);
  if (log) x = std::clamp(std::exp(x), p.lo, p.hi);
  if (p.kind == ParamKind::kInteger) {
    long v = std::lround(x);
    if (v == value.get<long>()) v += rng.bernoulli(0.5) ? 1 : -1;  // always move
    return std::clamp(v, static_cast<long>(p.lo), static_cast<long>(p.hi));
  }
  return x;
}

}  // namespace

Json to_json(const Genome& g) {
  return {{"family", models::family_name(g.family)},
          {"hyperparams", g.hyperparams},
          {"pipeline", g.pipeline ? genes_to_json(*g.pipeline) : Json(nullptr)}};
}

Genome genome_from_json(const Json& j) {
  Genome g;
  g.family = models::family_from_name(j.at("family").get<std::string>());
  g.hyperparams = models::search_space(g.family).resolve(j.at("hyperparams"));
  if (!j.at("pipeline").is_null()) g.pipeline = genes_from_json(j.at("pipeline"));
  return g;
}

std::uint64_t genome_hash(const Genome& g) { return fnv1a64(to_json(g).dump()); }

std::string genome_id(const Genome& g) { return hex64(genome_hash(g)); }

features::PipelineSpec pipeline_spec(const PipelineGenes& genes, const std::vector<std::string>& include) {
  features::PipelineSpec s;
  s.numeric_imputation = genes.numeric_imputation;
  s.categorical_imputation = genes.categorical_imputation;
  s.encoder = genes.encoder;
  s.scaler = genes.scaler;
  for (std::size_t i = 0; i < kOps.size(); ++i) {
    if (genes.ops[i]) s.generation_ops.push_back(kOps[i]);
  }
  s.max_generated = s.generation_ops.empty() ? 0 : static_cast<std::size_t>(genes.max_generated);
  s.selection = genes.selection;
  s.select_k = genes.selection == Selection::kNone ? 0 : static_cast<std::size_t>(genes.select_k);
  s.include = include;
  return s;
}

Genome GenomeSpace::sample_with_family(models::Family family, Rng& rng) const {
  Genome g;
  g.family = family;
  g.hyperparams = models::search_space(family).sample(rng);
  if (tabular) {
    PipelineGenes p;
    for (int gene = 0; gene < kPipelineGenes; ++gene) resample_gene(p, gene, toggles, rng);
    g.pipeline = p;
  }
  return g;
}

Genome GenomeSpace::sample(Rng& rng) const { return sample_with_family(families[rng.index(families.size())], rng); }

bool GenomeSpace::contains(const Genome& g) const {
  if (std::find(families.begin(), families.end(), g.family) == families.end()) return false;
  if (!models::search_space(g.family).contains(g.hyperparams)) return false;
  if (g.pipeline.has_value() != tabular) return false;
  if (!g.pipeline) return true;
  const auto& p = *g.pipeline;
  const PipelineGenes d;
  if (!toggles.imputation && (p.numeric_imputation != d.numeric_imputation || p.categorical_imputation != d.categorical_imputation)) return false;
  if (!toggles.encoding && p.encoder != d.encoder) return false;
  if (!toggles.scaling && p.scaler != d.scaler) return false;
  if (!toggles.generation && (p.ops != d.ops || p.max_generated != d.max_generated)) return false;
  if (!toggles.selection && (p.selection != d.selection || p.select_k != d.select_k)) return false;
  return p.max_generated >= 0 && p.max_generated <= kMaxGenerated && p.select_k >= 1 && p.select_k <= kMaxSelectK &&
         p.numeric_imputation != Imputation::kMode && p.categorical_imputation != Imputation::kMean &&
         p.categorical_imputation != Imputation::kMedian;
}

std::pair<Genome, Genome> GenomeSpace::crossover(const Genome& a, const Genome& b, Rng& rng) const {
  Genome c1 = a, c2 = b;
  if (a.family == b.family) {
    for (const auto& p : models::search_space(a.family).params()) {
      if (rng.bernoulli(0.5)) std::swap(c1.hyperparams[p.name], c2.hyperparams[p.name]);
    }
  } else if (rng.bernoulli(0.5)) {
    std::swap(c1.family, c2.family);
    std::swap(c1.hyperparams, c2.hyperparams);
  }
  if (a.pipeline && b.pipeline) {
    for (int gene = 0; gene < kPipelineGenes; ++gene) {
      if (rng.bernoulli(0.5)) {
        copy_gene(*c1.pipeline, *b.pipeline, gene);
        copy_gene(*c2.pipeline, *a.pipeline, gene);
      }
    }
  }
  return {std::move(c1), std::move(c2)};
}

Genome GenomeSpace::mutate(const Genome& g, double rate, Rng& rng) const {
  Genome out = g;
  if (families.size() > 1 && rng.bernoulli(rate)) {
    out.family = families[rng.index(families.size())];
    if (out.family != g.family) out.hyperparams = models::search_space(out.family).sample(rng);
  }
  if (out.family == g.family) {
    const auto& space = models::search_space(out.family);
    for (const auto& p : space.params()) {
      if (rng.bernoulli(rate)) out.hyperparams[p.name] = perturb_param(p, out.hyperparams.at(p.name), rng, space);
    }
  }
  if (out.pipeline) {
    auto& p = *out.pipeline;
    for (int gene = 0; gene < kPipelineGenes; ++gene) {
      if (!rng.bernoulli(rate)) continue;
      if (gene == 8 && toggles.generation) {
        p.max_generated = perturb_int(p.max_generated, 0, kMaxGenerated, rng);
      } else if (gene == 10 && toggles.selection) {
        p.select_k = perturb_int(p.select_k, 1, kMaxSelectK, rng);
      } else {
        resample_gene(p, gene, toggles, rng);
      }
    }
  }
  return out;
}

}  // namespace deskml::trial
