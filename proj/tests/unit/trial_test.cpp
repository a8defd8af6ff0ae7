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

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <set>

#include "deskml/common/error.hpp"
#include "deskml/common/rng.hpp"
#include "deskml/data/dataset.hpp"
#include "deskml/data/synthetic.hpp"
#include "deskml/trial/config.hpp"
#include "deskml/trial/evolution.hpp"
#include "deskml/trial/genome.hpp"
#include "deskml/trial/pareto.hpp"
#include "deskml/trial/runner.hpp"
#include "support/oracles.hpp"

namespace deskml::trial {
namespace {

using testing::brute_force_fronts;
using testing::random_points;

// ---------------------------------------------------------------------------
// Pareto machinery

TEST(ParetoTest, SingleCandidateIsOneFront) {
  const std::vector<Objectives> pts{{0.3, 1.0}};
  EXPECT_EQ(nondominated_sort(pts), (std::vector<std::vector<std::size_t>>{{0}}));
}

TEST(ParetoTest, StrictDominationGivesTwoFronts) {
  const std::vector<Objectives> pts{{1, 1}, {2, 2}};
  EXPECT_EQ(nondominated_sort(pts), (std::vector<std::vector<std::size_t>>{{0}, {1}}));
}

TEST(ParetoTest, EmptyInputGivesNoFronts) { EXPECT_TRUE(nondominated_sort({}).empty()); }

TEST(ParetoTest, EqualVectorsDoNotDominate) {
  EXPECT_FALSE(dominates(std::vector<double>{1, 2}, std::vector<double>{1, 2}));
  EXPECT_TRUE(dominates(std::vector<double>{1, 2}, std::vector<double>{1, 3}));
}

TEST(ParetoTest, SixteenThreeObjectiveVectorsMatchBruteForce) {
  Rng rng(16);
  const auto pts = random_points(rng, 16, 3);
  EXPECT_EQ(nondominated_sort(pts), brute_force_fronts(pts));
}

TEST(ParetoProperty, FrontsMatchBruteForceOnRandomPopulations) {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 32));
    const auto m = static_cast<std::size_t>(rng.uniform_int(1, 3));
    const auto pts = random_points(rng, n, m, trial % 2 ? 4 : 50);
    ASSERT_EQ(nondominated_sort(pts), brute_force_fronts(pts)) << "population " << trial;
  }
}

TEST(CrowdingTest, BoundaryCases) {
  const std::vector<Objectives> pts{{0, 2}, {1, 1}, {2, 0}};
  const std::vector<std::size_t> one{1}, two{0, 2}, three{0, 1, 2};
  EXPECT_TRUE(std::isinf(crowding_distance(pts, one)[0]));
  const auto d2 = crowding_distance(pts, two);
  EXPECT_TRUE(std::isinf(d2[0]) && std::isinf(d2[1]));
  const auto d3 = crowding_distance(pts, three);
  EXPECT_TRUE(std::isinf(d3[0]));
  EXPECT_DOUBLE_EQ(d3[1], 2.0);
  EXPECT_TRUE(std::isinf(d3[2]));
}

TEST(CrowdingTest, ConstantObjectiveContributesNothing) {
  const std::vector<Objectives> pts{{0, 5}, {1, 5}, {3, 5}, {4, 5}};
  const std::vector<std::size_t> front{0, 1, 2, 3};
  const auto d = crowding_distance(pts, front);
  EXPECT_DOUBLE_EQ(d[1], 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(d[2], 3.0 / 4.0);
}

// Counts unit cells of the integer grid [0, ref) dominated by some point.
double grid_hypervolume(const std::vector<Objectives>& pts, const std::vector<double>& ref) {
  const auto m = ref.size();
  std::vector<int> cell(m, 0);
  double volume = 0.0;
  for (;;) {
    for (const auto& p : pts) {
      bool covered = true;
      for (std::size_t k = 0; k < m; ++k) covered = covered && p[k] <= cell[k];
      if (covered) {
        volume += 1.0;
        break;
      }
    }
    std::size_t k = 0;
    while (k < m && ++cell[k] >= static_cast<int>(ref[k])) cell[k++] = 0;
    if (k == m) break;
  }
  return volume;
}

TEST(HypervolumeTest, TwoPointExample) {
  const std::vector<Objectives> pts{{1, 2}, {2, 1}};
  EXPECT_DOUBLE_EQ(hypervolume(pts, std::vector<double>{3, 3}), 3.0);
}

TEST(HypervolumeProperty, MatchesGridCountOnIntegerPoints) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = static_cast<std::size_t>(rng.uniform_int(1, 3));
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 12));
    std::vector<Objectives> pts(n, Objectives(m));
    for (auto& p : pts) {
      for (auto& v : p) v = static_cast<double>(rng.uniform_int(0, 9));
    }
    const std::vector<double> ref(m, 8.0);
    ASSERT_DOUBLE_EQ(hypervolume(pts, ref), grid_hypervolume(pts, ref)) << "trial " << trial;
  }
}

TEST(HypervolumeTest, RejectsFourObjectives) {
  const std::vector<Objectives> pts{{1, 1, 1, 1}};
  EXPECT_THROW(hypervolume(pts, std::vector<double>{2, 2, 2, 2}), Error);
}

// ---------------------------------------------------------------------------
// Selection of the best member

TEST(SelectBestTest, SingleMember) {
  const std::vector<Objectives> f{{0.4, 2.0}};
  const std::vector<std::uint64_t> h{7};
  EXPECT_EQ(select_best(f, h), 0u);
}

TEST(SelectBestTest, PrimaryObjectiveDecides) {
  const std::vector<Objectives> f{{0.2, 9.0}, {0.3, 1.0}};
  const std::vector<std::uint64_t> h{2, 1};
  EXPECT_EQ(select_best(f, h), 0u);
}

TEST(SelectBestTest, SecondaryBreaksTies) {
  const std::vector<Objectives> f{{0.25, 3.0}, {0.25, 2.0}};
  const std::vector<std::uint64_t> h{1, 2};
  EXPECT_EQ(select_best(f, h), 1u);
}

TEST(SelectBestTest, HashBreaksFullTies) {
  const std::vector<Objectives> f{{0.25, 2.0}, {0.25, 2.0}};
  const std::vector<std::uint64_t> h{9, 3};
  EXPECT_EQ(select_best(f, h), 1u);
}

TEST(ScalingProperty, PositiveScalingKeepsFrontsAndBest) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = static_cast<std::size_t>(rng.uniform_int(1, 3));
    auto pts = random_points(rng, static_cast<std::size_t>(rng.uniform_int(1, 24)), m);
    std::vector<std::uint64_t> hashes;
    for (std::size_t i = 0; i < pts.size(); ++i) hashes.push_back(rng.next());
    const auto fronts = nondominated_sort(pts);
    std::vector<Objectives> front0;
    std::vector<std::uint64_t> h0;
    for (auto i : fronts[0]) {
      front0.push_back(pts[i]);
      h0.push_back(hashes[i]);
    }
    const auto best = select_best(front0, h0);

    const auto k = static_cast<std::size_t>(rng.index(m));
    const double c = rng.uniform(0.01, 100.0);
    for (auto& p : pts) p[k] *= c;
    ASSERT_EQ(nondominated_sort(pts), fronts);
    std::vector<Objectives> scaled;
    for (auto i : fronts[0]) scaled.push_back(pts[i]);
    ASSERT_EQ(select_best(scaled, h0), best);
  }
}

// ---------------------------------------------------------------------------
// Genomes and evolution

GenomeSpace classification_space() {
  return GenomeSpace{models::families_for(models::Task::kClassification), true, {}};
}

TEST(GenomeProperty, SamplesAreInSpaceAndRoundTrip) {
  const auto space = classification_space();
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto g = space.sample(rng);
    ASSERT_TRUE(space.contains(g));
    const auto back = genome_from_json(to_json(g));
    ASSERT_EQ(back, g);
    ASSERT_EQ(genome_hash(back), genome_hash(g));
  }
}

TEST(GenomeProperty, CrossoverAndMutationStayInSpace) {
  const auto space = classification_space();
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto a = space.sample(rng);
    const auto b = space.sample(rng);
    const auto [c, d] = space.crossover(a, b, rng);
    ASSERT_TRUE(space.contains(c));
    ASSERT_TRUE(space.contains(d));
    ASSERT_TRUE(space.contains(space.mutate(c, 1.0, rng)));
  }
}

TEST(GenomeTest, DisabledTogglesPinPipelineGenes) {
  GenomeSpace space = classification_space();
  space.toggles = SearchToggles{false, false, false, false, false};
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    auto g = space.mutate(space.sample(rng), 1.0, rng);
    ASSERT_EQ(*g.pipeline, PipelineGenes{});
  }
}

TEST(EvolutionTest, CrossoverOfClonesIsIdentity) {
  const auto space = classification_space();
  Rng rng(10);
  for (int i = 0; i < 50; ++i) {
    const auto a = space.sample(rng);
    const auto [c, d] = space.crossover(a, a, rng);
    ASSERT_EQ(c, a);
    ASSERT_EQ(d, a);
  }
}

TEST(EvolutionTest, ClonePopulationChangesOnlyThroughMutation) {
  const auto space = classification_space();
  Rng rng(11);
  const auto a = space.sample(rng);
  const std::vector<Genome> parents(8, a);
  const std::vector<Standing> standings(8, Standing{0, 1.0});
  const auto children = make_offspring(parents, standings, space, 8, rng);
  // Replaying the same draws with mutation disabled must give clones only.
  bool any_changed = false;
  for (const auto& c : children) any_changed = any_changed || !(c == a);
  EXPECT_TRUE(any_changed);
  Rng again(12);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(space.mutate(a, 0.0, again), a);
}

TEST(EvolutionTest, TournamentPrefersLowerRank) {
  const std::vector<Standing> s{{0, 0.1}, {3, DBL_MAX}};
  EXPECT_TRUE(better(s[0], s[1]));
  EXPECT_FALSE(better(s[1], s[0]));
  EXPECT_TRUE(better(Standing{1, 2.0}, Standing{1, 1.0}));
}

TEST(EvolutionTest, TournamentNeverPicksDominatedWhenBothDrawn) {
  // With many draws, member 1 can only win when drawn against itself (p = 1/4).
  const std::vector<Standing> s{{0, 0.1}, {3, DBL_MAX}};
  Rng rng(2);
  int wins1 = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) wins1 += tournament(s, rng) == 1;
  EXPECT_NEAR(static_cast<double>(wins1) / n, 0.25, 0.03);
}

TEST(EvolutionTest, TruncationKeepsEveryRankZeroMember) {
  Rng rng(20);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pool = random_points(rng, 16, 2, 20);
    std::vector<std::uint64_t> hashes;
    for (std::size_t i = 0; i < pool.size(); ++i) hashes.push_back(rng.next());
    const std::size_t mu = 8;
    const auto front0 = nondominated_sort(pool)[0];
    const auto kept = truncate(pool, hashes, mu);
    ASSERT_EQ(kept.size(), mu);
    if (front0.size() <= mu) {
      for (auto i : front0) ASSERT_NE(std::find(kept.begin(), kept.end(), i), kept.end());
    }
  }
}

TEST(EvolutionTest, OffspringDeterministicAndSized) {
  const auto space = classification_space();
  Rng seed_rng(21);
  std::vector<Genome> parents;
  for (int i = 0; i < 6; ++i) parents.push_back(space.sample(seed_rng));
  const auto standings = rank_population(random_points(seed_rng, 6, 2));
  Rng r1(77), r2(77);
  const auto a = make_offspring(parents, standings, space, 6, r1);
  const auto b = make_offspring(parents, standings, space, 6, r2);
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i], b[i]);
    EXPECT_TRUE(space.contains(a[i]));
  }
}

// ---------------------------------------------------------------------------
// Configuration and task inference

Json config_body(std::vector<std::string> objectives) {
  return Json{{"dataset_id", "ds-000001"}, {"target", "Churn"}, {"objectives", objectives}};
}

TEST(TrialConfigTest, FourObjectivesRejected) {
  try {
    trial_config_from_json(config_body({"loss", "training_time", "emissions", "explainability"}));
    FAIL() << "expected OBJECTIVE_LIMIT";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "OBJECTIVE_LIMIT");
    EXPECT_EQ(e.kind(), ErrorKind::kUnprocessable);
  }
}

TEST(TrialConfigTest, ZeroObjectivesRejected) {
  try {
    trial_config_from_json(config_body({}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "OBJECTIVE_LIMIT");
  }
}

TEST(TrialConfigTest, DuplicateAndUnknownObjectives) {
  try {
    trial_config_from_json(config_body({"loss", "log_loss"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "DUPLICATE_OBJECTIVE");
  }
  try {
    trial_config_from_json(config_body({"accuracy"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "UNKNOWN_OBJECTIVE");
  }
}

TEST(TrialConfigTest, SplitsAndBudgetValidated) {
  auto body = config_body({"loss"});
  body["split"] = {{"train", 0.5}, {"validation", 0.2}, {"test", 0.2}};
  EXPECT_THROW(trial_config_from_json(body), Error);
  body = config_body({"loss"});
  body["population"] = 1;
  EXPECT_THROW(trial_config_from_json(body), Error);
  body = config_body({"loss"});
  body["bogus"] = 1;
  EXPECT_THROW(trial_config_from_json(body), Error);
}

TEST(TrialConfigTest, DefaultsAndRoundTrip) {
  auto c = trial_config_from_json(config_body({"log_loss", "prediction_time"}));
  EXPECT_EQ(c.population, 16u);
  EXPECT_EQ(c.generations, 10u);
  EXPECT_DOUBLE_EQ(c.split.train, 0.6);
  EXPECT_EQ(c.loss_metric(models::Task::kClassification), LossMetric::kLogLoss);
  EXPECT_EQ(c.loss_metric(models::Task::kRegression), LossMetric::kRmse);
  const auto again = trial_config_from_json(to_json(c));
  EXPECT_EQ(to_json(again), to_json(c));
  EXPECT_EQ(trial_config_from_json(config_body({"loss"})).loss_metric(models::Task::kClassification),
            LossMetric::kOneMinusF1);
}

data::Table churn_table(std::size_t rows, std::uint64_t seed = 2023) {
  return data::ingest(data::synthetic_churn_csv(rows, seed), data::Format::kCsv, "churn").table;
}

data::Table small_table(const std::string& csv) { return data::ingest(csv, data::Format::kCsv, "t").table; }

TEST(InferTaskTest, ChurnIsClassification) {
  const auto t = churn_table(200);
  EXPECT_EQ(infer_task(t, "Churn", std::nullopt), models::Task::kClassification);
}

TEST(InferTaskTest, NumericTargets) {
  const auto t = small_table("date,price\n2024-01-01,3.5\n2024-01-02,4.5\n2024-01-03,2.5\n2024-01-04,7\n");
  EXPECT_EQ(infer_task(t, "price", std::nullopt), models::Task::kRegression);
  EXPECT_EQ(infer_task(t, "price", std::string("date")), models::Task::kForecasting);
  EXPECT_EQ(infer_task(t, "price", std::nullopt, models::Task::kClassification), models::Task::kClassification);
}

TEST(InferTaskTest, TextTargetNeedsOverride) {
  std::string csv = "id,x\n";
  for (int i = 0; i < 200; ++i) csv += "customer-" + std::to_string(i) + "," + std::to_string(i) + "\n";
  const auto t = small_table(csv);
  try {
    infer_task(t, "id", std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "TASK_OVERRIDE_REQUIRED");
  }
  EXPECT_EQ(infer_task(t, "id", std::nullopt, models::Task::kClassification), models::Task::kClassification);
  EXPECT_THROW(infer_task(t, "id", std::nullopt, models::Task::kRegression), Error);
  EXPECT_THROW(infer_task(t, "nope", std::nullopt), Error);
}

// ---------------------------------------------------------------------------
// Target preparation and splits

TEST(SplitTest, StratifiedDisjointAndComplete) {
  const auto t = churn_table(1000);
  TrialConfig c;
  c.target = "Churn";
  c.seed = 5;
  const auto target = prepare_target(t, "Churn", models::Task::kClassification);
  ASSERT_EQ(target.labels, (std::vector<std::string>{"No", "Yes"}));
  const auto s = make_splits(t, target, c);
  std::set<std::size_t> all;
  for (const auto* part : {&s.train, &s.validation, &s.test}) all.insert(part->begin(), part->end());
  EXPECT_EQ(all.size(), s.train.size() + s.validation.size() + s.test.size());
  EXPECT_EQ(all.size(), 1000u);
  auto positive_rate = [&](const std::vector<std::size_t>& rows) {
    double n = 0;
    for (auto r : rows) n += target.values[r];
    return n / static_cast<double>(rows.size());
  };
  EXPECT_NEAR(positive_rate(s.train), positive_rate(s.test), 0.01);
  EXPECT_NEAR(positive_rate(s.train), positive_rate(s.validation), 0.01);
  EXPECT_NEAR(static_cast<double>(s.train.size()), 600.0, 1.0);
}

TEST(SplitTest, ForecastingIsChronological) {
  std::string csv = "when,y\n";
  for (int d = 30; d >= 1; --d) csv += "2024-01-" + std::string(d < 10 ? "0" : "") + std::to_string(d) + "," + std::to_string(d * 2) + "\n";
  const auto t = small_table(csv);
  TrialConfig c;
  c.target = "y";
  c.datetime_index = "when";
  const auto target = prepare_target(t, "y", models::Task::kForecasting);
  const auto s = make_splits(t, target, c);
  ASSERT_EQ(s.train.size(), 18u);
  ASSERT_EQ(s.validation.size(), 6u);
  ASSERT_EQ(s.test.size(), 6u);
  EXPECT_EQ(target.values[s.train.front()], 2.0);
  EXPECT_EQ(target.values[s.test.back()], 60.0);
  EXPECT_LT(target.values[s.train.back()], target.values[s.validation.front()]);
}

TEST(SplitTest, TooFewRowsRejected) {
  const auto t = small_table("x,y\n1,2\n2,3\n");
  TrialConfig c;
  c.target = "y";
  const auto target = prepare_target(t, "y", models::Task::kRegression);
  EXPECT_THROW(make_splits(t, target, c), Error);
}

TEST(SplitTest, SplitsIgnoreFeatureCells) {
  const auto t = churn_table(400);
  TrialConfig c;
  c.target = "Churn";
  c.seed = 9;
  const auto target = prepare_target(t, "Churn", models::Task::kClassification);
  const auto s = make_splits(t, target, c);
  const auto noisy = testing::with_noise_rows(t, s.test, {"Churn"}, 1);
  const auto s2 = make_splits(noisy, prepare_target(noisy, "Churn", models::Task::kClassification), c);
  EXPECT_EQ(s.train, s2.train);
  EXPECT_EQ(s.test, s2.test);
}

// ---------------------------------------------------------------------------
// Whole trials

TrialConfig small_trial(std::vector<std::string> objectives, std::uint64_t seed = 42) {
  TrialConfig c;
  c.dataset_id = "ds-test";
  c.target = "Churn";
  c.objectives.clear();
  for (const auto& o : objectives) c.objectives.push_back(objective_from_name(o));
  c.population = 6;
  c.generations = 3;
  c.seed = seed;
  c.workers = 1;
  return c;
}

struct Recorded {
  TrialOutcome outcome;
  std::vector<TrialEvent> events;
  std::vector<Checkpoint> checkpoints;
};

Recorded record(const TrialConfig& c, const data::Table& t, std::optional<Checkpoint> resume = std::nullopt,
                std::function<bool()> cancel = nullptr) {
  Recorded rec;
  RunOptions o;
  o.trial_id = "tr-test";
  o.on_event = [&](const TrialEvent& e) { rec.events.push_back(e); };
  o.on_checkpoint = [&](const Checkpoint& cp) { rec.checkpoints.push_back(cp); };
  o.cancel_requested = std::move(cancel);
  o.resume = std::move(resume);
  rec.outcome = run_trial(c, t, o);
  return rec;
}

Json stable_view(const TrialResult& r) {
  auto j = to_json(r);
  j.erase("wall_seconds");
  return j;
}

class TrialRunTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { table_ = new data::Table(churn_table(700, 11)); }
  static void TearDownTestSuite() { delete table_; }
  static const data::Table& table() { return *table_; }

 private:
  static data::Table* table_;
};

data::Table* TrialRunTest::table_ = nullptr;

TEST_F(TrialRunTest, CompletesWithConsistentFront) {
  const auto rec = record(small_trial({"log_loss", "prediction_time"}), table());
  const auto& r = rec.outcome.result;
  ASSERT_EQ(r.status, TrialStatus::kCompleted) << r.error;
  ASSERT_FALSE(r.front.empty());
  ASSERT_TRUE(r.best.has_value());
  EXPECT_TRUE(std::any_of(r.front.begin(), r.front.end(), [&](const auto& m) { return m.candidate.id == *r.best; }));
  EXPECT_EQ(r.generations.size(), 3u);
  EXPECT_LE(r.evaluations, 6u * 3u);
  EXPECT_EQ(rec.outcome.artifacts.size(), r.front.size());
  for (const auto& m : r.front) {
    EXPECT_EQ(m.candidate.objectives.size(), 2u);
    EXPECT_EQ(m.reports.size(), 3u);
    EXPECT_EQ(m.reports.at(eval::Split::kTest).rows, r.test_rows);
  }
  // Front members are not dominated by anything evaluated.
  const auto& archive = rec.checkpoints.back().archive;
  EXPECT_EQ(archive.size(), r.evaluations);
  for (const auto& m : r.front) {
    for (const auto& a : archive) {
      if (a.ok) ASSERT_FALSE(testing::brute_dominates(a.objectives, m.candidate.objectives)) << a.id;
    }
  }
  // best minimises the primary objective over the front.
  double lowest = DBL_MAX;
  for (const auto& m : r.front) lowest = std::min(lowest, m.candidate.objectives[0]);
  for (const auto& m : r.front) {
    if (m.candidate.id == *r.best) EXPECT_EQ(m.candidate.objectives[0], lowest);
  }
}

TEST_F(TrialRunTest, EventLogReplaysCounts) {
  const auto rec = record(small_trial({"loss"}), table());
  const auto& r = rec.outcome.result;
  ASSERT_EQ(r.status, TrialStatus::kCompleted);
  ASSERT_FALSE(rec.events.empty());
  EXPECT_EQ(rec.events.front().kind, EventKind::kStarted);
  EXPECT_EQ(rec.events.back().kind, EventKind::kCompleted);
  std::size_t candidates = 0, generations = 0;
  for (const auto& e : rec.events) {
    candidates += e.kind == EventKind::kCandidateDone;
    generations += e.kind == EventKind::kGenerationDone;
  }
  EXPECT_EQ(candidates, r.evaluations);
  EXPECT_EQ(generations, r.generations.size());
}

TEST_F(TrialRunTest, SameSeedSameResult) {
  const auto c = small_trial({"loss", "training_time"}, 7);
  const auto a = record(c, table());
  const auto b = record(c, table());
  EXPECT_EQ(stable_view(a.outcome.result), stable_view(b.outcome.result));
  for (std::size_t i = 0; i < a.outcome.artifacts.size(); ++i) {
    EXPECT_EQ(models::to_json(a.outcome.artifacts[i].model), models::to_json(b.outcome.artifacts[i].model));
  }
}

TEST_F(TrialRunTest, SingleObjectiveBestNeverWorsens) {
  auto c = small_trial({"loss"}, 3);
  c.generations = 4;
  const auto r = record(c, table()).outcome.result;
  ASSERT_EQ(r.status, TrialStatus::kCompleted);
  for (std::size_t g = 1; g < r.generations.size(); ++g) {
    EXPECT_LE(r.generations[g].best_primary, r.generations[g - 1].best_primary);
  }
}

TEST_F(TrialRunTest, FrontHypervolumeNeverShrinks) {
  auto c = small_trial({"loss", "explainability"}, 4);
  c.generations = 4;
  const auto rec = record(c, table());
  ASSERT_EQ(rec.outcome.result.status, TrialStatus::kCompleted);
  const auto& archive = rec.checkpoints.back().archive;
  const std::vector<double> ref{1.0, 10.0};
  double previous = 0.0;
  for (const auto& snap : rec.outcome.result.generations) {
    std::vector<Objectives> pts;
    for (const auto& id : snap.front) {
      for (const auto& a : archive) {
        if (a.id == id) pts.push_back(a.objectives);
      }
    }
    const double hv = hypervolume(pts, ref);
    EXPECT_GE(hv, previous);
    previous = hv;
  }
  EXPECT_GT(previous, 0.0);
}

TEST_F(TrialRunTest, TestRowsDoNotInfluenceTheFront) {
  const auto c = small_trial({"loss", "prediction_time"}, 13);
  const auto base = record(c, table()).outcome.result;
  ASSERT_EQ(base.status, TrialStatus::kCompleted);
  const auto target = prepare_target(table(), "Churn", models::Task::kClassification);
  const auto splits = make_splits(table(), target, c);
  const auto noisy_table = testing::with_noise_rows(table(), splits.test, {"Churn"}, 99);
  const auto noisy = record(c, noisy_table).outcome.result;
  ASSERT_EQ(noisy.status, TrialStatus::kCompleted);
  ASSERT_EQ(base.front.size(), noisy.front.size());
  for (std::size_t i = 0; i < base.front.size(); ++i) {
    EXPECT_EQ(base.front[i].candidate.id, noisy.front[i].candidate.id);
    EXPECT_EQ(base.front[i].candidate.objectives, noisy.front[i].candidate.objectives);
  }
  EXPECT_EQ(base.best, noisy.best);
}

TEST_F(TrialRunTest, ResumeFromCheckpointMatchesUninterruptedRun) {
  const auto c = small_trial({"loss", "prediction_time"}, 17);
  const auto full = record(c, table());
  ASSERT_GE(full.checkpoints.size(), 2u);
  const auto cp = checkpoint_from_json(to_json(full.checkpoints[0]));
  const auto resumed = record(c, table(), cp);
  EXPECT_EQ(stable_view(full.outcome.result), stable_view(resumed.outcome.result));
}

TEST_F(TrialRunTest, CancellationKeepsPartialFront) {
  auto c = small_trial({"loss"}, 19);
  std::size_t seen = 0;
  Recorded rec;
  RunOptions o;
  o.on_event = [&](const TrialEvent& e) {
    rec.events.push_back(e);
    seen += e.kind == EventKind::kCandidateDone;
  };
  o.cancel_requested = [&] { return seen >= 8; };
  rec.outcome = run_trial(c, table(), o);
  const auto& r = rec.outcome.result;
  EXPECT_EQ(r.status, TrialStatus::kCancelled);
  EXPECT_EQ(rec.events.back().kind, EventKind::kCancelled);
  EXPECT_EQ(r.evaluations, 8u);
  EXPECT_EQ(r.generations.size(), 1u);
  EXPECT_FALSE(r.front.empty());
}

TEST_F(TrialRunTest, AllCandidatesFailing) {
  auto c = small_trial({"loss"});
  c.include = {"customerID"};
  c.generations = 1;
  const auto rec = record(c, table());
  EXPECT_EQ(rec.outcome.result.status, TrialStatus::kFailed);
  EXPECT_NE(rec.outcome.result.error.find("ALL_CANDIDATES_FAILED"), std::string::npos);
  EXPECT_EQ(rec.events.back().kind, EventKind::kFailed);
  EXPECT_TRUE(rec.outcome.result.front.empty());
}

TEST(TrialRunOther, RegressionTrial) {
  Rng rng(8);
  std::string csv = "a,b,colour,y\n";
  const char* colours[] = {"red", "green", "blue"};
  for (int i = 0; i < 300; ++i) {
    const double a = rng.normal(), b = rng.normal();
    const int k = static_cast<int>(rng.index(3));
    csv += std::to_string(a) + "," + std::to_string(b) + "," + colours[k] + "," +
           std::to_string(2 * a - b + k + rng.normal(0, 0.1)) + "\n";
  }
  const auto t = small_table(csv);
  TrialConfig c;
  c.target = "y";
  c.population = 4;
  c.generations = 2;
  c.workers = 2;
  const auto r = run_trial(c, t).result;
  ASSERT_EQ(r.status, TrialStatus::kCompleted) << r.error;
  EXPECT_EQ(r.task, models::Task::kRegression);
  ASSERT_TRUE(r.best.has_value());
  EXPECT_EQ(to_json(r).at("loss_metric"), "rmse");
}

TEST(TrialRunOther, ForecastingTrialUsesForecasters) {
  std::string csv = "day,sales\n";
  for (int d = 0; d < 90; ++d) {
    const int month = 1 + d / 30, day = 1 + d % 28;
    char date[16];
    std::snprintf(date, sizeof(date), "2024-%02d-%02d", month, day);
    csv += std::string(date) + "," + std::to_string(100 + d + 5 * (d % 7)) + "\n";
  }
  const auto t = small_table(csv);
  TrialConfig c;
  c.target = "sales";
  c.datetime_index = "day";
  c.population = 4;
  c.generations = 2;
  const auto out = run_trial(c, t);
  ASSERT_EQ(out.result.status, TrialStatus::kCompleted) << out.result.error;
  EXPECT_EQ(out.result.task, models::Task::kForecasting);
  for (const auto& m : out.result.front) EXPECT_TRUE(models::is_forecaster(m.candidate.genome.family));
  for (const auto& a : out.artifacts) EXPECT_FALSE(a.pipeline.has_value());
}

}  // namespace
}  // namespace deskml::trial
