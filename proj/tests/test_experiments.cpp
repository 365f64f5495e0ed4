#include <algorithm>
#include <set>

#include "doctest.h"
#include "medsensor/errors.hpp"
#include "medsensor/experiments.hpp"
#include "medsensor/rng.hpp"

using namespace medsensor;

namespace {

std::vector<FeatureVector> toy_dataset(std::size_t participants,
                                       std::size_t protocol_each,
                                       std::size_t natural_each, std::uint64_t seed,
                                       std::size_t width = 6) {
  Rng rng(seed);
  std::vector<FeatureVector> out;
  for (std::size_t p = 0; p < participants; ++p) {
    const std::string pid = "p" + std::to_string(p + 10);
    for (std::size_t i = 0; i < protocol_each + natural_each; ++i) {
      FeatureVector v;
      v.participant_id = pid;
      v.style = i < protocol_each ? GestureStyle::Protocol : GestureStyle::Natural;
      v.label = i % 2 ? Label::Medication : Label::NonMedication;
      // separable toy signal: positives shifted by +2
      const double offset = v.label == Label::Medication ? 2.0 : -2.0;
      for (std::size_t j = 0; j < width; ++j)
        v.values.push_back(static_cast<float>(offset + 0.3 * rng.normal()));
      out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("split_random sizes, partition, determinism") {
  const auto data = toy_dataset(1, 10, 0, 1);
  const auto [train, test] = split_random(data, 0.8, 42);
  CHECK(train.size() == 8);
  CHECK(test.size() == 2);

  std::set<const FeatureVector*> seen;
  for (const auto* v : train) seen.insert(v);
  for (const auto* v : test) seen.insert(v);
  CHECK(seen.size() == 10);  // disjoint and exhaustive

  const auto [t2, s2] = split_random(data, 0.8, 42);
  CHECK(t2 == train);
  CHECK(s2 == test);

  const auto two = toy_dataset(1, 2, 0, 2);
  const auto [a, b] = split_random(two, 0.5, 1);
  CHECK(a.size() == 1);
  CHECK(b.size() == 1);

  const std::vector<FeatureVector> one(1);
  CHECK_THROWS_AS(split_random(one, 0.5, 1), TooFewSamples);
}

TEST_CASE("split_random partitions correctly across 100 seeds") {
  const auto data = toy_dataset(3, 7, 0, 3);
  const auto n = data.size();
  const auto want_train = static_cast<std::size_t>(std::llround(0.8 * n));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto [train, test] = split_random(data, 0.8, seed);
    CHECK(train.size() == want_train);
    CHECK(train.size() + test.size() == n);
    std::set<const FeatureVector*> seen(train.begin(), train.end());
    for (const auto* v : test) CHECK(!seen.count(v));
  }
}

TEST_CASE("lopo_folds partitions by participant") {
  const auto data = toy_dataset(3, 5, 0, 4);
  const auto folds = lopo_folds(data, GestureStyle::Protocol);
  REQUIRE(folds.size() == 3);

  std::set<const FeatureVector*> all_test;
  std::vector<std::string> order;
  for (const auto& f : folds) {
    CHECK(f.test.size() == 5);
    CHECK(f.train.size() == 10);
    order.push_back(f.held_out_participant);
    for (const auto* v : f.test) {
      CHECK(v->participant_id == f.held_out_participant);
      all_test.insert(v);
    }
    for (const auto* v : f.train) CHECK(v->participant_id != f.held_out_participant);
  }
  CHECK(all_test.size() == data.size());  // union of test sets == dataset
  CHECK(std::is_sorted(order.begin(), order.end()));

  const auto single = toy_dataset(1, 5, 0, 5);
  CHECK_THROWS_AS(lopo_folds(single, GestureStyle::Protocol), SingleParticipant);
}

TEST_CASE("exp3_folds composition and leakage contract") {
  const auto data = toy_dataset(3, 4, 2, 6);
  const auto folds = exp3_folds(data);
  REQUIRE(folds.size() == 3);
  for (const auto& f : folds) {
    CHECK(f.train.size() == 16);  // 12 protocol + 4 natural of others
    CHECK(f.test.size() == 2);
    for (const auto* v : f.test) {
      CHECK(v->style == GestureStyle::Natural);
      CHECK(v->participant_id == f.held_out_participant);
    }
    for (const auto* v : f.train) {
      const bool own_natural = v->style == GestureStyle::Natural &&
                               v->participant_id == f.held_out_participant;
      CHECK(!own_natural);
    }
  }

  const auto no_natural = toy_dataset(3, 4, 0, 7);
  CHECK_THROWS_AS(exp3_folds(no_natural), MissingStyle);
}

TEST_CASE("sweep_plan counts cells") {
  SweepSpec sweep;
  CHECK(sweep_plan(31, sweep).size() == 310);
  sweep.hidden_sizes = {4};
  sweep.repeats = 3;
  CHECK(sweep_plan(2, sweep).size() == 6);
}

TEST_CASE("run_sweep produces rows in plan order with summaries recomputable") {
  const auto data = toy_dataset(3, 8, 0, 8);
  const auto folds = lopo_folds(data, GestureStyle::Protocol);
  SweepSpec sweep;
  sweep.hidden_sizes = {4, 8};
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.learning_rate = 0.02;
  cfg.seed = 9;

  const auto report = run_sweep("EXP2", folds, sweep, cfg, 2);
  REQUIRE(report.rows.size() == 6);
  CHECK(!report.any_failed());
  // plan order: fold-major, then hidden
  CHECK(report.rows[0].fold_index == 0);
  CHECK(report.rows[0].hidden_size == 4);
  CHECK(report.rows[1].hidden_size == 8);
  CHECK(report.rows[2].fold_index == 1);

  // summary max/min/mean must equal recomputation from detail rows
  const auto csv = summary_csv(report);
  CHECK(csv.find("participant_avg") != std::string::npos);
  CHECK(csv.find("architecture") != std::string::npos);

  // deterministic rerun regardless of job count
  const auto again = run_sweep("EXP2", folds, sweep, cfg, 1);
  REQUIRE(again.rows.size() == report.rows.size());
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    CHECK(again.rows[i].train_accuracy == report.rows[i].train_accuracy);
    CHECK(again.rows[i].test_accuracy == report.rows[i].test_accuracy);
  }
}

TEST_CASE("run_exp1 layout: repeats x hidden sizes, summary footer present") {
  const auto data = toy_dataset(4, 6, 0, 10);
  SweepSpec sweep;
  sweep.hidden_sizes = {4, 8};
  sweep.repeats = 3;
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.learning_rate = 0.02;
  cfg.seed = 11;

  const auto report = run_exp1(data, sweep, cfg, 0.8, 2);
  CHECK(report.experiment_id == "EXP1");
  CHECK(report.rows.size() == 6);  // 3 splits x 2 sizes
  const auto text = table_text(report);
  CHECK(text.find("Max") != std::string::npos);
  CHECK(text.find("Min") != std::string::npos);
  CHECK(text.find("Average") != std::string::npos);

  std::vector<FeatureVector> natural = toy_dataset(2, 0, 3, 12);
  CHECK_THROWS(run_exp1(natural, sweep, cfg, 0.8, 1));
}

TEST_CASE("run_exp3 reports train/test sizes per participant") {
  const auto data = toy_dataset(3, 6, 3, 13);
  SweepSpec sweep;
  sweep.hidden_sizes = {4};
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.learning_rate = 0.02;
  cfg.seed = 14;

  const auto report = run_exp3(data, sweep, cfg, 2);
  CHECK(report.rows.size() == 3);
  for (const auto& r : report.rows) {
    CHECK(r.train_size == 24);  // 18 protocol + 6 natural of others
    CHECK(r.test_size == 3);
  }
  const auto text = table_text(report);
  CHECK(text.find("Train Size") != std::string::npos);
}

TEST_CASE("per-cell failures are isolated") {
  // a fold whose training set has inconsistent widths fails, others succeed
  auto data = toy_dataset(2, 4, 0, 15);
  std::vector<Fold> folds = lopo_folds(data, GestureStyle::Protocol);
  FeatureVector bad;
  bad.participant_id = folds[0].held_out_participant;
  bad.values = {1.0f};  // wrong width
  folds[0].train.push_back(&bad);

  SweepSpec sweep;
  sweep.hidden_sizes = {4};
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 16;
  const auto report = run_sweep("EXP2", folds, sweep, cfg, 1);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].failed);
  CHECK(!report.rows[1].failed);
  CHECK(report.any_failed());
}
