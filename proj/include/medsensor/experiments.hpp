#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "medsensor/mlp.hpp"
#include "medsensor/window.hpp"

namespace medsensor {

struct SweepSpec {
  std::vector<std::size_t> hidden_sizes = {10, 20, 30, 40, 50,
                                           60, 70, 80, 90, 100};
  std::size_t repeats = 1;
};

struct Fold {
  VectorRefs train;
  VectorRefs test;
  std::string held_out_participant;  // empty for random splits
};

struct FoldResult {
  std::size_t fold_index = 0;
  std::string held_out_participant;
  std::size_t hidden_size = 0;
  std::size_t repeat = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  bool failed = false;
};

struct ExperimentReport {
  std::string experiment_id;  // EXP1 / EXP2 / EXP3
  std::vector<FoldResult> rows;

  bool any_failed() const {
    for (const auto& r : rows)
      if (r.failed) return true;
    return false;
  }
};

// |train| = round(ratio * N); disjoint and exhaustive; deterministic.
std::pair<VectorRefs, VectorRefs> split_random(const std::vector<FeatureVector>& vectors,
                                               double ratio, std::uint64_t seed);

// One fold per participant, ordered by sorted participant id. The optional
// style filter restricts the dataset first (Exp2 uses PROTOCOL only).
std::vector<Fold> lopo_folds(const std::vector<FeatureVector>& vectors,
                             std::optional<GestureStyle> style_filter);

// Per held-out participant k: train = all PROTOCOL vectors (k included) +
// everyone else's NATURAL; test = k's NATURAL vectors.
std::vector<Fold> exp3_folds(const std::vector<FeatureVector>& vectors);

struct SweepCell {
  std::size_t fold_index;
  std::size_t hidden_size;
  std::size_t repeat;
};

// Deterministic cell enumeration in (fold, hidden, repeat) order; the per-cell
// seed is derived from (master seed, fold index, hidden size, repeat).
std::vector<SweepCell> sweep_plan(std::size_t fold_count, const SweepSpec& sweep);

// Trains one model per cell on a bounded worker pool. Failures are isolated
// per cell; rows come back in plan order regardless of completion order.
ExperimentReport run_sweep(const std::string& experiment_id,
                           const std::vector<Fold>& folds, const SweepSpec& sweep,
                           const TrainConfig& config, std::size_t jobs = 0);

ExperimentReport run_exp1(const std::vector<FeatureVector>& dataset,
                          const SweepSpec& sweep, const TrainConfig& config,
                          double ratio = 0.8, std::size_t jobs = 0);
ExperimentReport run_exp2(const std::vector<FeatureVector>& dataset,
                          const SweepSpec& sweep, const TrainConfig& config,
                          std::size_t jobs = 0);
ExperimentReport run_exp3(const std::vector<FeatureVector>& dataset,
                          const SweepSpec& sweep, const TrainConfig& config,
                          std::size_t jobs = 0);

// Report surfaces: raw rows, recomputed summaries, and an aligned-column
// text rendering of the result tables.
std::string detail_csv(const ExperimentReport& report);
std::string summary_csv(const ExperimentReport& report);
std::string table_text(const ExperimentReport& report);

}  // namespace medsensor
