#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "medsensor/annotate.hpp"
#include "medsensor/window.hpp"

namespace medsensor {

// Store-to-dataset options: boundary refinement, negative harvesting ratio,
// and the window layout (fit to the longest segment unless pinned).
struct PrepareOptions {
  RefineParams refine;
  double negative_ratio = 1.0;  // negatives sampled per positive, per session
  std::optional<std::size_t> timesteps;
  Normalization normalization = Normalization::PerWindowZscore;
  std::uint64_t seed = 0;
};

struct PrepareResult {
  WindowSpec spec;
  std::vector<FeatureVector> vectors;  // positives first, then negatives
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t flagged = 0;  // marked pairs where refinement found no activity
  std::vector<std::string> warnings;
};

// Full ingestion pipeline: scan the store, load every session, refine marks,
// extract positives, sample negatives from the unannotated gaps, vectorize.
// Throws EmptyDataset when no usable gesture exists.
PrepareResult prepare_store(const std::string& root, const PrepareOptions& options);

}  // namespace medsensor
