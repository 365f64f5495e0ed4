#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "medsensor/types.hpp"

namespace medsensor {

// Boundary refinement parameters. The raw START/END marks carry human jitter
// plus the button-press motion itself; boundaries are re-detected by moving
// variance of acceleration magnitude against a pre-gesture baseline.
struct RefineParams {
  double variance_window_s = 1.0;
  double threshold_factor = 3.0;   // c: trigger at c * baseline variance
  double search_back_s = 2.0;
  double search_fwd_s = 5.0;
  double guard_trim_s = 0.5;       // excluded around each raw mark
};

struct PairingWarning {
  enum Kind { DanglingStart, DanglingEnd } kind;
  std::int64_t t_ms;
};

struct PairingResult {
  std::vector<Span> spans;  // in time order, pairwise disjoint
  std::vector<PairingWarning> warnings;
};

// Greedy pairing: each START with the next END. Unpaired marks are reported,
// remaining pairs still returned. Mark times are converted to sample indices
// at the series rate.
PairingResult pair_marks(const std::vector<AnnotationMark>& marks, double rate_hz,
                         std::size_t sample_count);

// Snaps span boundaries to the first/last moving-variance threshold crossing
// inside [start - search_back, end + search_fwd], skipping guard_trim_s around
// the raw marks. Throws NoActivityFound when the threshold is never crossed.
Span refine_span(const SampleSeries& series, const Span& raw,
                 const RefineParams& params);

struct ExtractResult {
  std::vector<GestureSegment> segments;
  std::vector<Span> spans;  // refined span per segment, aligned with segments
  std::size_t flagged = 0;  // pairs where no activity was found
  std::vector<std::string> warnings;
};

ExtractResult extract_positives(const SampleSeries& series,
                                const std::vector<AnnotationMark>& marks,
                                GestureStyle style, const RefineParams& params);

// Draws `count` non-overlapping NON_MEDICATION segments from the unannotated
// regions. Lengths come from `length_sampler` (typically the empirical
// positive-length distribution). Deterministic under seed; returns fewer than
// `count` segments when space runs out.
std::vector<GestureSegment> sample_negatives(
    const SampleSeries& series, const std::vector<Span>& positive_spans,
    std::size_t count, const std::function<std::size_t(std::uint64_t)>& length_sampler,
    std::uint64_t seed, GestureStyle style);

// Length sampler drawing uniformly from observed positive lengths.
std::function<std::size_t(std::uint64_t)> empirical_length_sampler(
    std::vector<std::size_t> positive_lengths);

}  // namespace medsensor
