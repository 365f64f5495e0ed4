#include "medsensor/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "medsensor/errors.hpp"
#include "medsensor/ingest.hpp"
#include "medsensor/rng.hpp"
#include "medsensor/zipio.hpp"

namespace medsensor {

namespace {

struct SessionExtract {
  SampleSeries series;
  std::vector<Span> positive_spans;
  GestureStyle style = GestureStyle::Protocol;
  std::uint64_t negative_seed = 0;
  std::size_t positive_count = 0;
};

}  // namespace

PrepareResult prepare_store(const std::string& root, const PrepareOptions& options) {
  const auto index = scan_store(root);

  PrepareResult result;
  result.warnings = index.warnings;

  std::vector<GestureSegment> segments;
  std::vector<std::size_t> positive_lengths;
  std::vector<SessionExtract> pending;  // negatives sampled after lengths are known

  for (std::size_t p = 0; p < index.participants.size(); ++p) {
    const auto& participant = index.participants[p];
    for (std::size_t s = 0; s < participant.sessions.size(); ++s) {
      const auto& ref = participant.sessions[s];
      auto loaded = load_session(zipio::read_file(ref.archive_path),
                                 participant.participant_id, ref.session_id);
      auto extracted =
          extract_positives(loaded.series, loaded.marks, ref.style, options.refine);

      result.flagged += extracted.flagged;
      for (auto& w : extracted.warnings)
        result.warnings.push_back(participant.participant_id + "/" + ref.session_id +
                                  ": " + w);

      for (const auto& span : extracted.spans) positive_lengths.push_back(span.length());
      result.positives += extracted.segments.size();
      for (auto& seg : extracted.segments) segments.push_back(std::move(seg));

      SessionExtract pend;
      pend.positive_count = extracted.spans.size();
      pend.positive_spans = std::move(extracted.spans);
      pend.series = std::move(loaded.series);
      pend.style = ref.style;
      pend.negative_seed = derive_seed(options.seed, p, s);
      pending.push_back(std::move(pend));
    }
  }

  if (segments.empty()) throw EmptyDataset();

  const auto sampler = empirical_length_sampler(positive_lengths);
  for (const auto& pend : pending) {
    const auto want = static_cast<std::size_t>(std::llround(
        options.negative_ratio * static_cast<double>(pend.positive_count)));
    auto negatives = sample_negatives(pend.series, pend.positive_spans, want, sampler,
                                      pend.negative_seed, pend.style);
    result.negatives += negatives.size();
    for (auto& seg : negatives) segments.push_back(std::move(seg));
  }

  if (options.timesteps) {
    result.spec.timesteps = *options.timesteps;
  } else {
    result.spec = fit_window(segments);
  }
  result.spec.normalization = options.normalization;

  result.vectors.reserve(segments.size());
  for (const auto& seg : segments) result.vectors.push_back(vectorize(seg, result.spec));
  return result;
}

}  // namespace medsensor
