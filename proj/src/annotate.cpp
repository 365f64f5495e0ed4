#include "medsensor/annotate.hpp"

#include <algorithm>
#include <cmath>

#include "medsensor/errors.hpp"
#include "medsensor/rng.hpp"

namespace medsensor {

namespace {

std::size_t time_to_index(std::int64_t t_ms, double rate_hz, std::size_t n) {
  const double idx = static_cast<double>(t_ms) * rate_hz / 1000.0;
  const auto i = static_cast<std::int64_t>(std::llround(idx));
  return static_cast<std::size_t>(std::clamp<std::int64_t>(i, 0, static_cast<std::int64_t>(n)));
}

std::size_t seconds_to_samples(double s, double rate_hz) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(s * rate_hz)));
}

// Centered moving variance of acceleration magnitude, via prefix sums.
std::vector<double> moving_variance(const std::vector<AccelSample>& samples,
                                    std::size_t window) {
  const std::size_t n = samples.size();
  std::vector<double> mag(n), ps(n + 1, 0.0), ps2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = samples[i].x, y = samples[i].y, z = samples[i].z;
    mag[i] = std::sqrt(x * x + y * y + z * z);
    ps[i + 1] = ps[i] + mag[i];
    ps2[i + 1] = ps2[i] + mag[i] * mag[i];
  }
  const std::size_t half = window / 2;
  std::vector<double> var(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    const double cnt = static_cast<double>(hi - lo);
    const double mean = (ps[hi] - ps[lo]) / cnt;
    var[i] = std::max(0.0, (ps2[hi] - ps2[lo]) / cnt - mean * mean);
  }
  return var;
}

double range_variance(const std::vector<AccelSample>& samples, std::size_t lo,
                      std::size_t hi) {
  if (hi <= lo + 1) return 0.0;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double x = samples[i].x, y = samples[i].y, z = samples[i].z;
    const double m = std::sqrt(x * x + y * y + z * z);
    sum += m;
    sum2 += m * m;
  }
  const double cnt = static_cast<double>(hi - lo);
  const double mean = sum / cnt;
  return std::max(0.0, sum2 / cnt - mean * mean);
}

}  // namespace

PairingResult pair_marks(const std::vector<AnnotationMark>& marks, double rate_hz,
                         std::size_t sample_count) {
  PairingResult out;
  bool have_start = false;
  std::int64_t start_t = 0;
  for (const auto& m : marks) {
    if (m.kind == MarkKind::Start) {
      if (have_start)
        out.warnings.push_back({PairingWarning::DanglingStart, start_t});
      have_start = true;
      start_t = m.t_ms;
    } else {
      if (!have_start) {
        out.warnings.push_back({PairingWarning::DanglingEnd, m.t_ms});
        continue;
      }
      Span s;
      s.start_idx = time_to_index(start_t, rate_hz, sample_count);
      s.end_idx = time_to_index(m.t_ms, rate_hz, sample_count);
      if (s.end_idx > s.start_idx) out.spans.push_back(s);
      have_start = false;
    }
  }
  if (have_start) out.warnings.push_back({PairingWarning::DanglingStart, start_t});
  return out;
}

Span refine_span(const SampleSeries& series, const Span& raw,
                 const RefineParams& params) {
  const std::size_t n = series.samples.size();
  const double rate = series.rate_hz;
  const std::size_t w = seconds_to_samples(params.variance_window_s, rate);
  const std::size_t back = seconds_to_samples(params.search_back_s, rate);
  const std::size_t fwd = seconds_to_samples(params.search_fwd_s, rate);
  const std::size_t guard = seconds_to_samples(params.guard_trim_s, rate);

  const auto var = moving_variance(series.samples, w);

  const std::size_t start_lo = raw.start_idx > back ? raw.start_idx - back : 0;
  const std::size_t start_hi = std::min(n, raw.start_idx + fwd);
  const std::size_t end_lo = raw.end_idx > back ? raw.end_idx - back : 0;
  const std::size_t end_hi = std::min(n, raw.end_idx + fwd);

  // Baseline: the 2 s of quiet signal preceding the start search region.
  const std::size_t base_len = seconds_to_samples(2.0, rate);
  const std::size_t base_hi = start_lo;
  const std::size_t base_lo = base_hi > base_len ? base_hi - base_len : 0;
  double baseline = range_variance(series.samples, base_lo, base_hi);
  if (base_hi - base_lo < 4)
    baseline = range_variance(series.samples, 0, std::min(n, base_len));
  const double threshold = std::max(params.threshold_factor * baseline, 1e-12);

  auto in_guard = [&](std::size_t i) {
    const auto d1 = i > raw.start_idx ? i - raw.start_idx : raw.start_idx - i;
    const auto d2 = i > raw.end_idx ? i - raw.end_idx : raw.end_idx - i;
    return d1 < guard || d2 < guard;
  };

  std::size_t refined_start = n, refined_end = 0;
  for (std::size_t i = start_lo; i < start_hi; ++i) {
    if (in_guard(i)) continue;
    if (var[i] > threshold) {
      refined_start = i;
      break;
    }
  }
  for (std::size_t i = end_hi; i > end_lo; --i) {
    if (in_guard(i - 1)) continue;
    if (var[i - 1] > threshold) {
      refined_end = i;
      break;
    }
  }

  if (refined_start >= n || refined_end == 0 || refined_start >= refined_end)
    throw NoActivityFound();
  return Span{refined_start, refined_end};
}

ExtractResult extract_positives(const SampleSeries& series,
                                const std::vector<AnnotationMark>& marks,
                                GestureStyle style, const RefineParams& params) {
  ExtractResult out;
  const auto pairing = pair_marks(marks, series.rate_hz, series.samples.size());
  for (const auto& w : pairing.warnings) {
    out.warnings.push_back(
        std::string(w.kind == PairingWarning::DanglingStart ? "dangling START at "
                                                            : "dangling END at ") +
        std::to_string(w.t_ms) + " ms");
  }

  for (const auto& raw : pairing.spans) {
    Span span;
    try {
      span = refine_span(series, raw, params);
    } catch (const NoActivityFound&) {
      ++out.flagged;
      out.warnings.push_back("no activity found near span [" +
                             std::to_string(raw.start_idx) + ", " +
                             std::to_string(raw.end_idx) + ")");
      continue;
    }
    GestureSegment seg;
    seg.participant_id = series.participant_id;
    seg.session_id = series.session_id;
    seg.style = style;
    seg.label = Label::Medication;
    seg.samples.assign(series.samples.begin() + static_cast<std::ptrdiff_t>(span.start_idx),
                       series.samples.begin() + static_cast<std::ptrdiff_t>(span.end_idx));
    out.segments.push_back(std::move(seg));
    out.spans.push_back(span);
  }
  return out;
}

std::vector<GestureSegment> sample_negatives(
    const SampleSeries& series, const std::vector<Span>& positive_spans,
    std::size_t count, const std::function<std::size_t(std::uint64_t)>& length_sampler,
    std::uint64_t seed, GestureStyle style) {
  const std::size_t n = series.samples.size();

  // Free gaps: complement of the positive spans.
  std::vector<Span> sorted = positive_spans;
  std::sort(sorted.begin(), sorted.end(),
            [](const Span& a, const Span& b) { return a.start_idx < b.start_idx; });
  std::vector<Span> gaps;
  std::size_t cursor = 0;
  for (const auto& p : sorted) {
    if (p.start_idx > cursor) gaps.push_back({cursor, p.start_idx});
    cursor = std::max(cursor, p.end_idx);
  }
  if (cursor < n) gaps.push_back({cursor, n});

  Rng rng(seed);
  std::vector<GestureSegment> out;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t len = std::max<std::size_t>(1, length_sampler(rng.next_u64()));
    std::size_t total = 0;
    for (const auto& g : gaps)
      if (g.length() >= len) total += g.length() - len + 1;
    if (total == 0) break;  // space-constrained: return what fits

    std::size_t pick = rng.below(total);
    Span placed{};
    std::size_t gap_index = 0;
    for (std::size_t gi = 0; gi < gaps.size(); ++gi) {
      const auto& g = gaps[gi];
      if (g.length() < len) continue;
      const std::size_t positions = g.length() - len + 1;
      if (pick < positions) {
        placed = {g.start_idx + pick, g.start_idx + pick + len};
        gap_index = gi;
        break;
      }
      pick -= positions;
    }

    GestureSegment seg;
    seg.participant_id = series.participant_id;
    seg.session_id = series.session_id;
    seg.style = style;
    seg.label = Label::NonMedication;
    seg.samples.assign(series.samples.begin() + static_cast<std::ptrdiff_t>(placed.start_idx),
                       series.samples.begin() + static_cast<std::ptrdiff_t>(placed.end_idx));
    out.push_back(std::move(seg));

    // split the gap so negatives do not overlap each other either
    const Span g = gaps[gap_index];
    gaps.erase(gaps.begin() + static_cast<std::ptrdiff_t>(gap_index));
    if (placed.start_idx > g.start_idx)
      gaps.insert(gaps.begin() + static_cast<std::ptrdiff_t>(gap_index),
                  {g.start_idx, placed.start_idx});
    if (placed.end_idx < g.end_idx) gaps.push_back({placed.end_idx, g.end_idx});
    std::sort(gaps.begin(), gaps.end(),
              [](const Span& a, const Span& b) { return a.start_idx < b.start_idx; });
  }
  return out;
}

std::function<std::size_t(std::uint64_t)> empirical_length_sampler(
    std::vector<std::size_t> positive_lengths) {
  return [lengths = std::move(positive_lengths)](std::uint64_t u) -> std::size_t {
    if (lengths.empty()) return 1;
    return lengths[u % lengths.size()];
  };
}

}  // namespace medsensor
