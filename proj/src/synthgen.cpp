#include "medsensor/synthgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "medsensor/errors.hpp"
#include "medsensor/ingest.hpp"
#include "medsensor/rng.hpp"

namespace fs = std::filesystem;

namespace medsensor::synthgen {

namespace {

constexpr double kGravity = 9.81;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Shared motif skeleton; participants perturb these, which keeps gestures
// recognizable across participants while giving each a signature.
constexpr double kBaseDuration[5] = {4.0, 3.6, 4.2, 4.8, 3.8};
constexpr double kBaseAmp[5] = {2.6, 2.2, 3.0, 2.4, 2.5};
constexpr double kBaseFreq[5] = {1.6, 1.2, 1.9, 1.0, 1.4};
constexpr double kBaseOffset[5][3] = {{1.2, -0.8, 0.5},
                                      {-0.9, 1.1, -0.6},
                                      {1.5, 0.9, -1.0},
                                      {-1.2, -1.4, 0.8},
                                      {0.8, 1.3, -0.4}};

double step_value(const StepSignature& step, int axis, double tau) {
  double v = step.offset[static_cast<std::size_t>(axis)];
  for (const auto& c : step.components[static_cast<std::size_t>(axis)])
    v += c.amp * std::sin(kTwoPi * c.freq_hz * tau + c.phase) * std::exp(-c.damp * tau);
  return v;
}

// quiet wrist: barely-moving baseline
double idle_value(int axis, double t) {
  const double phase[3] = {0.0, 1.3, 2.1};
  return 0.05 * std::sin(kTwoPi * 0.25 * t + phase[axis]);
}

struct StepPlacement {
  const StepSignature* step;
  double start_s;
  double duration_s;
};

}  // namespace

ParticipantSignature gen_participant(std::uint64_t participant_seed,
                                     double noise_sigma) {
  Rng rng(participant_seed);
  ParticipantSignature sig;
  sig.seed = participant_seed;
  sig.noise_sigma = noise_sigma;

  for (std::size_t k = 0; k < 5; ++k) {
    StepSignature& step = sig.steps[k];
    step.duration_s = kBaseDuration[k] * rng.uniform(0.9, 1.1);
    const double amp_scale = rng.uniform(0.85, 1.15);
    const double freq_scale = rng.uniform(0.9, 1.1);
    for (int a = 0; a < 3; ++a) {
      step.offset[static_cast<std::size_t>(a)] =
          kBaseOffset[k][a] * rng.uniform(0.85, 1.15);
      // phases share a per-step/axis base so the motif stays recognizable
      // across participants; each participant only shifts them slightly
      const double base_phase = 0.7 * double(k) + 2.1 * double(a);
      auto& comps = step.components[static_cast<std::size_t>(a)];
      comps.push_back({kBaseAmp[k] * amp_scale, kBaseFreq[k] * freq_scale,
                       base_phase + rng.uniform(-0.5, 0.5),
                       rng.uniform(0.05, 0.15)});
      comps.push_back({0.5 * kBaseAmp[k] * amp_scale, 2.1 * kBaseFreq[k] * freq_scale,
                       base_phase + 1.1 + rng.uniform(-0.5, 0.5),
                       rng.uniform(0.1, 0.25)});
    }
  }

  // habitual deviation from the protocol order: one adjacent swap
  {
    const std::size_t at = rng.below(4);
    std::swap(sig.natural_order[at], sig.natural_order[at + 1]);
  }
  sig.natural_time_jitter = rng.uniform(0.05, 0.10);
  return sig;
}

Gesture gen_gesture(const ParticipantSignature& sig, MotifStyle style,
                    std::uint64_t session_seed, double rate_hz) {
  Rng rng(session_seed);

  std::vector<StepPlacement> plan;
  StepSignature drink;  // storage for the modified confounder step
  double total_s = 0.0;

  switch (style) {
    case MotifStyle::Protocol: {
      double t = 0.0;
      for (const auto& step : sig.steps) {
        plan.push_back({&step, t, step.duration_s});
        t += step.duration_s;
      }
      total_s = t;
      break;
    }
    case MotifStyle::Natural: {
      // natural order = the participant's habitual order; per-gesture
      // variation comes from step dropout and timing jitter
      std::array<std::size_t, 5> order = sig.natural_order;
      // the dropped step is chosen per gesture, not per participant, so every
      // (order, dropped-step) combination occurs across a population
      int dropped = -1;
      if (rng.uniform() < 0.5) {
        static constexpr std::size_t kDroppable[3] = {0, 1, 4};
        dropped = static_cast<int>(kDroppable[rng.below(3)]);
      }
      double t = 0.0;
      for (std::size_t k : order) {
        if (static_cast<int>(k) == dropped) continue;
        const double d =
            sig.steps[k].duration_s *
            rng.uniform(1.0 - sig.natural_time_jitter, 1.0 + sig.natural_time_jitter);
        plan.push_back({&sig.steps[k], t, d});
        t += d;
      }
      total_s = t;
      break;
    }
    case MotifStyle::NegativeDrink: {
      total_s = rng.uniform(15.0, 25.0);
      // casual sip: the drink step, but slower and weaker than in the protocol
      drink = sig.steps[3];
      for (auto& axis : drink.components)
        for (auto& c : axis) {
          c.amp *= 0.75;
          c.freq_hz *= 0.7;
        }
      const double d = drink.duration_s * rng.uniform(1.2, 1.5);
      const double at = rng.uniform(2.0, total_s - d - 2.0);
      plan.push_back({&drink, at, d});
      break;
    }
    case MotifStyle::NegativeIdle:
      total_s = rng.uniform(15.0, 25.0);
      break;
  }

  // keep gestures in the 15-25 s band regardless of jitter
  if (style == MotifStyle::Protocol || style == MotifStyle::Natural) {
    const double clamped = std::clamp(total_s, 15.0, 25.0);
    if (clamped != total_s) {
      const double scale = clamped / total_s;
      for (auto& p : plan) {
        p.start_s *= scale;
        p.duration_s *= scale;
      }
      total_s = clamped;
    }
  }

  const auto n = static_cast<std::size_t>(std::llround(total_s * rate_hz));
  Gesture g;
  g.samples.resize(n);
  g.active = {0, n};

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    double v[3];
    for (int a = 0; a < 3; ++a) v[a] = idle_value(a, t);
    for (const auto& p : plan) {
      if (t >= p.start_s && t < p.start_s + p.duration_s) {
        const double tau = t - p.start_s;
        for (int a = 0; a < 3; ++a) v[a] = step_value(*p.step, a, tau);
        break;
      }
    }
    if (style == MotifStyle::NegativeIdle)
      for (int a = 0; a < 3; ++a) v[a] = 0.12 * std::sin(kTwoPi * 0.3 * t + a * 1.1);

    AccelSample& s = g.samples[i];
    s.t_ms = static_cast<std::int64_t>(std::llround(t * 1000.0));
    s.x = static_cast<float>(v[0] + sig.noise_sigma * rng.normal());
    s.y = static_cast<float>(v[1] + sig.noise_sigma * rng.normal());
    s.z = static_cast<float>(v[2] + kGravity + sig.noise_sigma * rng.normal());
  }
  return g;
}

namespace {

void append_idle(std::vector<AccelSample>& out, double duration_s, double rate_hz,
                 double sigma, Rng& rng) {
  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
  const std::int64_t dt = static_cast<std::int64_t>(std::llround(1000.0 / rate_hz));
  std::int64_t t = out.empty() ? 0 : out.back().t_ms + dt;
  for (std::size_t i = 0; i < n; ++i, t += dt) {
    const double ts = static_cast<double>(t) / 1000.0;
    AccelSample s;
    s.t_ms = t;
    s.x = static_cast<float>(idle_value(0, ts) + sigma * rng.normal());
    s.y = static_cast<float>(idle_value(1, ts) + sigma * rng.normal());
    s.z = static_cast<float>(idle_value(2, ts) + kGravity + sigma * rng.normal());
    out.push_back(s);
  }
}

Span append_gesture(std::vector<AccelSample>& out, const Gesture& g, double rate_hz) {
  const std::int64_t dt = static_cast<std::int64_t>(std::llround(1000.0 / rate_hz));
  const std::size_t begin = out.size();
  std::int64_t t = out.empty() ? 0 : out.back().t_ms + dt;
  for (const auto& src : g.samples) {
    AccelSample s = src;
    s.t_ms = t;
    out.push_back(s);
    t += dt;
  }
  return {begin, out.size()};
}

// 0.3 s high-amplitude burst: the motion of pressing the watch button.
void inject_spike(std::vector<AccelSample>& samples, std::size_t at_idx,
                  double rate_hz) {
  const auto len = static_cast<std::size_t>(std::llround(0.3 * rate_hz));
  for (std::size_t i = 0; i < len && at_idx + i < samples.size(); ++i) {
    const double tau = static_cast<double>(i) / rate_hz;
    const double burst = 5.0 * std::sin(kTwoPi * 4.0 * tau);
    samples[at_idx + i].x += static_cast<float>(burst);
    samples[at_idx + i].y += static_cast<float>(0.6 * burst);
  }
}

std::string pad_id(const char* prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%s%02zu", prefix, i + 1);
  return buf;
}

}  // namespace

SessionData gen_session(const ParticipantSignature& sig, const std::string& pid,
                        const std::string& sid, GestureStyle style,
                        std::uint64_t session_seed, const StoreConfig& config) {
  const double rate = config.rate_hz;
  const std::int64_t dt = static_cast<std::int64_t>(std::llround(1000.0 / rate));
  Rng srng(session_seed);

  SessionData out;
  std::vector<Span> positives;
  std::vector<Span> confounders;

  append_idle(out.samples, srng.uniform(8.0, 12.0), rate, config.noise_sigma, srng);
  for (std::size_t g = 0; g < config.gestures_per_session; ++g) {
    const auto gesture = gen_gesture(
        sig,
        style == GestureStyle::Protocol ? MotifStyle::Protocol : MotifStyle::Natural,
        derive_seed(session_seed, g, 7), rate);
    positives.push_back(append_gesture(out.samples, gesture, rate));
    // long enough that 1:1 negative sampling always finds room in the gaps
    append_idle(out.samples, srng.uniform(34.0, 42.0), rate, config.noise_sigma, srng);
    if (srng.uniform() < 0.5) {
      const auto drink = gen_gesture(sig, MotifStyle::NegativeDrink,
                                     derive_seed(session_seed, g, 11), rate);
      confounders.push_back(append_gesture(out.samples, drink, rate));
      append_idle(out.samples, srng.uniform(6.0, 10.0), rate, config.noise_sigma,
                  srng);
    }
  }

  const std::int64_t last_t = out.samples.back().t_ms;
  for (const auto& span : positives) {
    const std::int64_t true_start = out.samples[span.start_idx].t_ms;
    const std::int64_t true_end = out.samples[span.end_idx - 1].t_ms + dt;
    out.entries.push_back({pid, sid, style, true_start, true_end, Label::Medication});

    const double jmax = config.mark_jitter_max_s * 1000.0;
    auto jitter = [&] {
      return static_cast<std::int64_t>(std::llround(srng.uniform(-jmax, jmax)));
    };
    std::int64_t ms = std::clamp<std::int64_t>(true_start + jitter(), 0, last_t);
    std::int64_t me = std::clamp<std::int64_t>(true_end + jitter(), 0, last_t);
    if (me <= ms) me = std::min(last_t, ms + dt);
    out.marks.push_back({ms, MarkKind::Start});
    out.marks.push_back({me, MarkKind::End});
  }
  for (const auto& span : confounders) {
    out.entries.push_back({pid, sid, style, out.samples[span.start_idx].t_ms,
                           out.samples[span.end_idx - 1].t_ms + dt,
                           Label::NonMedication});
  }

  std::sort(out.marks.begin(), out.marks.end(),
            [](const AnnotationMark& a, const AnnotationMark& b) {
              return a.t_ms < b.t_ms;
            });
  for (const auto& m : out.marks)
    inject_spike(out.samples, static_cast<std::size_t>(m.t_ms / dt), rate);
  return out;
}

GroundTruth gen_store(const std::string& root, const StoreConfig& config) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoFailure(root);

  GroundTruth gt;
  for (std::size_t p = 0; p < config.participants; ++p) {
    const std::string pid = pad_id("p", p);
    const auto sig = gen_participant(derive_seed(config.master_seed, p),
                                     config.noise_sigma);

    for (GestureStyle style : {GestureStyle::Protocol, GestureStyle::Natural}) {
      const std::uint64_t style_tag = style == GestureStyle::Protocol ? 0 : 1;
      const fs::path dir = fs::path(root) / pid / to_string(style);
      fs::create_directories(dir, ec);
      if (ec) throw IoFailure(dir.string());

      for (std::size_t sess = 0; sess < config.sessions_per_style; ++sess) {
        const std::string sid = pad_id("s", sess);
        const auto session = gen_session(
            sig, pid, sid, style, derive_seed(config.master_seed, p, style_tag, sess),
            config);
        gt.entries.insert(gt.entries.end(), session.entries.begin(),
                          session.entries.end());
        const auto archive = build_session_archive(session.samples, session.marks);
        zipio::write_file((dir / (sid + ".zip")).string(), archive);
      }
    }
  }

  const std::string csv = serialize_ground_truth(gt);
  std::ofstream f(fs::path(root) / "ground_truth.csv", std::ios::trunc);
  if (!f) throw IoFailure(root + "/ground_truth.csv");
  f << csv;
  return gt;
}

std::string serialize_ground_truth(const GroundTruth& gt) {
  std::string out = "participant,session,style,start_ms,end_ms,label\n";
  for (const auto& e : gt.entries) {
    out += e.participant_id + ',' + e.session_id + ',' + to_string(e.style) + ',' +
           std::to_string(e.start_ms) + ',' + std::to_string(e.end_ms) + ',' +
           to_string(e.label) + '\n';
  }
  return out;
}

GroundTruth parse_ground_truth(const std::string& csv) {
  GroundTruth gt;
  std::size_t pos = csv.find('\n');
  if (pos == std::string::npos) throw Error("ground truth: missing header");
  ++pos;
  while (pos < csv.size()) {
    std::size_t nl = csv.find('\n', pos);
    if (nl == std::string::npos) nl = csv.size();
    const std::string_view line(csv.data() + pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;

    std::array<std::string_view, 6> fields;
    std::size_t f = 0, start = 0;
    for (std::size_t i = 0; i <= line.size() && f < 6; ++i) {
      if (i == line.size() || line[i] == ',') {
        fields[f++] = line.substr(start, i - start);
        start = i + 1;
      }
    }
    if (f != 6) throw Error("ground truth: malformed row");

    GroundTruthEntry e;
    e.participant_id = std::string(fields[0]);
    e.session_id = std::string(fields[1]);
    e.style = fields[2] == "protocol" ? GestureStyle::Protocol : GestureStyle::Natural;
    std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), e.start_ms);
    std::from_chars(fields[4].data(), fields[4].data() + fields[4].size(), e.end_ms);
    e.label = fields[5] == "medication" ? Label::Medication : Label::NonMedication;
    gt.entries.push_back(std::move(e));
  }
  return gt;
}

}  // namespace medsensor::synthgen
