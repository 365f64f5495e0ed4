#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "medsensor/types.hpp"

namespace medsensor::synthgen {

// One damped sinusoid of a motif.
struct MotifComponent {
  double amp = 0.0;      // m/s^2
  double freq_hz = 0.0;
  double phase = 0.0;
  double damp = 0.0;     // 1/s
};

// One of the five protocol steps: a per-axis orientation offset plus a couple
// of damped sinusoids per axis.
struct StepSignature {
  double duration_s = 3.0;
  std::array<double, 3> offset{};
  std::array<std::vector<MotifComponent>, 3> components;
};

enum class MotifStyle { Protocol, Natural, NegativeDrink, NegativeIdle };

struct ParticipantSignature {
  std::uint64_t seed = 0;
  std::array<StepSignature, 5> steps;
  std::array<std::size_t, 5> natural_order{0, 1, 2, 3, 4};
  double natural_time_jitter = 0.15;  // fractional per-gesture duration jitter
  double noise_sigma = 0.3;           // m/s^2
};

struct GroundTruthEntry {
  std::string participant_id;
  std::string session_id;
  GestureStyle style = GestureStyle::Protocol;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  Label label = Label::Medication;
};

struct GroundTruth {
  std::vector<GroundTruthEntry> entries;
};

struct StoreConfig {
  std::size_t participants = 12;
  std::size_t sessions_per_style = 4;
  std::size_t gestures_per_session = 5;
  std::uint64_t master_seed = 0;
  double noise_sigma = 0.3;
  double rate_hz = 25.0;
  double mark_jitter_max_s = 0.8;  // raw marks drift up to this from truth
};

ParticipantSignature gen_participant(std::uint64_t participant_seed,
                                     double noise_sigma = 0.3);

struct Gesture {
  std::vector<AccelSample> samples;  // t_ms starts at 0
  Span active;                        // sample range of actual motion
};

// Deterministic waveform from the signature (plus session-seeded noise and,
// for NATURAL, per-gesture timing jitter).
Gesture gen_gesture(const ParticipantSignature& sig, MotifStyle style,
                    std::uint64_t session_seed, double rate_hz = 25.0);

struct SessionData {
  std::vector<AccelSample> samples;
  std::vector<AnnotationMark> marks;
  std::vector<GroundTruthEntry> entries;
};

// One full session: idle gaps, marked gestures, occasional drink confounders,
// jittered marks with button-press spikes.
SessionData gen_session(const ParticipantSignature& sig, const std::string& pid,
                        const std::string& sid, GestureStyle style,
                        std::uint64_t session_seed, const StoreConfig& config);

// Writes <root>/<participant>/<protocol|natural>/<session>.zip plus
// ground_truth.csv, and returns the exact truth. Annotation marks are the
// true spans perturbed by up to mark_jitter_max_s, and a 0.3 s button-press
// spike is injected into the signal at each raw mark.
GroundTruth gen_store(const std::string& root, const StoreConfig& config);

std::string serialize_ground_truth(const GroundTruth& gt);
GroundTruth parse_ground_truth(const std::string& csv);

}  // namespace medsensor::synthgen
