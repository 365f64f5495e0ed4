#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace medsensor {

// One accelerometer reading. Components are stored as 32-bit floats so that
// CSV serialization with 9 significant digits round-trips bit-exactly.
struct AccelSample {
  std::int64_t t_ms = 0;
  float x = 0.0f, y = 0.0f, z = 0.0f;

  bool operator==(const AccelSample&) const = default;
};

enum class MarkKind { Start, End };

struct AnnotationMark {
  std::int64_t t_ms = 0;
  MarkKind kind = MarkKind::Start;

  bool operator==(const AnnotationMark&) const = default;
};

enum class GestureStyle { Protocol, Natural };
enum class Label { NonMedication = 0, Medication = 1 };

inline const char* to_string(GestureStyle s) {
  return s == GestureStyle::Protocol ? "protocol" : "natural";
}
inline const char* to_string(Label l) {
  return l == Label::Medication ? "medication" : "non_medication";
}

// Timestamped tri-axial stream for one recording session.
struct SampleSeries {
  std::string participant_id;
  std::string session_id;
  double rate_hz = 25.0;
  std::vector<AccelSample> samples;
};

// Half-open index range [start_idx, end_idx) into a SampleSeries.
struct Span {
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;

  std::size_t length() const { return end_idx - start_idx; }
  bool overlaps(const Span& o) const {
    return start_idx < o.end_idx && o.start_idx < end_idx;
  }
  bool operator==(const Span&) const = default;
};

// A labeled contiguous slice of a session.
struct GestureSegment {
  std::string participant_id;
  std::string session_id;
  GestureStyle style = GestureStyle::Protocol;
  Label label = Label::Medication;
  std::vector<AccelSample> samples;
};

struct SessionRef {
  std::string session_id;
  GestureStyle style = GestureStyle::Protocol;
  std::string archive_path;
};

struct ParticipantRecord {
  std::string participant_id;
  std::vector<SessionRef> sessions;
};

struct DatasetIndex {
  std::vector<ParticipantRecord> participants;
  std::vector<std::string> warnings;

  std::size_t session_count() const {
    std::size_t n = 0;
    for (const auto& p : participants) n += p.sessions.size();
    return n;
  }
};

}  // namespace medsensor
