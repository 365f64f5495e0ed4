#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace medsensor {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MalformedHeader : Error {
  explicit MalformedHeader(const std::string& got)
      : Error("malformed header: '" + got + "'") {}
};

struct NonNumericField : Error {
  std::size_t row;
  NonNumericField(std::size_t row_, const std::string& field)
      : Error("non-numeric field '" + field + "' at row " + std::to_string(row_)),
        row(row_) {}
};

struct NonMonotonicTimestamp : Error {
  std::size_t row;
  explicit NonMonotonicTimestamp(std::size_t row_)
      : Error("non-monotonic timestamp at row " + std::to_string(row_)), row(row_) {}
};

struct UnknownEvent : Error {
  std::size_t row;
  UnknownEvent(std::size_t row_, const std::string& event)
      : Error("unknown event '" + event + "' at row " + std::to_string(row_)),
        row(row_) {}
};

struct MissingEntry : Error {
  explicit MissingEntry(const std::string& name)
      : Error("missing zip entry: " + name) {}
};

struct ExtraEntry : Error {
  explicit ExtraEntry(const std::string& name)
      : Error("unexpected zip entry: " + name) {}
};

struct MarkOutOfRange : Error {
  std::int64_t t_ms;
  explicit MarkOutOfRange(std::int64_t t)
      : Error("annotation mark at " + std::to_string(t) +
              " ms lies outside the sampled range"),
        t_ms(t) {}
};

struct ShapeMismatch : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

struct EmptyInput : Error {
  using Error::Error;
};

struct EmptyDataset : Error {
  EmptyDataset() : Error("empty dataset") {}
};

struct NoActivityFound : Error {
  NoActivityFound() : Error("moving variance never crossed the threshold") {}
};

struct TooFewSamples : Error {
  using Error::Error;
};

struct SingleParticipant : Error {
  SingleParticipant() : Error("leave-one-participant-out needs >= 2 participants") {}
};

struct MissingStyle : Error {
  std::string participant_id;
  MissingStyle(std::string participant, const std::string& style)
      : Error("participant " + participant + " has no " + style + " vectors"),
        participant_id(std::move(participant)) {}
};

struct IoFailure : Error {
  explicit IoFailure(const std::string& path) : Error("io failure: " + path) {}
};

struct UnknownGesture : Error {
  using Error::Error;
};

}  // namespace medsensor
