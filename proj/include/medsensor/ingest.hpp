#pragma once

#include <string>
#include <vector>

#include "medsensor/types.hpp"
#include "medsensor/zipio.hpp"

namespace medsensor {

// Sensor CSV: header `timestamp_ms,x,y,z`, LF line endings, '.' decimal
// separator, no quoting. Annotation CSV: header `timestamp_ms,event` with
// event in {START, END}. Both formats are normative and bit-exact.

std::vector<AccelSample> parse_sensor_csv(const std::string& raw);
std::vector<AnnotationMark> parse_annotation_csv(const std::string& raw);

std::string serialize_sensor_csv(const std::vector<AccelSample>& samples);
std::string serialize_annotation_csv(const std::vector<AnnotationMark>& marks);

struct LoadedSession {
  SampleSeries series;
  std::vector<AnnotationMark> marks;
};

// Archive must contain exactly `sensor.csv` and `annotation.csv`; every mark
// must lie within the sampled time range.
LoadedSession load_session(const zipio::Bytes& archive,
                           const std::string& participant_id,
                           const std::string& session_id, double rate_hz = 25.0);

zipio::Bytes build_session_archive(const std::vector<AccelSample>& samples,
                                   const std::vector<AnnotationMark>& marks);

// Indexes `<root>/<participant>/<protocol|natural>/<session>.zip`.
// Unreadable archives are skipped and reported as warnings.
DatasetIndex scan_store(const std::string& root);

}  // namespace medsensor
