#include "medsensor/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "medsensor/errors.hpp"

namespace fs = std::filesystem;

namespace medsensor {

namespace {

// Splits on LF; a trailing newline does not produce an empty last line.
std::vector<std::string_view> split_lines(const std::string& raw) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    if (nl == std::string::npos) {
      lines.emplace_back(raw.data() + pos, raw.size() - pos);
      break;
    }
    lines.emplace_back(raw.data() + pos, nl - pos);
    pos = nl + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return fields;
}

template <typename T>
T parse_number(std::string_view s, std::size_t row) {
  T value{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw NonNumericField(row, std::string(s));
  return value;
}

std::string format_float(float v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(v));
  return buf;
}

}  // namespace

std::vector<AccelSample> parse_sensor_csv(const std::string& raw) {
  const auto lines = split_lines(raw);
  if (lines.empty() || lines[0] != "timestamp_ms,x,y,z")
    throw MalformedHeader(lines.empty() ? "" : std::string(lines[0]));

  std::vector<AccelSample> samples;
  samples.reserve(lines.size() > 0 ? lines.size() - 1 : 0);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t row = i + 1;  // 1-based file line number
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 4) throw NonNumericField(row, std::string(lines[i]));
    AccelSample s;
    s.t_ms = parse_number<std::int64_t>(fields[0], row);
    s.x = parse_number<float>(fields[1], row);
    s.y = parse_number<float>(fields[2], row);
    s.z = parse_number<float>(fields[3], row);
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z))
      throw NonNumericField(row, std::string(lines[i]));
    if (!samples.empty() && s.t_ms <= samples.back().t_ms)
      throw NonMonotonicTimestamp(row);
    samples.push_back(s);
  }
  return samples;
}

std::vector<AnnotationMark> parse_annotation_csv(const std::string& raw) {
  const auto lines = split_lines(raw);
  if (lines.empty() || lines[0] != "timestamp_ms,event")
    throw MalformedHeader(lines.empty() ? "" : std::string(lines[0]));

  std::vector<AnnotationMark> marks;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t row = i + 1;
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 2) throw UnknownEvent(row, std::string(lines[i]));
    AnnotationMark m;
    m.t_ms = parse_number<std::int64_t>(fields[0], row);
    if (fields[1] == "START")
      m.kind = MarkKind::Start;
    else if (fields[1] == "END")
      m.kind = MarkKind::End;
    else
      throw UnknownEvent(row, std::string(fields[1]));
    marks.push_back(m);
  }
  return marks;
}

std::string serialize_sensor_csv(const std::vector<AccelSample>& samples) {
  std::string out = "timestamp_ms,x,y,z\n";
  for (const auto& s : samples) {
    out += std::to_string(s.t_ms);
    out += ',';
    out += format_float(s.x);
    out += ',';
    out += format_float(s.y);
    out += ',';
    out += format_float(s.z);
    out += '\n';
  }
  return out;
}

std::string serialize_annotation_csv(const std::vector<AnnotationMark>& marks) {
  std::string out = "timestamp_ms,event\n";
  for (const auto& m : marks) {
    out += std::to_string(m.t_ms);
    out += m.kind == MarkKind::Start ? ",START\n" : ",END\n";
  }
  return out;
}

LoadedSession load_session(const zipio::Bytes& archive,
                           const std::string& participant_id,
                           const std::string& session_id, double rate_hz) {
  auto entries = zipio::read_archive(archive);
  for (const auto& [name, _] : entries)
    if (name != "sensor.csv" && name != "annotation.csv") throw ExtraEntry(name);
  if (!entries.count("sensor.csv")) throw MissingEntry("sensor.csv");
  if (!entries.count("annotation.csv")) throw MissingEntry("annotation.csv");

  const auto& sb = entries["sensor.csv"];
  const auto& ab = entries["annotation.csv"];

  LoadedSession out;
  out.series.participant_id = participant_id;
  out.series.session_id = session_id;
  out.series.rate_hz = rate_hz;
  out.series.samples = parse_sensor_csv(std::string(sb.begin(), sb.end()));
  out.marks = parse_annotation_csv(std::string(ab.begin(), ab.end()));

  if (!out.series.samples.empty()) {
    const auto lo = out.series.samples.front().t_ms;
    const auto hi = out.series.samples.back().t_ms;
    for (const auto& m : out.marks)
      if (m.t_ms < lo || m.t_ms > hi) throw MarkOutOfRange(m.t_ms);
  } else if (!out.marks.empty()) {
    throw MarkOutOfRange(out.marks.front().t_ms);
  }
  return out;
}

zipio::Bytes build_session_archive(const std::vector<AccelSample>& samples,
                                   const std::vector<AnnotationMark>& marks) {
  const std::string sensor = serialize_sensor_csv(samples);
  const std::string anno = serialize_annotation_csv(marks);
  return zipio::write_archive(
      {{"sensor.csv", zipio::Bytes(sensor.begin(), sensor.end())},
       {"annotation.csv", zipio::Bytes(anno.begin(), anno.end())}});
}

DatasetIndex scan_store(const std::string& root) {
  if (!fs::exists(root)) throw IoFailure(root);

  DatasetIndex index;
  std::vector<fs::path> participant_dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) participant_dirs.push_back(e.path());
  std::sort(participant_dirs.begin(), participant_dirs.end());

  for (const auto& pdir : participant_dirs) {
    ParticipantRecord rec;
    rec.participant_id = pdir.filename().string();
    for (GestureStyle style : {GestureStyle::Protocol, GestureStyle::Natural}) {
      const fs::path sdir = pdir / to_string(style);
      if (!fs::exists(sdir)) continue;
      std::vector<fs::path> zips;
      for (const auto& e : fs::directory_iterator(sdir))
        if (e.is_regular_file() && e.path().extension() == ".zip")
          zips.push_back(e.path());
      std::sort(zips.begin(), zips.end());
      for (const auto& zp : zips) {
        try {
          zipio::read_archive(zipio::read_file(zp.string()));
        } catch (const Error& err) {
          index.warnings.push_back("unreadable archive " + zp.string() + ": " +
                                   err.what());
          continue;
        }
        rec.sessions.push_back({zp.stem().string(), style, zp.string()});
      }
    }
    if (!rec.sessions.empty() || fs::is_directory(pdir))
      index.participants.push_back(std::move(rec));
  }
  return index;
}

}  // namespace medsensor
