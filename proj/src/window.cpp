#include "medsensor/window.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "medsensor/errors.hpp"

namespace medsensor {

FeatureVector vectorize(const GestureSegment& segment, const WindowSpec& spec) {
  if (segment.samples.empty()) throw EmptyInput("vectorize: empty segment");
  const std::size_t w = spec.timesteps;

  // Padding/cropping decision first, then normalization over real samples.
  std::size_t src_begin = 0;
  std::size_t real = segment.samples.size();
  if (real > w) {
    src_begin = (real - w) / 2;  // center crop
    real = w;
  }

  FeatureVector out;
  out.label = segment.label;
  out.participant_id = segment.participant_id;
  out.style = segment.style;
  out.values.assign(3 * w, 0.0f);

  double mean[3] = {0, 0, 0}, sq[3] = {0, 0, 0};
  for (std::size_t i = 0; i < real; ++i) {
    const auto& s = segment.samples[src_begin + i];
    const double v[3] = {s.x, s.y, s.z};
    for (int a = 0; a < 3; ++a) {
      mean[a] += v[a];
      sq[a] += v[a] * v[a];
    }
  }
  double scale[3] = {1, 1, 1}, shift[3] = {0, 0, 0};
  if (spec.normalization == Normalization::PerWindowZscore) {
    for (int a = 0; a < 3; ++a) {
      mean[a] /= static_cast<double>(real);
      const double var = sq[a] / static_cast<double>(real) - mean[a] * mean[a];
      const double sd = var > 0 ? std::sqrt(var) : 0.0;
      shift[a] = mean[a];
      scale[a] = sd > 0 ? 1.0 / sd : 0.0;  // constant axis -> zeros
    }
  }

  for (std::size_t i = 0; i < real; ++i) {
    const auto& s = segment.samples[src_begin + i];
    const double v[3] = {s.x, s.y, s.z};
    for (int a = 0; a < 3; ++a)
      out.values[3 * i + static_cast<std::size_t>(a)] =
          static_cast<float>((v[a] - shift[a]) * scale[a]);
  }
  return out;
}

WindowSpec fit_window(const std::vector<GestureSegment>& segments) {
  if (segments.empty()) throw EmptyDataset();
  std::size_t w = 0;
  for (const auto& s : segments) w = std::max(w, s.samples.size());
  WindowSpec spec;
  spec.timesteps = w;
  return spec;
}

namespace {

constexpr char kMagic[4] = {'M', 'S', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;

void put32(std::ofstream& f, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  f.write(reinterpret_cast<char*>(b), 4);
}
std::uint32_t get32(std::ifstream& f) {
  unsigned char b[4];
  f.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

static_assert(sizeof(float) == 4);

}  // namespace

void save_dataset(const std::string& path, const WindowSpec& spec,
                  const std::vector<FeatureVector>& vectors) {
  std::vector<std::string> names;
  for (const auto& v : vectors)
    if (std::find(names.begin(), names.end(), v.participant_id) == names.end())
      names.push_back(v.participant_id);
  std::sort(names.begin(), names.end());

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure(path);
  f.write(kMagic, 4);
  put32(f, kVersion);
  put32(f, static_cast<std::uint32_t>(spec.timesteps));
  put32(f, static_cast<std::uint32_t>(vectors.size()));
  put32(f, static_cast<std::uint32_t>(spec.normalization));
  put32(f, static_cast<std::uint32_t>(names.size()));
  for (const auto& n : names) {
    put32(f, static_cast<std::uint32_t>(n.size()));
    f.write(n.data(), static_cast<std::streamsize>(n.size()));
  }
  for (const auto& v : vectors) {
    if (v.values.size() != spec.input_width())
      throw ShapeMismatch("save_dataset: vector width mismatch");
    const auto idx = std::find(names.begin(), names.end(), v.participant_id) -
                     names.begin();
    put32(f, static_cast<std::uint32_t>(idx));
    const char style = v.style == GestureStyle::Protocol ? 0 : 1;
    const char label = v.label == Label::Medication ? 1 : 0;
    f.write(&style, 1);
    f.write(&label, 1);
    f.write(reinterpret_cast<const char*>(v.values.data()),
            static_cast<std::streamsize>(v.values.size() * sizeof(float)));
  }
  if (!f) throw IoFailure(path);
}

std::pair<WindowSpec, std::vector<FeatureVector>> load_dataset(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure(path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw Error("dataset cache: bad magic in " + path);
  if (get32(f) != kVersion) throw Error("dataset cache: unsupported version");

  WindowSpec spec;
  spec.timesteps = get32(f);
  const std::uint32_t count = get32(f);
  spec.normalization = static_cast<Normalization>(get32(f));
  const std::uint32_t n_names = get32(f);
  std::vector<std::string> names(n_names);
  for (auto& n : names) {
    const std::uint32_t len = get32(f);
    n.resize(len);
    f.read(n.data(), len);
  }

  std::vector<FeatureVector> vectors(count);
  for (auto& v : vectors) {
    const std::uint32_t idx = get32(f);
    char style, label;
    f.read(&style, 1);
    f.read(&label, 1);
    if (idx >= names.size()) throw Error("dataset cache: bad participant index");
    v.participant_id = names[idx];
    v.style = style == 0 ? GestureStyle::Protocol : GestureStyle::Natural;
    v.label = label ? Label::Medication : Label::NonMedication;
    v.values.resize(spec.input_width());
    f.read(reinterpret_cast<char*>(v.values.data()),
           static_cast<std::streamsize>(v.values.size() * sizeof(float)));
    if (!f) throw Error("dataset cache: truncated file " + path);
  }
  return {spec, std::move(vectors)};
}

}  // namespace medsensor
