#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "medsensor/errors.hpp"
#include "medsensor/rng.hpp"
#include "medsensor/window.hpp"

using namespace medsensor;

namespace {

GestureSegment make_segment(std::size_t n, std::uint64_t seed) {
  GestureSegment seg;
  seg.participant_id = "p01";
  seg.style = GestureStyle::Protocol;
  seg.label = Label::Medication;
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i)
    seg.samples.push_back({static_cast<std::int64_t>(i * 40),
                           static_cast<float>(rng.normal(0, 2)),
                           static_cast<float>(rng.normal(0, 2)),
                           static_cast<float>(rng.normal(9.81, 2))});
  return seg;
}

}  // namespace

TEST_CASE("vectorize pads short segments at the tail") {
  const auto seg = make_segment(500, 1);
  WindowSpec spec;
  spec.timesteps = 1500;
  const auto v = vectorize(seg, spec);
  REQUIRE(v.values.size() == 4500);
  for (std::size_t i = 1500; i < 4500; ++i) CHECK(v.values[i] == 0.0f);
  CHECK(v.label == Label::Medication);
}

TEST_CASE("vectorize with exact length and no normalization is the identity") {
  const auto seg = make_segment(4, 2);
  WindowSpec spec;
  spec.timesteps = 4;
  spec.normalization = Normalization::None;
  const auto v = vectorize(seg, spec);
  REQUIRE(v.values.size() == 12);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(v.values[3 * i] == seg.samples[i].x);
    CHECK(v.values[3 * i + 1] == seg.samples[i].y);
    CHECK(v.values[3 * i + 2] == seg.samples[i].z);
  }
}

TEST_CASE("vectorize center-crops long segments") {
  const auto seg = make_segment(6, 3);
  WindowSpec spec;
  spec.timesteps = 2;
  spec.normalization = Normalization::None;
  const auto v = vectorize(seg, spec);
  REQUIRE(v.values.size() == 6);
  CHECK(v.values[0] == seg.samples[2].x);
  CHECK(v.values[3] == seg.samples[3].x);
}

TEST_CASE("z-score normalization gives zero mean, unit std per axis") {
  const auto seg = make_segment(200, 4);
  WindowSpec spec;
  spec.timesteps = 300;  // padded
  const auto v = vectorize(seg, spec);
  for (int axis = 0; axis < 3; ++axis) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < 200; ++i) {
      const double val = v.values[3 * i + static_cast<std::size_t>(axis)];
      sum += val;
      sq += val * val;
    }
    const double mean = sum / 200.0;
    const double var = sq / 200.0 - mean * mean;
    CHECK(std::abs(mean) < 1e-6);          // float storage limits precision
    CHECK(std::abs(var - 1.0) < 1e-5);
  }
}

TEST_CASE("constant axis normalizes to zeros") {
  GestureSegment seg;
  seg.participant_id = "p";
  for (int i = 0; i < 10; ++i)
    seg.samples.push_back({i * 40, 1.5f, static_cast<float>(i), 9.81f});
  WindowSpec spec;
  spec.timesteps = 10;
  const auto v = vectorize(seg, spec);
  for (int i = 0; i < 10; ++i) {
    CHECK(v.values[3 * i] == 0.0f);      // constant x
    CHECK(v.values[3 * i + 2] == 0.0f);  // constant z
  }
}

TEST_CASE("scale covariance under NONE normalization") {
  auto seg = make_segment(50, 5);
  WindowSpec spec;
  spec.timesteps = 80;
  spec.normalization = Normalization::None;
  const auto base = vectorize(seg, spec);

  for (auto& s : seg.samples) {
    s.x *= 4.0f;
    s.y *= 4.0f;
    s.z *= 4.0f;
  }
  const auto scaled = vectorize(seg, spec);
  for (std::size_t i = 0; i < 150; ++i)
    CHECK(scaled.values[i] == doctest::Approx(4.0f * base.values[i]));
  for (std::size_t i = 150; i < scaled.values.size(); ++i)
    CHECK(scaled.values[i] == 0.0f);
}

TEST_CASE("fit_window picks the longest segment") {
  std::vector<GestureSegment> segs = {make_segment(300, 6), make_segment(512, 7),
                                      make_segment(1500, 8)};
  CHECK(fit_window(segs).timesteps == 1500);
  CHECK(fit_window({make_segment(7, 9)}).timesteps == 7);
  CHECK_THROWS_AS(fit_window({}), EmptyDataset);
}

TEST_CASE("vectorize rejects empty segments") {
  GestureSegment seg;
  CHECK_THROWS_AS(vectorize(seg, WindowSpec{}), EmptyInput);
}

TEST_CASE("dataset cache round-trips") {
  WindowSpec spec;
  spec.timesteps = 20;
  std::vector<FeatureVector> vectors;
  Rng rng(10);
  for (int i = 0; i < 7; ++i) {
    FeatureVector v;
    v.participant_id = i % 2 ? "p02" : "p01";
    v.style = i % 3 ? GestureStyle::Natural : GestureStyle::Protocol;
    v.label = i % 2 ? Label::Medication : Label::NonMedication;
    for (std::size_t j = 0; j < spec.input_width(); ++j)
      v.values.push_back(static_cast<float>(rng.normal()));
    vectors.push_back(std::move(v));
  }

  const auto path =
      (std::filesystem::temp_directory_path() / "medsensor_cache_test.bin").string();
  save_dataset(path, spec, vectors);
  const auto [spec2, loaded] = load_dataset(path);
  CHECK(spec2.timesteps == spec.timesteps);
  REQUIRE(loaded.size() == vectors.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].values == vectors[i].values);
    CHECK(loaded[i].participant_id == vectors[i].participant_id);
    CHECK(loaded[i].style == vectors[i].style);
    CHECK(loaded[i].label == vectors[i].label);
  }
  std::filesystem::remove(path);
}
