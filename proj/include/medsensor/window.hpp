#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "medsensor/types.hpp"

namespace medsensor {

enum class Normalization { None, PerWindowZscore };

// Fixed-window layout: W timesteps, interleaved [x0,y0,z0, x1,y1,z1, ...],
// so the network input width is 3*W.
struct WindowSpec {
  std::size_t timesteps = 1500;
  Normalization normalization = Normalization::PerWindowZscore;

  std::size_t input_width() const { return 3 * timesteps; }
};

struct FeatureVector {
  std::vector<float> values;  // length 3*W
  Label label = Label::Medication;
  std::string participant_id;
  GestureStyle style = GestureStyle::Protocol;
};

// Segments shorter than W are zero-padded at the tail, longer ones are
// center-cropped. Normalization statistics use only the real (non-pad)
// samples; a constant axis normalizes to zeros.
FeatureVector vectorize(const GestureSegment& segment, const WindowSpec& spec);

// W = longest segment in the dataset.
WindowSpec fit_window(const std::vector<GestureSegment>& segments);

// Flat binary dataset cache: header, participant name table, then one record
// per vector (participant index, style byte, label byte, 3*W little-endian
// 32-bit floats).
void save_dataset(const std::string& path, const WindowSpec& spec,
                  const std::vector<FeatureVector>& vectors);
std::pair<WindowSpec, std::vector<FeatureVector>> load_dataset(const std::string& path);

}  // namespace medsensor
