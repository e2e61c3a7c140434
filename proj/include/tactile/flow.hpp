#pragma once

// Dense optical flow by coarse-to-fine patch-based inverse search, and pooling
// of the flow field into per-region (magnitude, direction) features.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tactile/image.hpp"

namespace tactile {

// Per-pixel displacement (u, v) [px] from the reference to the current image.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> u;
  std::vector<float> v;

  FlowField() = default;
  FlowField(int w, int h) : width(w), height(h), u(static_cast<std::size_t>(w) * h), v(static_cast<std::size_t>(w) * h) {}

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

struct DisConfig {
  int levels = 4;        // pyramid levels, scale factor 2; reduced for small images
  int patch_size = 8;
  int stride = 4;
  int max_iters = 12;
  float min_update = 0.01f;    // px
  float min_variance = 1e-4f;  // patches below are textureless
  bool parallel = true;        // OpenMP over patches and pixels; results identical either way
};

nlohmann::json to_json(const DisConfig& config);
// Keys absent from `j` keep the values in `base`.
DisConfig dis_config_from_json(const nlohmann::json& j, DisConfig base = {});

FlowField dense_flow(const GrayImage& ref, const GrayImage& cur, const DisConfig& config = {});

// rows x cols equal-area regions; must tile the frame exactly.
struct RegionGrid {
  std::size_t rows = 40;
  std::size_t cols = 40;
  std::size_t size() const { return rows * cols; }
};

// 2m values packed region-major: (magnitude [px], direction [rad, (-pi, pi]]) per region.
struct FeatureVector {
  RegionGrid regions;
  std::vector<double> values;

  double magnitude(std::size_t region) const { return values[2 * region]; }
  double direction(std::size_t region) const { return values[2 * region + 1]; }
};

// Directions below this magnitude are reported as 0.
inline constexpr double kDirectionEpsilon = 1e-9;

// Averages the flow vector over each region, then converts to magnitude/direction.
FeatureVector pool_features(const FlowField& flow, RegionGrid regions);

// Binary flow dump: "FLOW", u32 width, u32 height, u32 reserved (0), then
// interleaved little-endian float32 (u, v) per pixel, row-major.
std::string encode_flow(const FlowField& flow);
FlowField decode_flow(std::string_view bytes);

// region_index,magnitude_px,direction_rad
std::string format_features_csv(const FeatureVector& features);

}  // namespace tactile
