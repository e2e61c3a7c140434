#pragma once

// Desk-scale synthetic dataset: a regular surface mesh, a lattice of
// indentation centers and depths, stand-in contact force fields, rendered
// particle image pairs with a radial displacement field, flow features,
// binned labels and noisy force/torque totals. Not a physical simulation.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tactile/characterization.hpp"
#include "tactile/constitutive.hpp"
#include "tactile/dataset.hpp"
#include "tactile/flow.hpp"
#include "tactile/labeling.hpp"
#include "tactile/render.hpp"

namespace tactile {

struct SynthConfig {
  Extent extent{};
  double mesh_spacing_mm = 0.5;
  double center_spacing_mm = 1.2;
  double center_margin_mm = 4.6;
  std::vector<double> depths_mm{0.4, 0.8, 1.2, 1.6, 2.0};
  std::size_t grid_rows = 4;
  std::size_t grid_cols = 4;
  RegionGrid regions{8, 8};
  int image_width_px = 128;
  int image_height_px = 128;
  std::size_t particle_count = 1400;
  double particle_radius_px = 2.0;
  double particle_margin_px = 6.0;
  double peak_displacement_px = 4.0;  // at the reference depth
  double reference_depth_mm = 2.0;
  double decay_margin_mm = 2.0;       // displacement length scale = contact radius + margin
  double pixel_noise = 0.005;
  double ft_noise = 0.5;              // reading noise sigma as a fraction of the sensor resolution
  ContactModel contact{};
  DisConfig flow{};
  bool write_images = true;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  // Keys absent from `j` keep their defaults.
  static SynthConfig from_json(const nlohmann::json& j);
};

struct SynthIndentation {
  NodalForceField field;
  ForceDistributionLabel label;
  FtReading reading;
  DatasetRecord record;
  std::string cur_png;  // empty unless images are kept
};

struct SynthOutput {
  SurfaceMesh mesh;
  BinGrid grid;
  std::string ref_png;
  std::vector<SynthIndentation> indentations;
  Dataset dataset;
};

// Indentation centers (row-major, y outer) and depths in id order, ids from 1.
std::vector<IndentationMeta> synth_indentations(const SynthConfig& config);

// Radial outward image displacement [px] at pixel (x, y) for one indentation.
Vec2 synth_displacement(const SynthConfig& config, const IndentationMeta& meta, double x_px, double y_px);

// Deterministic for a given config; parallel over indentations.
SynthOutput generate_synthetic(const SynthConfig& config);

// mesh.csv, metadata.csv, forces.csv, labels.csv, ft_readings.csv,
// images/ref.png, images/cur_NNNNN.png, records.csv, manifest.json
void write_synthetic(const std::filesystem::path& dir, const SynthOutput& output);

// UA, PS and EB stress-stretch curves of `points` samples evenly spaced over
// lambda in [1, 3], [1, 3] and [1, 2], with optional multiplicative Gaussian
// noise of relative size `noise` (seeded).
std::vector<StressStretchCurve> synth_curves(const OgdenParameters& params, std::size_t points = 40,
                                             double noise = 0.0, std::uint64_t seed = 0);

}  // namespace tactile
