#pragma once

// Ground-truth force-distribution labels from per-indentation nodal contact
// forces: bin assignment on the undeformed surface mesh, per-bin summation,
// total-force aggregation and agreement against force/torque sensor readings.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tactile/vec3.hpp"

namespace tactile {

// Axis-aligned surface rectangle [x0, x0 + width] x [y0, y0 + height], mm.
struct Extent {
  double x0 = 0.0;
  double y0 = 0.0;
  double width = 32.0;
  double height = 32.0;

  bool contains(double x, double y, double tol = 1e-6) const {
    return x >= x0 - tol && x <= x0 + width + tol && y >= y0 - tol && y <= y0 + height + tol;
  }
};

struct MeshNode {
  std::int64_t id;
  double x_mm;
  double y_mm;
};

// Top-surface nodes of the FE mesh in the reference configuration.
class SurfaceMesh {
 public:
  SurfaceMesh(std::vector<MeshNode> nodes, Extent extent);

  // Regular node lattice with the given spacing, ids 1..N in row-major order (y outer).
  static SurfaceMesh regular(const Extent& extent, double spacing_mm);

  std::span<const MeshNode> nodes() const { return nodes_; }
  const Extent& extent() const { return extent_; }
  std::size_t size() const { return nodes_.size(); }
  std::optional<std::size_t> index_of(std::int64_t id) const;

 private:
  std::vector<MeshNode> nodes_;
  Extent extent_;
  std::unordered_map<std::int64_t, std::size_t> index_;
};

struct IndentationMeta {
  double center_x_mm = 0.0;
  double center_y_mm = 0.0;
  double depth_mm = 0.0;
};

struct NodalForce {
  std::int64_t node_id;
  Vec3 force;
};

// Contact forces exported for one indentation; nodes without an entry carry zero force.
struct NodalForceField {
  std::int64_t indentation_id = 0;
  std::vector<NodalForce> forces;
  IndentationMeta meta;
};

// rows x cols square bins tiling the extent exactly; bin index = row * cols + col
// with rows along y and cols along x.
class BinGrid {
 public:
  BinGrid() : BinGrid(Extent{}, 1, 1) {}
  BinGrid(Extent extent, std::size_t rows, std::size_t cols);

  const Extent& extent() const { return extent_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return rows_ * cols_; }
  double bin_side() const { return side_; }

  nlohmann::json to_json() const;
  static BinGrid from_json(const nlohmann::json& j);

 private:
  Extent extent_;
  std::size_t rows_;
  std::size_t cols_;
  double side_;
};

struct ForceDistributionLabel {
  BinGrid grid;
  std::vector<Vec3> values;
  std::int64_t indentation_id = 0;
};

struct FtReading {
  std::int64_t indentation_id;
  Vec3 total;
  Vec3 resolution{0.03, 0.03, 0.06};
};

struct ForceTotal {
  std::int64_t indentation_id;
  Vec3 total;
};

// Bin of every mesh node, aligned with mesh.nodes(). Containment is half-open
// [x0, x0 + side) x [y0, y0 + side) except that the outer edges are closed.
std::vector<std::size_t> assign_bins(const SurfaceMesh& mesh, const BinGrid& grid);

ForceDistributionLabel bin_forces(const NodalForceField& field, const SurfaceMesh& mesh, const BinGrid& grid);
ForceDistributionLabel bin_forces(const NodalForceField& field, const SurfaceMesh& mesh,
                                  std::span<const std::size_t> assignment, const BinGrid& grid);

// Labels for many indentations; parallel over indentations, output order = input order.
std::vector<ForceDistributionLabel> bin_forces_batch(std::span<const NodalForceField> fields,
                                                     const SurfaceMesh& mesh, const BinGrid& grid);

Vec3 total_force(const ForceDistributionLabel& label);
Vec3 total_force(const NodalForceField& field);

// Per-axis sqrt(mean_i (fem_i - ft_i)^2) over indentations paired by id.
// Unpaired or duplicated ids raise InputError listing (up to 10) offenders.
Vec3 ground_truth_rmse(std::span<const ForceTotal> fem, std::span<const FtReading> readings);
Vec3 ground_truth_rmse(std::span<const ForceDistributionLabel> labels, std::span<const FtReading> readings);

struct ContactModel {
  double indenter_radius_mm = 5.0;
  // Total normal force = stiffness_scale * depth^1.5 [N mm^-1.5].
  double stiffness_scale = 1.7 / (2.0 * 1.4142135623730951);
  double friction = 0.45;
};

// Non-physical stand-in for an FE contact solve: Hertz-like normal pressure
// profile inside the spherical-cap contact radius a = sqrt(2 R d - d^2),
// radial shear proportional to friction * |fz| * (rho / a), total |Fz| fixed
// by the stiffness scale. Deterministic.
NodalForceField synth_indentation(const SurfaceMesh& mesh, std::int64_t indentation_id,
                                  const IndentationMeta& meta, const ContactModel& model);

// CSV schemas
//   mesh:       node_id,x_mm,y_mm
//   forces:     indentation_id,node_id,fx_n,fy_n,fz_n   (long format)
//   metadata:   indentation_id,center_x_mm,center_y_mm,depth_mm
//   readings:   indentation_id,fx_n,fy_n,fz_n
//   labels:     indentation_id,bin_index,fx_n,fy_n,fz_n (zero bins omitted)
SurfaceMesh read_mesh_csv(const std::filesystem::path& path, const Extent& extent);
std::string format_mesh_csv(const SurfaceMesh& mesh);

// Groups the long-format rows by indentation id (ascending) and attaches metadata.
std::vector<NodalForceField> read_force_fields(const std::filesystem::path& forces_csv,
                                               const std::filesystem::path& metadata_csv);
std::string format_forces_csv(std::span<const NodalForceField> fields);
std::string format_metadata_csv(std::span<const NodalForceField> fields);

std::vector<FtReading> read_ft_csv(const std::filesystem::path& path);
std::string format_ft_csv(std::span<const FtReading> readings);

std::string format_labels_csv(std::span<const ForceDistributionLabel> labels);

}  // namespace tactile
