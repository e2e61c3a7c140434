#include "tactile/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "tactile/csv.hpp"
#include "tactile/errors.hpp"

namespace tactile {

namespace {

constexpr double kExtentTolerance = 1e-6;
constexpr double kEdgeSnap = 1e-9;

std::size_t axis_bin(double v, double origin, double side, std::size_t count) {
  const double t = (v - origin) / side;
  const double nearest = std::round(t);
  // Ties on a shared edge go to the +x/+y bin; rounding noise must not move them back.
  const double cell = std::abs(t - nearest) < kEdgeSnap ? nearest : std::floor(t);
  if (cell < 0.0) return 0;
  const auto idx = static_cast<std::size_t>(cell);
  return std::min(idx, count - 1);
}

std::string offender_list(const std::vector<std::int64_t>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size() && i < 10; ++i) {
    if (i) s += ", ";
    s += std::to_string(ids[i]);
  }
  if (ids.size() > 10) s += ", ... (" + std::to_string(ids.size()) + " total)";
  return s;
}

}  // namespace

SurfaceMesh::SurfaceMesh(std::vector<MeshNode> nodes, Extent extent)
    : nodes_(std::move(nodes)), extent_(extent) {
  if (!(extent_.width > 0.0) || !(extent_.height > 0.0)) throw InputError("mesh extent must have positive size");
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!std::isfinite(n.x_mm) || !std::isfinite(n.y_mm)) {
      throw InputError("mesh node " + std::to_string(n.id) + " has non-finite coordinates");
    }
    if (!extent_.contains(n.x_mm, n.y_mm, kExtentTolerance)) {
      throw InputError("mesh node " + std::to_string(n.id) + " lies outside the surface extent");
    }
    if (!index_.emplace(n.id, i).second) throw InputError("duplicate mesh node id " + std::to_string(n.id));
  }
}

SurfaceMesh SurfaceMesh::regular(const Extent& extent, double spacing_mm) {
  if (!(spacing_mm > 0.0)) throw InputError("mesh spacing must be positive");
  const auto nx = static_cast<std::size_t>(std::floor(extent.width / spacing_mm + 1e-9)) + 1;
  const auto ny = static_cast<std::size_t>(std::floor(extent.height / spacing_mm + 1e-9)) + 1;
  std::vector<MeshNode> nodes;
  nodes.reserve(nx * ny);
  std::int64_t id = 1;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      nodes.push_back({id++, extent.x0 + static_cast<double>(i) * spacing_mm,
                       extent.y0 + static_cast<double>(j) * spacing_mm});
    }
  }
  return {std::move(nodes), extent};
}

std::optional<std::size_t> SurfaceMesh::index_of(std::int64_t id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

BinGrid::BinGrid(Extent extent, std::size_t rows, std::size_t cols) : extent_(extent), rows_(rows), cols_(cols) {
  if (rows_ == 0 || cols_ == 0) throw InputError("bin grid needs at least one row and column");
  if (!(extent_.width > 0.0) || !(extent_.height > 0.0)) throw InputError("bin grid extent must have positive size");
  const double sx = extent_.width / static_cast<double>(cols_);
  const double sy = extent_.height / static_cast<double>(rows_);
  if (std::abs(sx - sy) > 1e-9 * std::max(sx, sy)) {
    throw InputError("grid " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                     " does not tile the extent with square bins (" + std::to_string(sx) + " vs " +
                     std::to_string(sy) + " mm)");
  }
  side_ = sx;
}

nlohmann::json BinGrid::to_json() const {
  return {{"rows", rows_},
          {"cols", cols_},
          {"n", size()},
          {"bin_side_mm", side_},
          {"extent_mm", {{"x0", extent_.x0}, {"y0", extent_.y0}, {"width", extent_.width}, {"height", extent_.height}}}};
}

BinGrid BinGrid::from_json(const nlohmann::json& j) {
  try {
    const auto& e = j.at("extent_mm");
    return {Extent{e.at("x0").get<double>(), e.at("y0").get<double>(), e.at("width").get<double>(),
                   e.at("height").get<double>()},
            j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid grid JSON: ") + e.what());
  }
}

std::vector<std::size_t> assign_bins(const SurfaceMesh& mesh, const BinGrid& grid) {
  const Extent& ext = grid.extent();
  std::vector<std::size_t> out(mesh.size());
  const auto nodes = mesh.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (!ext.contains(n.x_mm, n.y_mm, kExtentTolerance)) {
      throw InputError("node " + std::to_string(n.id) + " at (" + std::to_string(n.x_mm) + ", " +
                       std::to_string(n.y_mm) + ") lies outside the bin grid");
    }
    const std::size_t col = axis_bin(n.x_mm, ext.x0, grid.bin_side(), grid.cols());
    const std::size_t row = axis_bin(n.y_mm, ext.y0, grid.bin_side(), grid.rows());
    out[i] = row * grid.cols() + col;
  }
  return out;
}

ForceDistributionLabel bin_forces(const NodalForceField& field, const SurfaceMesh& mesh,
                                  std::span<const std::size_t> assignment, const BinGrid& grid) {
  if (assignment.size() != mesh.size()) throw InputError("bin assignment does not match mesh");
  std::vector<Vec3Sum> sums(grid.size());
  for (const auto& f : field.forces) {
    const auto idx = mesh.index_of(f.node_id);
    if (!idx) {
      throw InputError("indentation " + std::to_string(field.indentation_id) + " references unknown node " +
                       std::to_string(f.node_id));
    }
    if (!f.force.finite()) {
      throw InputError("indentation " + std::to_string(field.indentation_id) + " has a non-finite force at node " +
                       std::to_string(f.node_id));
    }
    sums[assignment[*idx]].add(f.force);
  }
  ForceDistributionLabel label{grid, std::vector<Vec3>(grid.size()), field.indentation_id};
  for (std::size_t b = 0; b < sums.size(); ++b) label.values[b] = sums[b].value();
  return label;
}

ForceDistributionLabel bin_forces(const NodalForceField& field, const SurfaceMesh& mesh, const BinGrid& grid) {
  const auto assignment = assign_bins(mesh, grid);
  return bin_forces(field, mesh, assignment, grid);
}

std::vector<ForceDistributionLabel> bin_forces_batch(std::span<const NodalForceField> fields,
                                                     const SurfaceMesh& mesh, const BinGrid& grid) {
  const auto assignment = assign_bins(mesh, grid);
  std::vector<std::optional<ForceDistributionLabel>> slots(fields.size());
  std::vector<std::string> errors(fields.size());
  const auto count = static_cast<long>(fields.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    try {
      slots[iu].emplace(bin_forces(fields[iu], mesh, assignment, grid));
    } catch (const std::exception& e) {
      errors[iu] = e.what();
    }
  }
  std::vector<ForceDistributionLabel> out;
  out.reserve(fields.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!errors[i].empty()) throw InputError(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

Vec3 total_force(const ForceDistributionLabel& label) {
  Vec3Sum s;
  for (const auto& v : label.values) s.add(v);
  return s.value();
}

Vec3 total_force(const NodalForceField& field) {
  Vec3Sum s;
  for (const auto& f : field.forces) s.add(f.force);
  return s.value();
}

Vec3 ground_truth_rmse(std::span<const ForceTotal> fem, std::span<const FtReading> readings) {
  std::map<std::int64_t, Vec3> ft;
  std::vector<std::int64_t> offenders;
  for (const auto& r : readings) {
    if (!ft.emplace(r.indentation_id, r.total).second) offenders.push_back(r.indentation_id);
  }
  std::map<std::int64_t, Vec3> model;
  for (const auto& f : fem) {
    if (!model.emplace(f.indentation_id, f.total).second) offenders.push_back(f.indentation_id);
  }
  for (const auto& [id, _] : model) {
    if (!ft.contains(id)) offenders.push_back(id);
  }
  for (const auto& [id, _] : ft) {
    if (!model.contains(id)) offenders.push_back(id);
  }
  if (!offenders.empty()) {
    std::sort(offenders.begin(), offenders.end());
    offenders.erase(std::unique(offenders.begin(), offenders.end()), offenders.end());
    throw InputError("indentation ids not paired one-to-one between FEM totals and F/T readings: " +
                     offender_list(offenders));
  }
  if (model.empty()) throw InputError("no indentations to compare");
  Vec3 sq;
  for (const auto& [id, total] : model) {
    const Vec3 d = total - ft.at(id);
    sq += Vec3{d.x * d.x, d.y * d.y, d.z * d.z};
  }
  const double n = static_cast<double>(model.size());
  return {std::sqrt(sq.x / n), std::sqrt(sq.y / n), std::sqrt(sq.z / n)};
}

Vec3 ground_truth_rmse(std::span<const ForceDistributionLabel> labels, std::span<const FtReading> readings) {
  std::vector<ForceTotal> totals;
  totals.reserve(labels.size());
  for (const auto& l : labels) totals.push_back({l.indentation_id, total_force(l)});
  return ground_truth_rmse(totals, readings);
}

NodalForceField synth_indentation(const SurfaceMesh& mesh, std::int64_t indentation_id,
                                  const IndentationMeta& meta, const ContactModel& model) {
  const double d = meta.depth_mm;
  const double r = model.indenter_radius_mm;
  if (!mesh.extent().contains(meta.center_x_mm, meta.center_y_mm, 0.0)) {
    throw DomainError("indentation center lies outside the surface");
  }
  if (!(d >= 0.0 && d <= 2.0)) throw DomainError("indentation depth must lie in (0, 2] mm");
  if (!(r > 0.0)) throw DomainError("indenter radius must be positive");
  if (!(model.stiffness_scale >= 0.0) || !(model.friction >= 0.0)) {
    throw DomainError("stiffness scale and friction must be non-negative");
  }

  NodalForceField field{indentation_id, {}, meta};
  if (d == 0.0) return field;

  const double a = std::sqrt(std::max(0.0, 2.0 * r * d - d * d));
  const double fz_total = model.stiffness_scale * std::pow(d, 1.5);

  const auto nodes = mesh.nodes();
  std::vector<std::pair<std::size_t, double>> contact;
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double dx = nodes[i].x_mm - meta.center_x_mm;
    const double dy = nodes[i].y_mm - meta.center_y_mm;
    const double rho2 = dx * dx + dy * dy;
    if (rho2 < a * a) {
      const double w = std::sqrt(1.0 - rho2 / (a * a));
      contact.emplace_back(i, w);
      weight_sum += w;
    }
  }
  if (contact.empty()) {
    // Contact patch smaller than the mesh spacing: the nearest node carries the load.
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double dx = nodes[i].x_mm - meta.center_x_mm;
      const double dy = nodes[i].y_mm - meta.center_y_mm;
      if (dx * dx + dy * dy < best_d2) {
        best_d2 = dx * dx + dy * dy;
        best = i;
      }
    }
    field.forces.push_back({nodes[best].id, {0.0, 0.0, -fz_total}});
    return field;
  }
  for (const auto& [i, w] : contact) {
    const double fz = -fz_total * w / weight_sum;
    const double dx = nodes[i].x_mm - meta.center_x_mm;
    const double dy = nodes[i].y_mm - meta.center_y_mm;
    const double shear = model.friction * std::abs(fz) / a;
    field.forces.push_back({nodes[i].id, {shear * dx, shear * dy, fz}});
  }
  return field;
}

SurfaceMesh read_mesh_csv(const std::filesystem::path& path, const Extent& extent) {
  const auto t = csv::Table::read(path);
  t.require_header({"node_id", "x_mm", "y_mm"});
  std::vector<MeshNode> nodes;
  nodes.reserve(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) nodes.push_back({t.integer(r, 0), t.number(r, 1), t.number(r, 2)});
  try {
    return {std::move(nodes), extent};
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string format_mesh_csv(const SurfaceMesh& mesh) {
  std::string s = "node_id,x_mm,y_mm\n";
  for (const auto& n : mesh.nodes()) {
    s += std::to_string(n.id) + ',' + csv::format_exact(n.x_mm) + ',' + csv::format_exact(n.y_mm) + '\n';
  }
  return s;
}

std::vector<NodalForceField> read_force_fields(const std::filesystem::path& forces_csv,
                                               const std::filesystem::path& metadata_csv) {
  const auto meta = csv::Table::read(metadata_csv);
  meta.require_header({"indentation_id", "center_x_mm", "center_y_mm", "depth_mm"});
  std::map<std::int64_t, NodalForceField> fields;
  for (std::size_t r = 0; r < meta.rows(); ++r) {
    const auto id = meta.integer(r, 0);
    NodalForceField f{id, {}, {meta.number(r, 1), meta.number(r, 2), meta.number(r, 3)}};
    if (!fields.emplace(id, std::move(f)).second) {
      throw InputError(metadata_csv.string() + ": duplicate indentation id " + std::to_string(id));
    }
  }

  const auto forces = csv::Table::read(forces_csv);
  forces.require_header({"indentation_id", "node_id", "fx_n", "fy_n", "fz_n"});
  std::vector<std::int64_t> unknown;
  for (std::size_t r = 0; r < forces.rows(); ++r) {
    const auto id = forces.integer(r, 0);
    auto it = fields.find(id);
    if (it == fields.end()) {
      if (unknown.empty() || unknown.back() != id) unknown.push_back(id);
      continue;
    }
    it->second.forces.push_back(
        {forces.integer(r, 1), {forces.number(r, 2), forces.number(r, 3), forces.number(r, 4)}});
  }
  if (!unknown.empty()) {
    std::sort(unknown.begin(), unknown.end());
    unknown.erase(std::unique(unknown.begin(), unknown.end()), unknown.end());
    throw InputError(forces_csv.string() + ": indentation ids missing from metadata: " + offender_list(unknown));
  }
  std::vector<NodalForceField> out;
  out.reserve(fields.size());
  for (auto& [_, f] : fields) out.push_back(std::move(f));
  return out;
}

std::string format_forces_csv(std::span<const NodalForceField> fields) {
  std::string s = "indentation_id,node_id,fx_n,fy_n,fz_n\n";
  for (const auto& f : fields) {
    const std::string id = std::to_string(f.indentation_id);
    for (const auto& nf : f.forces) {
      s += id + ',' + std::to_string(nf.node_id) + ',' + csv::format_exact(nf.force.x) + ',' +
           csv::format_exact(nf.force.y) + ',' + csv::format_exact(nf.force.z) + '\n';
    }
  }
  return s;
}

std::string format_metadata_csv(std::span<const NodalForceField> fields) {
  std::string s = "indentation_id,center_x_mm,center_y_mm,depth_mm\n";
  for (const auto& f : fields) {
    s += std::to_string(f.indentation_id) + ',' + csv::format_exact(f.meta.center_x_mm) + ',' +
         csv::format_exact(f.meta.center_y_mm) + ',' + csv::format_exact(f.meta.depth_mm) + '\n';
  }
  return s;
}

std::vector<FtReading> read_ft_csv(const std::filesystem::path& path) {
  const auto t = csv::Table::read(path);
  t.require_header({"indentation_id", "fx_n", "fy_n", "fz_n"});
  std::vector<FtReading> out;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    out.push_back({t.integer(r, 0), {t.number(r, 1), t.number(r, 2), t.number(r, 3)}});
  }
  return out;
}

std::string format_ft_csv(std::span<const FtReading> readings) {
  std::string s = "indentation_id,fx_n,fy_n,fz_n\n";
  for (const auto& r : readings) {
    s += std::to_string(r.indentation_id) + ',' + csv::format_exact(r.total.x) + ',' +
         csv::format_exact(r.total.y) + ',' + csv::format_exact(r.total.z) + '\n';
  }
  return s;
}

std::string format_labels_csv(std::span<const ForceDistributionLabel> labels) {
  std::string s = "indentation_id,bin_index,fx_n,fy_n,fz_n\n";
  for (const auto& l : labels) {
    const std::string id = std::to_string(l.indentation_id);
    for (std::size_t b = 0; b < l.values.size(); ++b) {
      const Vec3& v = l.values[b];
      if (v == Vec3{}) continue;
      s += id + ',' + std::to_string(b) + ',' + csv::format_exact(v.x) + ',' + csv::format_exact(v.y) + ',' +
           csv::format_exact(v.z) + '\n';
    }
  }
  return s;
}

}  // namespace tactile
