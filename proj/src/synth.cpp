#include "tactile/synth.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <exception>

#include "tactile/errors.hpp"
#include "tactile/image.hpp"
#include "tactile/io.hpp"
#include "tactile/render.hpp"
#include "tactile/rng.hpp"

namespace tactile {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError("synth config: " + what);
}

double contact_radius(const ContactModel& c, double d) {
  return std::sqrt(std::max(0.0, 2.0 * c.indenter_radius_mm * d - d * d));
}

}  // namespace

void SynthConfig::validate() const {
  require(extent.width > 0.0 && extent.height > 0.0, "extent must have positive size");
  require(mesh_spacing_mm > 0.0, "mesh_spacing_mm must be positive");
  require(center_spacing_mm > 0.0, "center_spacing_mm must be positive");
  require(center_margin_mm >= 0.0, "center_margin_mm must be >= 0");
  for (double d : depths_mm) require(d > 0.0 && d <= 2.0, "depths must lie in (0, 2] mm");
  require(grid_rows > 0 && grid_cols > 0, "grid must have at least one bin");
  require(regions.rows > 0 && regions.cols > 0, "regions must be at least 1x1");
  require(image_width_px >= 32 && image_height_px >= 32, "images must be at least 32x32");
  require(particle_radius_px > 0.0, "particle_radius_px must be positive");
  require(particle_margin_px >= peak_displacement_px, "particle_margin_px must cover the peak displacement");
  require(peak_displacement_px >= 0.0, "peak_displacement_px must be >= 0");
  require(reference_depth_mm > 0.0, "reference_depth_mm must be positive");
  require(decay_margin_mm > 0.0, "decay_margin_mm must be positive");
  require(pixel_noise >= 0.0 && ft_noise >= 0.0, "noise levels must be >= 0");
}

nlohmann::json SynthConfig::to_json() const {
  return {{"extent_mm", {{"x0", extent.x0}, {"y0", extent.y0}, {"width", extent.width}, {"height", extent.height}}},
          {"mesh_spacing_mm", mesh_spacing_mm},
          {"center_spacing_mm", center_spacing_mm},
          {"center_margin_mm", center_margin_mm},
          {"depths_mm", depths_mm},
          {"grid", {{"rows", grid_rows}, {"cols", grid_cols}}},
          {"regions", {{"rows", regions.rows}, {"cols", regions.cols}}},
          {"image_px", {{"width", image_width_px}, {"height", image_height_px}}},
          {"particles",
           {{"count", particle_count},
            {"radius_px", particle_radius_px},
            {"margin_px", particle_margin_px}}},
          {"peak_displacement_px", peak_displacement_px},
          {"reference_depth_mm", reference_depth_mm},
          {"decay_margin_mm", decay_margin_mm},
          {"pixel_noise", pixel_noise},
          {"ft_noise", ft_noise},
          {"contact",
           {{"indenter_radius_mm", contact.indenter_radius_mm},
            {"stiffness_scale", contact.stiffness_scale},
            {"friction", contact.friction}}},
          {"flow", tactile::to_json(flow)},
          {"write_images", write_images},
          {"seed", seed}};
}

SynthConfig SynthConfig::from_json(const nlohmann::json& j) {
  SynthConfig c;
  try {
    if (j.contains("extent_mm")) {
      const auto& e = j.at("extent_mm");
      c.extent = {e.value("x0", c.extent.x0), e.value("y0", c.extent.y0), e.value("width", c.extent.width),
                  e.value("height", c.extent.height)};
    }
    c.mesh_spacing_mm = j.value("mesh_spacing_mm", c.mesh_spacing_mm);
    c.center_spacing_mm = j.value("center_spacing_mm", c.center_spacing_mm);
    c.center_margin_mm = j.value("center_margin_mm", c.center_margin_mm);
    c.depths_mm = j.value("depths_mm", c.depths_mm);
    if (j.contains("grid")) {
      c.grid_rows = j.at("grid").value("rows", c.grid_rows);
      c.grid_cols = j.at("grid").value("cols", c.grid_cols);
    }
    if (j.contains("regions")) {
      c.regions.rows = j.at("regions").value("rows", c.regions.rows);
      c.regions.cols = j.at("regions").value("cols", c.regions.cols);
    }
    if (j.contains("image_px")) {
      c.image_width_px = j.at("image_px").value("width", c.image_width_px);
      c.image_height_px = j.at("image_px").value("height", c.image_height_px);
    }
    if (j.contains("particles")) {
      const auto& p = j.at("particles");
      c.particle_count = p.value("count", c.particle_count);
      c.particle_radius_px = p.value("radius_px", c.particle_radius_px);
      c.particle_margin_px = p.value("margin_px", c.particle_margin_px);
    }
    c.peak_displacement_px = j.value("peak_displacement_px", c.peak_displacement_px);
    c.reference_depth_mm = j.value("reference_depth_mm", c.reference_depth_mm);
    c.decay_margin_mm = j.value("decay_margin_mm", c.decay_margin_mm);
    c.pixel_noise = j.value("pixel_noise", c.pixel_noise);
    c.ft_noise = j.value("ft_noise", c.ft_noise);
    if (j.contains("contact")) {
      const auto& k = j.at("contact");
      c.contact.indenter_radius_mm = k.value("indenter_radius_mm", c.contact.indenter_radius_mm);
      c.contact.stiffness_scale = k.value("stiffness_scale", c.contact.stiffness_scale);
      c.contact.friction = k.value("friction", c.contact.friction);
    }
    if (j.contains("flow")) c.flow = dis_config_from_json(j.at("flow"), c.flow);
    c.write_images = j.value("write_images", c.write_images);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid synth config: ") + e.what());
  }
  c.validate();
  return c;
}

std::vector<IndentationMeta> synth_indentations(const SynthConfig& config) {
  auto axis = [&](double origin, double length) {
    std::vector<double> out;
    const double lo = origin + config.center_margin_mm, hi = origin + length - config.center_margin_mm;
    for (std::size_t k = 0;; ++k) {
      const double v = lo + static_cast<double>(k) * config.center_spacing_mm;
      if (v > hi + 1e-9) break;
      out.push_back(v);
    }
    return out;
  };
  const auto xs = axis(config.extent.x0, config.extent.width);
  const auto ys = axis(config.extent.y0, config.extent.height);
  std::vector<IndentationMeta> out;
  for (double y : ys) {
    for (double x : xs) {
      for (double d : config.depths_mm) out.push_back({x, y, d});
    }
  }
  return out;
}

Vec2 synth_displacement(const SynthConfig& config, const IndentationMeta& meta, double x_px, double y_px) {
  const double sx = config.image_width_px / config.extent.width;
  const double sy = config.image_height_px / config.extent.height;
  const double dx = x_px / sx - (meta.center_x_mm - config.extent.x0);
  const double dy = y_px / sy - (meta.center_y_mm - config.extent.y0);
  const double r = std::hypot(dx, dy);
  if (r < 1e-12) return {};
  const double ell = contact_radius(config.contact, meta.depth_mm) + config.decay_margin_mm;
  const double amp = config.peak_displacement_px * std::min(1.0, meta.depth_mm / config.reference_depth_mm);
  const double s = amp * (r / ell) * std::exp(0.5 - r * r / (2.0 * ell * ell));
  return {s * dx / r, s * dy / r};
}

SynthOutput generate_synthetic(const SynthConfig& config) {
  config.validate();
  const auto metas = synth_indentations(config);
  if (metas.empty()) throw InputError("synth config produces no indentations (check spacing, margin and extent)");

  SynthOutput out{SurfaceMesh::regular(config.extent, config.mesh_spacing_mm),
                  BinGrid(config.extent, config.grid_rows, config.grid_cols),
                  {},
                  {},
                  {}};
  if (config.image_width_px % static_cast<int>(config.regions.cols) != 0 ||
      config.image_height_px % static_cast<int>(config.regions.rows) != 0) {
    throw InputError("regions must tile the synthetic image exactly");
  }

  ParticleScene scene =
      ParticleScene::random(config.image_width_px, config.image_height_px, config.particle_count,
                            config.particle_radius_px, config.particle_margin_px, derive_seed(config.seed, "synth/scene"));
  const GrayImage ref = quantize8(add_noise(render_particles(scene.width, scene.height, scene.centers,
                                                             scene.radius_px, scene.peak, scene.background),
                                            config.pixel_noise, derive_seed(config.seed, "synth/noise/ref")));
  out.ref_png = encode_png(ref);

  const auto assignment = assign_bins(out.mesh, out.grid);
  DisConfig flow = config.flow;
  flow.parallel = false;

  out.indentations.resize(metas.size());
  std::exception_ptr failure;
  const auto count = static_cast<long>(metas.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long k = 0; k < count; ++k) {
    try {
      const auto i = static_cast<std::size_t>(k);
      const auto id = static_cast<std::int64_t>(i + 1);
      const auto& meta = metas[i];
      auto& item = out.indentations[i];
      item.field = synth_indentation(out.mesh, id, meta, config.contact);
      item.label = bin_forces(item.field, out.mesh, assignment, out.grid);

      Rng ft_rng(derive_seed(config.seed, "synth/ft/" + std::to_string(id)));
      const Vec3 total = total_force(item.field);
      item.reading.indentation_id = id;
      for (std::size_t a = 0; a < 3; ++a) {
        item.reading.total[a] = total[a] + config.ft_noise * item.reading.resolution[a] * ft_rng.normal();
      }

      ParticleScene moved = scene;
      moved.displacement = [&](double x, double y) { return synth_displacement(config, meta, x, y); };
      const auto centers = displaced_centers(moved);
      const GrayImage cur = quantize8(add_noise(
          render_particles(scene.width, scene.height, centers, scene.radius_px, scene.peak, scene.background),
          config.pixel_noise, derive_seed(config.seed, "synth/noise/cur/" + std::to_string(id))));
      if (config.write_images) item.cur_png = encode_png(cur);

      const auto features = pool_features(dense_flow(ref, cur, flow), config.regions);
      item.record = {id, features.values, pack_label(item.label)};
    } catch (...) {
#pragma omp critical(synth_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  out.dataset.manifest.regions = config.regions;
  out.dataset.manifest.grid = out.grid;
  out.dataset.manifest.label_bins = out.grid.size();
  out.dataset.manifest.record_count = metas.size();
  out.dataset.manifest.extra = {{"source", "synthetic"}, {"synth", config.to_json()}};
  out.dataset.records.reserve(metas.size());
  for (const auto& item : out.indentations) out.dataset.records.push_back(item.record);
  return out;
}

void write_synthetic(const std::filesystem::path& dir, const SynthOutput& output) {
  std::vector<NodalForceField> fields;
  std::vector<ForceDistributionLabel> labels;
  std::vector<FtReading> readings;
  for (const auto& item : output.indentations) {
    fields.push_back(item.field);
    labels.push_back(item.label);
    readings.push_back(item.reading);
  }
  io::write_atomic(dir / "mesh.csv", format_mesh_csv(output.mesh));
  io::write_atomic(dir / "metadata.csv", format_metadata_csv(fields));
  io::write_atomic(dir / "forces.csv", format_forces_csv(fields));
  io::write_atomic(dir / "labels.csv", format_labels_csv(labels));
  io::write_atomic(dir / "ft_readings.csv", format_ft_csv(readings));
  io::write_atomic(dir / "images" / "ref.png", output.ref_png);
  for (const auto& item : output.indentations) {
    if (item.cur_png.empty()) continue;
    char name[32];
    std::snprintf(name, sizeof name, "cur_%05lld.png", static_cast<long long>(item.record.indentation_id));
    io::write_atomic(dir / "images" / name, item.cur_png);
  }
  write_dataset(dir, output.dataset);
}

std::vector<StressStretchCurve> synth_curves(const OgdenParameters& params, std::size_t points, double noise,
                                             std::uint64_t seed) {
  if (points < 2) throw InputError("synthetic curves need at least 2 points");
  if (!(noise >= 0.0)) throw InputError("curve noise must be >= 0");
  const std::array<std::pair<LoadCase, double>, 3> cases{{{LoadCase::UA, 3.0}, {LoadCase::PS, 3.0}, {LoadCase::EB, 2.0}}};
  std::vector<StressStretchCurve> out;
  for (const auto& [lc, hi] : cases) {
    Rng rng(derive_seed(seed, std::string("curves/noise/") + std::string(to_string(lc))));
    std::vector<CurveSample> samples;
    for (std::size_t i = 0; i < points; ++i) {
      const double lambda = 1.0 + (hi - 1.0) * static_cast<double>(i) / static_cast<double>(points - 1);
      double sigma = load_case_sigma1(params, lc, lambda);
      if (noise > 0.0) sigma *= 1.0 + noise * rng.normal();
      samples.push_back({lambda, sigma});
    }
    out.emplace_back(lc, std::move(samples));
  }
  return out;
}

}  // namespace tactile
