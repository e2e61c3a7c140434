#include "tactile/render.hpp"

#include <algorithm>
#include <cmath>

#include "tactile/errors.hpp"
#include "tactile/rng.hpp"

namespace tactile {

ParticleScene ParticleScene::random(int width, int height, std::size_t count, double radius_px, double margin_px,
                                    std::uint64_t seed) {
  if (2.0 * margin_px >= std::min(width, height)) throw DomainError("particle margin leaves no room in the frame");
  ParticleScene scene;
  scene.width = width;
  scene.height = height;
  scene.radius_px = radius_px;
  scene.seed = seed;
  Rng rng(derive_seed(seed, "scene/particles"));
  scene.centers.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = rng.uniform(margin_px, width - 1 - margin_px);
    const double y = rng.uniform(margin_px, height - 1 - margin_px);
    scene.centers.push_back({x, y});
  }
  return scene;
}

GrayImage render_particles(int width, int height, const std::vector<Vec2>& centers, double radius_px, double peak,
                           double background) {
  if (!(radius_px > 0.0)) throw DomainError("particle radius must be positive");
  std::vector<double> acc(static_cast<std::size_t>(width) * height, background);
  const double sigma = radius_px / 2.0;
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  const int reach = static_cast<int>(std::ceil(4.0 * sigma));
  for (const auto& c : centers) {
    const int cx = static_cast<int>(std::lround(c.x));
    const int cy = static_cast<int>(std::lround(c.y));
    for (int y = std::max(0, cy - reach); y <= std::min(height - 1, cy + reach); ++y) {
      const double dy = y - c.y;
      for (int x = std::max(0, cx - reach); x <= std::min(width - 1, cx + reach); ++x) {
        const double dx = x - c.x;
        acc[static_cast<std::size_t>(y) * width + x] += peak * std::exp(-(dx * dx + dy * dy) * inv2s2);
      }
    }
  }
  std::vector<float> px(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) px[i] = static_cast<float>(std::clamp(acc[i], 0.0, 1.0));
  return {width, height, std::move(px)};
}

std::vector<Vec2> displaced_centers(const ParticleScene& scene) {
  std::vector<Vec2> moved = scene.centers;
  if (!scene.displacement) return moved;
  for (auto& c : moved) {
    const Vec2 d = scene.displacement(c.x, c.y);
    c = {c.x + d.x, c.y + d.y};
    if (!(c.x >= 0.0 && c.y >= 0.0 && c.x <= scene.width - 1 && c.y <= scene.height - 1)) {
      throw DomainError("particle displaced outside the frame");
    }
  }
  return moved;
}

GrayImage add_noise(GrayImage img, double sigma, std::uint64_t seed) {
  if (sigma <= 0.0) return img;
  Rng rng(seed);
  std::vector<float> px = img.pixels();
  for (auto& p : px) p = static_cast<float>(std::clamp(p + sigma * rng.normal(), 0.0, 1.0));
  return {img.width(), img.height(), std::move(px)};
}

std::pair<GrayImage, GrayImage> render_scene(const ParticleScene& scene) {
  for (const auto& c : scene.centers) {
    if (!(c.x >= 0.0 && c.y >= 0.0 && c.x <= scene.width - 1 && c.y <= scene.height - 1)) {
      throw DomainError("particle outside the frame");
    }
  }
  const auto moved = displaced_centers(scene);
  GrayImage ref = render_particles(scene.width, scene.height, scene.centers, scene.radius_px, scene.peak,
                                   scene.background);
  GrayImage cur = render_particles(scene.width, scene.height, moved, scene.radius_px, scene.peak, scene.background);
  return {add_noise(std::move(ref), scene.noise_sigma, derive_seed(scene.seed, "scene/noise/ref")),
          add_noise(std::move(cur), scene.noise_sigma, derive_seed(scene.seed, "scene/noise/cur"))};
}

}  // namespace tactile
