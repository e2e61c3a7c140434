#pragma once

// Synthetic particle imagery with a known displacement field, used as the
// ground-truth oracle for the optical-flow stage.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "tactile/image.hpp"

namespace tactile {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Pixel displacement applied to a particle at reference position (x, y) [px].
using DisplacementField = std::function<Vec2(double x, double y)>;

struct ParticleScene {
  int width = 400;
  int height = 400;
  std::vector<Vec2> centers;  // reference particle centers [px]
  double radius_px = 2.0;     // blob sigma = radius / 2
  double peak = 0.8;
  double background = 0.0;
  DisplacementField displacement;  // empty: no motion
  double noise_sigma = 0.0;        // additive Gaussian pixel noise, 0 disables
  std::uint64_t seed = 0;

  // Uniformly scattered particles at least `margin_px` from the frame border.
  static ParticleScene random(int width, int height, std::size_t count, double radius_px, double margin_px,
                              std::uint64_t seed);
};

// Gaussian blobs on a uniform background, intensities clamped to [0, 1].
GrayImage render_particles(int width, int height, const std::vector<Vec2>& centers, double radius_px, double peak,
                           double background);

// (reference, displaced) image pair. Throws DomainError if a displaced
// particle leaves the frame.
std::pair<GrayImage, GrayImage> render_scene(const ParticleScene& scene);

// Additive Gaussian pixel noise, clamped to [0, 1]; sigma <= 0 returns the image unchanged.
GrayImage add_noise(GrayImage image, double sigma, std::uint64_t seed);

// Displaced particle centers; throws DomainError if any leaves the frame.
std::vector<Vec2> displaced_centers(const ParticleScene& scene);

}  // namespace tactile
