#pragma once

#include <array>
#include <cmath>

namespace tactile {

// Force vector [N] with x, y horizontal and z pointing from the camera to the surface.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double operator[](std::size_t axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  double& operator[](std::size_t axis) { return axis == 0 ? x : (axis == 1 ? y : z); }

  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

// Neumaier-compensated componentwise accumulator.
class Vec3Sum {
 public:
  void add(const Vec3& v) {
    for (std::size_t a = 0; a < 3; ++a) {
      const double t = sum_[a] + v[a];
      if (std::abs(sum_[a]) >= std::abs(v[a])) {
        comp_[a] += (sum_[a] - t) + v[a];
      } else {
        comp_[a] += (v[a] - t) + sum_[a];
      }
      sum_[a] = t;
    }
  }
  Vec3 value() const { return {sum_[0] + comp_[0], sum_[1] + comp_[1], sum_[2] + comp_[2]}; }

 private:
  std::array<double, 3> sum_{};
  std::array<double, 3> comp_{};
};

}  // namespace tactile
