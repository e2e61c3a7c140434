#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tactile {

// Grayscale image with row-major intensities in [0, 1]; at least 32x32.
class GrayImage {
 public:
  static constexpr int kMinSide = 32;

  GrayImage(int width, int height, float fill = 0.0f);
  GrayImage(int width, int height, std::vector<float> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  float operator()(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  float& operator()(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  const std::vector<float>& pixels() const { return pixels_; }

  // Throws InputError if any pixel is non-finite or outside [0, 1].
  void validate() const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_;
  int height_;
  std::vector<float> pixels_;
};

// 8-bit grayscale ingestion; PNG (any color type, reduced to gray) or binary PGM (P5).
GrayImage read_image(const std::filesystem::path& path);

// Image as it reads back after an 8-bit round trip.
GrayImage quantize8(const GrayImage& image);

// 8-bit encodings (intensity * 255, rounded).
std::string encode_png(const GrayImage& image);
std::string encode_pgm(const GrayImage& image);

}  // namespace tactile
