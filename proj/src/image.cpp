#include "tactile/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "tactile/errors.hpp"
#include "tactile/io.hpp"

namespace tactile {

GrayImage::GrayImage(int width, int height, float fill)
    : GrayImage(width, height, std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill)) {}

GrayImage::GrayImage(int width, int height, std::vector<float> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width_ < kMinSide || height_ < kMinSide) {
    throw InputError("image must be at least 32x32 pixels (got " + std::to_string(width_) + "x" +
                     std::to_string(height_) + ")");
  }
  if (pixels_.size() != static_cast<std::size_t>(width_) * height_) throw InputError("pixel count does not match size");
}

void GrayImage::validate() const {
  for (float p : pixels_) {
    if (!std::isfinite(p) || p < 0.0f || p > 1.0f) throw InputError("image intensities must be finite and in [0, 1]");
  }
}

namespace {

std::uint8_t to_byte(float v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

GrayImage from_bytes(int w, int h, const std::vector<std::uint8_t>& bytes) {
  std::vector<float> px(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) px[i] = static_cast<float>(bytes[i]) / 255.0f;
  return {w, h, std::move(px)};
}

}  // namespace

GrayImage quantize8(const GrayImage& image) {
  std::vector<std::uint8_t> bytes(image.pixels().size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = to_byte(image.pixels()[i]);
  return from_bytes(image.width(), image.height(), bytes);
}

namespace {

GrayImage decode_pgm(const std::string& data, const std::string& name) {
  std::istringstream in(data);
  std::string magic;
  in >> magic;
  auto next_int = [&]() {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
      in >> std::ws;
    }
    int v = -1;
    in >> v;
    return v;
  };
  const int w = next_int(), h = next_int(), maxval = next_int();
  if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255) {
    throw InputError(name + ": only 8-bit binary PGM (P5, maxval 255) is supported");
  }
  in.get();
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw InputError(name + ": truncated PGM data");
  return from_bytes(w, h, bytes);
}

GrayImage decode_png(const std::string& data, const std::string& name) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, data.data(), data.size())) {
    throw InputError(name + ": " + img.message);
  }
  img.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> bytes(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, bytes.data(), 0, nullptr)) {
    png_image_free(&img);
    throw InputError(name + ": " + img.message);
  }
  return from_bytes(static_cast<int>(img.width), static_cast<int>(img.height), bytes);
}

}  // namespace

GrayImage read_image(const std::filesystem::path& path) {
  const std::string data = io::read_file(path);
  if (data.size() >= 8 && static_cast<unsigned char>(data[0]) == 0x89 && data.compare(1, 3, "PNG") == 0) {
    return decode_png(data, path.string());
  }
  if (data.size() >= 2 && data[0] == 'P' && data[1] == '5') return decode_pgm(data, path.string());
  throw InputError(path.string() + ": unsupported image format (expected PNG or binary PGM)");
}

std::string encode_png(const GrayImage& image) {
  std::vector<std::uint8_t> bytes(image.pixels().size());
  std::transform(image.pixels().begin(), image.pixels().end(), bytes.begin(), to_byte);
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, bytes.data(), 0, nullptr)) {
    throw IoError(std::string("PNG encoding failed: ") + img.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, bytes.data(), 0, nullptr)) {
    throw IoError(std::string("PNG encoding failed: ") + img.message);
  }
  out.resize(size);
  return out;
}

std::string encode_pgm(const GrayImage& image) {
  std::string out = "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  for (float p : image.pixels()) out.push_back(static_cast<char>(to_byte(p)));
  return out;
}

}  // namespace tactile
