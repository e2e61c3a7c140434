#include "tactile/flow.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>

#include "tactile/csv.hpp"
#include "tactile/errors.hpp"

namespace tactile {

namespace {

// Single-channel float plane without the GrayImage size invariant (pyramid levels shrink below 32).
struct Plane {
  int w = 0;
  int h = 0;
  std::vector<float> px;

  Plane() = default;
  Plane(int width, int height) : w(width), h(height), px(static_cast<std::size_t>(width) * height) {}

  float at(int x, int y) const { return px[static_cast<std::size_t>(y) * w + x]; }
  float& at(int x, int y) { return px[static_cast<std::size_t>(y) * w + x]; }

  // Catmull-Rom bicubic sample with coordinates and taps clamped to the plane.
  float sample(float x, float y) const {
    x = std::clamp(x, 0.0f, static_cast<float>(w - 1));
    y = std::clamp(y, 0.0f, static_cast<float>(h - 1));
    const int ix = static_cast<int>(x), iy = static_cast<int>(y);
    float wx[4], wy[4];
    weights(x - static_cast<float>(ix), wx);
    weights(y - static_cast<float>(iy), wy);
    float acc = 0.0f;
    for (int j = 0; j < 4; ++j) {
      const int yy = std::clamp(iy - 1 + j, 0, h - 1);
      float row = 0.0f;
      for (int i = 0; i < 4; ++i) row += wx[i] * at(std::clamp(ix - 1 + i, 0, w - 1), yy);
      acc += wy[j] * row;
    }
    return acc;
  }

  static void weights(float t, float* out) {
    const float t2 = t * t, t3 = t2 * t;
    out[0] = 0.5f * (-t3 + 2.0f * t2 - t);
    out[1] = 0.5f * (3.0f * t3 - 5.0f * t2 + 2.0f);
    out[2] = 0.5f * (-3.0f * t3 + 4.0f * t2 + t);
    out[3] = 0.5f * (t3 - t2);
  }
};

Plane to_plane(const GrayImage& img) {
  Plane p(img.width(), img.height());
  p.px = img.pixels();
  return p;
}

Plane downsample(const Plane& src, bool parallel) {
  Plane dst(src.w / 2, src.h / 2);
#pragma omp parallel for schedule(static) if (parallel)
  for (int y = 0; y < dst.h; ++y) {
    for (int x = 0; x < dst.w; ++x) {
      dst.at(x, y) = 0.25f * (src.at(2 * x, 2 * y) + src.at(2 * x + 1, 2 * y) + src.at(2 * x, 2 * y + 1) +
                              src.at(2 * x + 1, 2 * y + 1));
    }
  }
  return dst;
}

void gradients(const Plane& img, Plane& gx, Plane& gy, bool parallel) {
  gx = Plane(img.w, img.h);
  gy = Plane(img.w, img.h);
#pragma omp parallel for schedule(static) if (parallel)
  for (int y = 0; y < img.h; ++y) {
    const int ym = std::max(y - 1, 0), yp = std::min(y + 1, img.h - 1);
    for (int x = 0; x < img.w; ++x) {
      const int xm = std::max(x - 1, 0), xp = std::min(x + 1, img.w - 1);
      gx.at(x, y) = (img.at(xp, y) - img.at(xm, y)) / static_cast<float>(xp - xm);
      gy.at(x, y) = (img.at(x, yp) - img.at(x, ym)) / static_cast<float>(yp - ym);
    }
  }
}

// Patch origins along one axis: 0, stride, 2*stride, ... plus a final patch flush with the border.
std::vector<int> patch_origins(int length, int patch, int stride) {
  std::vector<int> out;
  for (int p = 0; p + patch <= length; p += stride) out.push_back(p);
  if (out.empty() || out.back() + patch < length) out.push_back(length - patch);
  return out;
}

// Indices of patches covering each coordinate along one axis.
std::vector<std::vector<int>> coverage(const std::vector<int>& origins, int length, int patch) {
  std::vector<std::vector<int>> cover(static_cast<std::size_t>(length));
  for (std::size_t i = 0; i < origins.size(); ++i) {
    for (int c = origins[i]; c < origins[i] + patch; ++c) cover[static_cast<std::size_t>(c)].push_back(static_cast<int>(i));
  }
  return cover;
}

struct PatchResult {
  float u = 0.0f;
  float v = 0.0f;
  bool valid = false;
};

float patch_ssd(const Plane& i0, const Plane& i1, int ox, int oy, int patch, float u, float v) {
  float s = 0.0f;
  for (int y = oy; y < oy + patch; ++y) {
    for (int x = ox; x < ox + patch; ++x) {
      const float e = i1.sample(static_cast<float>(x) + u, static_cast<float>(y) + v) - i0.at(x, y);
      s += e * e;
    }
  }
  return s;
}

// Inverse-compositional translation-only alignment of one patch.
PatchResult align_patch(const Plane& i0, const Plane& i1, const Plane& gx, const Plane& gy, int ox, int oy,
                        float u0, float v0, const DisConfig& cfg) {
  const int p = cfg.patch_size;
  const float n = static_cast<float>(p * p);
  float mean = 0.0f, sq = 0.0f;
  float hxx = 0.0f, hxy = 0.0f, hyy = 0.0f;
  for (int y = oy; y < oy + p; ++y) {
    for (int x = ox; x < ox + p; ++x) {
      const float t = i0.at(x, y);
      mean += t;
      sq += t * t;
      const float a = gx.at(x, y), b = gy.at(x, y);
      hxx += a * a;
      hxy += a * b;
      hyy += b * b;
    }
  }
  mean /= n;
  const float variance = sq / n - mean * mean;
  const float det = hxx * hyy - hxy * hxy;
  const float trace = hxx + hyy;
  PatchResult out{u0, v0, false};
  if (variance < cfg.min_variance || !(det > 1e-6f * trace * trace) || !(trace > 0.0f)) return out;

  float u = u0, v = v0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    float bx = 0.0f, by = 0.0f;
    for (int y = oy; y < oy + p; ++y) {
      for (int x = ox; x < ox + p; ++x) {
        const float e = i1.sample(static_cast<float>(x) + u, static_cast<float>(y) + v) - i0.at(x, y);
        bx += gx.at(x, y) * e;
        by += gy.at(x, y) * e;
      }
    }
    const float du = (hyy * bx - hxy * by) / det;
    const float dv = (hxx * by - hxy * bx) / det;
    u -= du;
    v -= dv;
    if (std::sqrt(du * du + dv * dv) < cfg.min_update) break;
  }
  // Runaway or out-of-frame solutions are left to the neighbour fill.
  const bool inside = ox + u >= 0.0f && oy + v >= 0.0f && ox + p - 1 + u <= static_cast<float>(i1.w - 1) &&
                      oy + p - 1 + v <= static_cast<float>(i1.h - 1);
  if (!std::isfinite(u) || !std::isfinite(v) || !inside || std::hypot(u - u0, v - v0) > 0.5f * static_cast<float>(p)) {
    return out;
  }
  if (patch_ssd(i0, i1, ox, oy, p, u, v) > patch_ssd(i0, i1, ox, oy, p, u0, v0)) {
    u = u0;
    v = v0;
  }
  out = {u, v, true};
  return out;
}

// One pyramid level: patch search seeded by `init`, then densification.
void refine_level(const Plane& i0, const Plane& i1, Plane& flow_u, Plane& flow_v, const DisConfig& cfg) {
  Plane gx, gy;
  gradients(i0, gx, gy, cfg.parallel);
  const int p = cfg.patch_size;
  const auto xs = patch_origins(i0.w, p, cfg.stride);
  const auto ys = patch_origins(i0.h, p, cfg.stride);
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
  std::vector<PatchResult> patches(static_cast<std::size_t>(nx) * ny);

#pragma omp parallel for schedule(dynamic, 4) if (cfg.parallel)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int ox = xs[static_cast<std::size_t>(i)], oy = ys[static_cast<std::size_t>(j)];
      float su = 0.0f, sv = 0.0f;
      for (int y = oy; y < oy + p; ++y) {
        for (int x = ox; x < ox + p; ++x) {
          su += flow_u.at(x, y);
          sv += flow_v.at(x, y);
        }
      }
      const float inv = 1.0f / static_cast<float>(p * p);
      patches[static_cast<std::size_t>(j) * nx + i] = align_patch(i0, i1, gx, gy, ox, oy, su * inv, sv * inv, cfg);
    }
  }

  // Textureless patches take the mean of their valid 8-neighbours.
  std::vector<PatchResult> filled = patches;
#pragma omp parallel for schedule(static) if (cfg.parallel)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto& self = patches[static_cast<std::size_t>(j) * nx + i];
      if (self.valid) continue;
      float su = 0.0f, sv = 0.0f;
      int count = 0;
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const int a = i + di, b = j + dj;
          if ((di == 0 && dj == 0) || a < 0 || b < 0 || a >= nx || b >= ny) continue;
          const auto& nb = patches[static_cast<std::size_t>(b) * nx + a];
          if (!nb.valid) continue;
          su += nb.u;
          sv += nb.v;
          ++count;
        }
      }
      if (count > 0) {
        auto& f = filled[static_cast<std::size_t>(j) * nx + i];
        f.u = su / static_cast<float>(count);
        f.v = sv / static_cast<float>(count);
      }
    }
  }

  // Densify: photometric-error weighted average of the patches covering each pixel.
  const auto cover_x = coverage(xs, i0.w, p);
  const auto cover_y = coverage(ys, i0.h, p);
#pragma omp parallel for schedule(static) if (cfg.parallel)
  for (int y = 0; y < i0.h; ++y) {
    for (int x = 0; x < i0.w; ++x) {
      float wsum = 0.0f, su = 0.0f, sv = 0.0f;
      for (int j : cover_y[static_cast<std::size_t>(y)]) {
        for (int i : cover_x[static_cast<std::size_t>(x)]) {
          const auto& pr = filled[static_cast<std::size_t>(j) * nx + i];
          const float diff = i1.sample(static_cast<float>(x) + pr.u, static_cast<float>(y) + pr.v) - i0.at(x, y);
          const float w = 1.0f / std::max(1.0f, 255.0f * std::abs(diff));
          wsum += w;
          su += w * pr.u;
          sv += w * pr.v;
        }
      }
      flow_u.at(x, y) = su / wsum;
      flow_v.at(x, y) = sv / wsum;
    }
  }
}

void upsample(const Plane& coarse, Plane& fine, bool parallel) {
#pragma omp parallel for schedule(static) if (parallel)
  for (int y = 0; y < fine.h; ++y) {
    for (int x = 0; x < fine.w; ++x) {
      const float cx = (static_cast<float>(x) + 0.5f) * 0.5f - 0.5f;
      const float cy = (static_cast<float>(y) + 0.5f) * 0.5f - 0.5f;
      fine.at(x, y) = 2.0f * coarse.sample(cx, cy);
    }
  }
}

void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFFU));
}

std::uint32_t get_u32(std::string_view s, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[at + i])) << (8 * i);
  return v;
}

}  // namespace

nlohmann::json to_json(const DisConfig& c) {
  return {{"levels", c.levels},         {"patch_size", c.patch_size},     {"stride", c.stride},
          {"max_iters", c.max_iters},   {"min_update", c.min_update},     {"min_variance", c.min_variance}};
}

DisConfig dis_config_from_json(const nlohmann::json& j, DisConfig c) {
  try {
    c.levels = j.value("levels", c.levels);
    c.patch_size = j.value("patch_size", c.patch_size);
    c.stride = j.value("stride", c.stride);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.min_update = j.value("min_update", c.min_update);
    c.min_variance = j.value("min_variance", c.min_variance);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid flow config: ") + e.what());
  }
  return c;
}

FlowField dense_flow(const GrayImage& ref, const GrayImage& cur, const DisConfig& config) {
  if (ref.width() != cur.width() || ref.height() != cur.height()) {
    throw InputError("image sizes differ: " + std::to_string(ref.width()) + "x" + std::to_string(ref.height()) +
                     " vs " + std::to_string(cur.width()) + "x" + std::to_string(cur.height()));
  }
  ref.validate();
  cur.validate();
  if (config.patch_size < 2 || config.stride < 1 || config.stride > config.patch_size || config.levels < 1 ||
      config.max_iters < 1) {
    throw InputError("invalid flow configuration");
  }

  // Coarsest level keeps at least two patches per side.
  int levels = 1;
  while (levels < config.levels &&
         std::min(ref.width(), ref.height()) / (1 << levels) >= 2 * config.patch_size) {
    ++levels;
  }

  std::vector<Plane> p0{to_plane(ref)}, p1{to_plane(cur)};
  for (int l = 1; l < levels; ++l) {
    p0.push_back(downsample(p0.back(), config.parallel));
    p1.push_back(downsample(p1.back(), config.parallel));
  }

  Plane fu(p0.back().w, p0.back().h), fv(p0.back().w, p0.back().h);
  for (int l = levels - 1; l >= 0; --l) {
    const auto lu = static_cast<std::size_t>(l);
    if (l != levels - 1) {
      Plane nu(p0[lu].w, p0[lu].h), nv(p0[lu].w, p0[lu].h);
      upsample(fu, nu, config.parallel);
      upsample(fv, nv, config.parallel);
      fu = std::move(nu);
      fv = std::move(nv);
    }
    refine_level(p0[lu], p1[lu], fu, fv, config);
  }

  FlowField out(ref.width(), ref.height());
  out.u = std::move(fu.px);
  out.v = std::move(fv.px);
  return out;
}

FeatureVector pool_features(const FlowField& flow, RegionGrid regions) {
  if (regions.rows == 0 || regions.cols == 0 || flow.width % static_cast<int>(regions.cols) != 0 ||
      flow.height % static_cast<int>(regions.rows) != 0) {
    throw InputError("region grid " + std::to_string(regions.rows) + "x" + std::to_string(regions.cols) +
                     " does not tile a " + std::to_string(flow.width) + "x" + std::to_string(flow.height) +
                     " frame");
  }
  const int rw = flow.width / static_cast<int>(regions.cols);
  const int rh = flow.height / static_cast<int>(regions.rows);
  FeatureVector out{regions, std::vector<double>(2 * regions.size())};
  const auto nregions = static_cast<long>(regions.size());
#pragma omp parallel for schedule(static)
  for (long r = 0; r < nregions; ++r) {
    const auto ru = static_cast<std::size_t>(r);
    const int row = static_cast<int>(ru / regions.cols), col = static_cast<int>(ru % regions.cols);
    double su = 0.0, sv = 0.0;
    for (int y = row * rh; y < (row + 1) * rh; ++y) {
      for (int x = col * rw; x < (col + 1) * rw; ++x) {
        su += flow.u[flow.index(x, y)];
        sv += flow.v[flow.index(x, y)];
      }
    }
    const double n = static_cast<double>(rw) * rh;
    const double mu = su / n, mv = sv / n;
    const double mag = std::hypot(mu, mv);
    double dir = mag < kDirectionEpsilon ? 0.0 : std::atan2(mv, mu);
    if (dir <= -std::numbers::pi) dir = std::numbers::pi;
    out.values[2 * ru] = mag;
    out.values[2 * ru + 1] = dir;
  }
  return out;
}

std::string encode_flow(const FlowField& flow) {
  std::string s = "FLOW";
  put_u32(s, static_cast<std::uint32_t>(flow.width));
  put_u32(s, static_cast<std::uint32_t>(flow.height));
  put_u32(s, 0);
  s.reserve(16 + flow.u.size() * 8);
  for (std::size_t i = 0; i < flow.u.size(); ++i) {
    put_u32(s, std::bit_cast<std::uint32_t>(flow.u[i]));
    put_u32(s, std::bit_cast<std::uint32_t>(flow.v[i]));
  }
  return s;
}

FlowField decode_flow(std::string_view bytes) {
  if (bytes.size() < 16 || bytes.substr(0, 4) != "FLOW") throw InputError("not a flow dump (bad magic)");
  const auto w = get_u32(bytes, 4), h = get_u32(bytes, 8);
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (bytes.size() != 16 + 8 * n) throw InputError("flow dump size does not match its header");
  FlowField f(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < n; ++i) {
    f.u[i] = std::bit_cast<float>(get_u32(bytes, 16 + 8 * i));
    f.v[i] = std::bit_cast<float>(get_u32(bytes, 20 + 8 * i));
  }
  return f;
}

std::string format_features_csv(const FeatureVector& features) {
  std::string s = "region_index,magnitude_px,direction_rad\n";
  for (std::size_t r = 0; r < features.regions.size(); ++r) {
    s += std::to_string(r) + ',' + csv::format_exact(features.magnitude(r)) + ',' +
         csv::format_exact(features.direction(r)) + '\n';
  }
  return s;
}

}  // namespace tactile
