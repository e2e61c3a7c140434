#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "support.hpp"
#include "tactile/errors.hpp"
#include "tactile/flow.hpp"
#include "tactile/render.hpp"

using namespace tactile;

namespace {

constexpr int kSide = 192;
constexpr int kBorder = 24;

ParticleScene textured(DisplacementField d) {
  auto scene = ParticleScene::random(kSide, kSide, 1400, 2.0, 8.0, 31);
  scene.displacement = std::move(d);
  return scene;
}

// Mean endpoint error against `truth` over the interior, where particles never cross the border.
template <typename F>
double interior_epe(const FlowField& f, F truth, double* worst = nullptr) {
  double sum = 0.0, max = 0.0;
  int n = 0;
  for (int y = kBorder; y < kSide - kBorder; ++y) {
    for (int x = kBorder; x < kSide - kBorder; ++x) {
      const Vec2 t = truth(x, y);
      const double e = std::hypot(f.u[f.index(x, y)] - t.x, f.v[f.index(x, y)] - t.y);
      sum += e;
      max = std::max(max, e);
      ++n;
    }
  }
  if (worst) *worst = max;
  return sum / n;
}

}  // namespace

TEST_CASE("identical images give zero flow") {
  const auto [ref, cur] = render_scene(textured({}));
  CHECK(ref == cur);
  const auto f = dense_flow(ref, cur);
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    CHECK(std::abs(f.u[i]) <= 0.05f);
    CHECK(std::abs(f.v[i]) <= 0.05f);
  }
}

TEST_CASE("uniform translation is recovered per pixel") {
  const auto shift = [](double, double) { return Vec2{3.0, -2.0}; };
  const auto [ref, cur] = render_scene(textured(shift));
  const auto f = dense_flow(ref, cur);
  double worst = 0.0;
  const double mean = interior_epe(f, shift, &worst);
  CHECK(mean < 0.05);
  CHECK(worst <= 0.2);
}

TEST_CASE("radial squeeze") {
  const double c = kSide / 2.0, reach = kSide / 2.0 - 8.0;
  const auto squeeze = [=](double x, double y) { return Vec2{-4.0 * (x - c) / reach, -4.0 * (y - c) / reach}; };
  const auto [ref, cur] = render_scene(textured(squeeze));
  const auto f = dense_flow(ref, cur);
  CHECK(interior_epe(f, squeeze) <= 0.3);
}

TEST_CASE("serial and parallel flow agree bit for bit") {
  const auto [ref, cur] = render_scene(textured([](double x, double y) { return Vec2{1.5 + 0.01 * x, -0.5 + 0.01 * y}; }));
  DisConfig serial;
  serial.parallel = false;
  const auto a = dense_flow(ref, cur);
  const auto b = dense_flow(ref, cur, serial);
  CHECK(a.u == b.u);
  CHECK(a.v == b.v);
}

TEST_CASE("flow input validation") {
  const GrayImage a(64, 64), b(64, 48);
  CHECK_THROWS_AS(dense_flow(a, b), InputError);
  GrayImage nan(64, 64);
  nan(3, 3) = std::nanf("");
  CHECK_THROWS_AS(dense_flow(nan, a), InputError);
}

TEST_CASE("pooling examples") {
  FlowField zero(40, 40);
  auto fz = pool_features(zero, {4, 4});
  REQUIRE(fz.values.size() == 32);
  for (double v : fz.values) CHECK(v == 0.0);

  FlowField ones(40, 40);
  std::fill(ones.u.begin(), ones.u.end(), 1.0f);
  std::fill(ones.v.begin(), ones.v.end(), 1.0f);
  const auto f1 = pool_features(ones, {5, 2});
  for (std::size_t r = 0; r < 10; ++r) {
    CHECK(f1.magnitude(r) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(f1.direction(r) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-12));
  }

  FlowField halves(40, 32);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 40; ++x) {
      halves.u[halves.index(x, y)] = x < 20 ? 1.0f : 0.0f;
      halves.v[halves.index(x, y)] = x < 20 ? 0.0f : -2.0f;
    }
  }
  const auto fh = pool_features(halves, {1, 2});
  CHECK(fh.magnitude(0) == doctest::Approx(1.0));
  CHECK(fh.direction(0) == doctest::Approx(0.0));
  CHECK(fh.magnitude(1) == doctest::Approx(2.0));
  CHECK(fh.direction(1) == doctest::Approx(-std::numbers::pi / 2));

  CHECK_THROWS_AS(pool_features(zero, {3, 4}), InputError);
  CHECK_THROWS_AS(pool_features(zero, {0, 4}), InputError);
}

TEST_CASE("render oracles") {
  const ParticleScene empty{64, 64, {}, 2.0, 0.8, 0.25};
  const auto [r0, c0] = render_scene(empty);
  for (float p : r0.pixels()) CHECK(p == 0.25f);
  CHECK(r0 == c0);

  ParticleScene one{64, 64, {{32.0, 32.0}}, 2.0, 0.8, 0.0};
  one.displacement = [](double, double) { return Vec2{5.0, 0.0}; };
  const auto [ref, cur] = render_scene(one);
  auto centroid = [](const GrayImage& img) {
    double sx = 0, sy = 0, sw = 0;
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) {
        sw += img(x, y);
        sx += img(x, y) * x;
        sy += img(x, y) * y;
      }
    return Vec2{sx / sw, sy / sw};
  };
  const Vec2 a = centroid(ref), b = centroid(cur);
  CHECK(std::abs(b.x - a.x - 5.0) <= 0.05);
  CHECK(std::abs(b.y - a.y) <= 0.05);

  one.displacement = [](double, double) { return Vec2{40.0, 0.0}; };
  CHECK_THROWS_AS(render_scene(one), DomainError);
}

TEST_CASE("render, flow and pool on a translation") {
  const double dx = 2.5, dy = 1.5;
  const auto [ref, cur] = render_scene(textured([=](double, double) { return Vec2{dx, dy}; }));
  auto f = dense_flow(ref, cur);
  // Crop to the interior so no region touches the border band.
  FlowField inner(kSide - 2 * kBorder, kSide - 2 * kBorder);
  for (int y = 0; y < inner.height; ++y)
    for (int x = 0; x < inner.width; ++x) {
      inner.u[inner.index(x, y)] = f.u[f.index(x + kBorder, y + kBorder)];
      inner.v[inner.index(x, y)] = f.v[f.index(x + kBorder, y + kBorder)];
    }
  const auto feats = pool_features(inner, {6, 6});
  for (std::size_t r = 0; r < 36; ++r) {
    CHECK(std::abs(feats.magnitude(r) - std::hypot(dx, dy)) <= 0.2);
    CHECK(std::abs(feats.direction(r) - std::atan2(dy, dx)) <= 0.05);
  }
}

TEST_CASE("flow dump round trip") {
  FlowField f(33, 32);
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    f.u[i] = 0.25f * static_cast<float>(i);
    f.v[i] = -1.0f / static_cast<float>(i + 1);
  }
  const auto bytes = encode_flow(f);
  CHECK(bytes.size() == 16 + 8 * f.u.size());
  CHECK(bytes.substr(0, 4) == "FLOW");
  const auto g = decode_flow(bytes);
  CHECK(g.width == 33);
  CHECK(g.u == f.u);
  CHECK(g.v == f.v);
  CHECK_THROWS_AS(decode_flow("FLOX" + bytes.substr(4)), InputError);
  CHECK_THROWS_AS(decode_flow(bytes.substr(0, bytes.size() - 1)), InputError);
}

TEST_CASE("image encodings round trip through 8 bits") {
  Rng rng(2);
  std::vector<float> px(40 * 36);
  for (auto& p : px) p = static_cast<float>(rng.uniform());
  const GrayImage img(40, 36, px);
  const auto q = quantize8(img);
  const auto dir = testing::scratch_dir("flow");
  for (const char* name : {"a.png", "a.pgm"}) {
    const auto bytes = std::string(name).ends_with("png") ? encode_png(img) : encode_pgm(img);
    std::ofstream(dir / name, std::ios::binary) << bytes;
    CHECK(read_image(dir / name) == q);
  }
  CHECK_THROWS(GrayImage(16, 16));
}
