#include <doctest.h>

#include <cmath>
#include <tuple>
#include <vector>

#include "tactile/kernels.hpp"
#include "tactile/rng.hpp"

using namespace tactile;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1, 1);
  return v;
}

bool close(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-12 * (1.0 + std::abs(b[i]))) return false;
  return true;
}

}  // namespace

TEST_CASE("optimized kernels match the reference loops") {
  Rng rng(1);
  for (auto [rows, in, out] : {std::tuple<std::size_t, std::size_t, std::size_t>{1, 1, 1}, {3, 5, 7}, {16, 64, 33},
                               {37, 128, 96}, {400, 80, 48}}) {
    const auto x = random_vec(rows * in, rng), w = random_vec(out * in, rng), b = random_vec(out, rng);
    const auto dy = random_vec(rows * out, rng);

    std::vector<double> y0(rows * out), y1(rows * out), y2(rows * out);
    reference::affine_forward(x, rows, in, w, b, out, y0);
    kernels::affine_forward(x, rows, in, w, b, out, y1, true);
    kernels::affine_forward(x, rows, in, w, b, out, y2, false);
    CHECK(close(y1, y0));
    CHECK(y1 == y2);

    std::vector<double> dw0(out * in), db0(out), dw1(out * in, 7.0), db1(out, 7.0), dw2(out * in), db2(out);
    reference::weight_gradient(dy, x, rows, in, out, dw0, db0);
    kernels::weight_gradient(dy, x, rows, in, out, dw1, db1, true);
    kernels::weight_gradient(dy, x, rows, in, out, dw2, db2, false);
    CHECK(close(dw1, dw0));
    CHECK(close(db1, db0));
    CHECK(dw1 == dw2);
    CHECK(db1 == db2);

    std::vector<double> dx0(rows * in), dx1(rows * in, 7.0), dx2(rows * in);
    reference::input_gradient(dy, w, rows, in, out, dx0);
    kernels::input_gradient(dy, w, rows, in, out, dx1, true);
    kernels::input_gradient(dy, w, rows, in, out, dx2, false);
    CHECK(close(dx1, dx0));
    CHECK(dx1 == dx2);
  }
}

TEST_CASE("affine forward on a hand example") {
  const std::vector<double> x{1, 2, 3, 4}, w{1, 0, 0, 1, 1, 1}, b{0.5, -1, 0};
  std::vector<double> y(6);
  kernels::affine_forward(x, 2, 2, w, b, 3, y);
  CHECK(y == std::vector<double>{1.5, 1, 3, 3.5, 3, 7});
}
