#include "tactile/kernels.hpp"

#include <algorithm>

namespace tactile::kernels {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

void affine_forward(std::span<const double> x, std::size_t rows, std::size_t in, std::span<const double> w,
                    std::span<const double> b, std::size_t out, std::span<double> y, bool parallel) {
  const double* xp = x.data();
  const double* wp = w.data();
  const double* bp = b.data();
  double* yp = y.data();
  const auto nrows = static_cast<long>(rows);
#pragma omp parallel for schedule(static) if (parallel && rows > 1)
  for (long r = 0; r < nrows; ++r) {
    const double* xr = xp + static_cast<std::size_t>(r) * in;
    double* yr = yp + static_cast<std::size_t>(r) * out;
    for (std::size_t o = 0; o < out; ++o) yr[o] = bp[o] + dot(xr, wp + o * in, in);
  }
}

void weight_gradient(std::span<const double> dy, std::span<const double> x, std::size_t rows, std::size_t in,
                     std::size_t out, std::span<double> dw, std::span<double> db, bool parallel) {
  const double* dyp = dy.data();
  const double* xp = x.data();
  double* dwp = dw.data();
  double* dbp = db.data();
  const auto nout = static_cast<long>(out);
#pragma omp parallel for schedule(static) if (parallel && out > 1)
  for (long o = 0; o < nout; ++o) {
    const auto ou = static_cast<std::size_t>(o);
    double* row = dwp + ou * in;
    std::fill(row, row + in, 0.0);
    double bsum = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double g = dyp[r * out + ou];
      bsum += g;
      if (g == 0.0) continue;
      const double* xr = xp + r * in;
      for (std::size_t i = 0; i < in; ++i) row[i] += g * xr[i];
    }
    dbp[ou] = bsum;
  }
}

void input_gradient(std::span<const double> dy, std::span<const double> w, std::size_t rows, std::size_t in,
                    std::size_t out, std::span<double> dx, bool parallel) {
  const double* dyp = dy.data();
  const double* wp = w.data();
  double* dxp = dx.data();
  const auto nrows = static_cast<long>(rows);
#pragma omp parallel for schedule(static) if (parallel && rows > 1)
  for (long r = 0; r < nrows; ++r) {
    const auto ru = static_cast<std::size_t>(r);
    double* dxr = dxp + ru * in;
    std::fill(dxr, dxr + in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double g = dyp[ru * out + o];
      if (g == 0.0) continue;
      const double* wo = wp + o * in;
      for (std::size_t i = 0; i < in; ++i) dxr[i] += g * wo[i];
    }
  }
}

}  // namespace tactile::kernels

namespace tactile::reference {

void affine_forward(std::span<const double> x, std::size_t rows, std::size_t in, std::span<const double> w,
                    std::span<const double> b, std::size_t out, std::span<double> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t o = 0; o < out; ++o) {
      double s = b[o];
      for (std::size_t i = 0; i < in; ++i) s += x[r * in + i] * w[o * in + i];
      y[r * out + o] = s;
    }
  }
}

void weight_gradient(std::span<const double> dy, std::span<const double> x, std::size_t rows, std::size_t in,
                     std::size_t out, std::span<double> dw, std::span<double> db) {
  for (std::size_t o = 0; o < out; ++o) {
    db[o] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) db[o] += dy[r * out + o];
    for (std::size_t i = 0; i < in; ++i) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows; ++r) s += dy[r * out + o] * x[r * in + i];
      dw[o * in + i] = s;
    }
  }
}

void input_gradient(std::span<const double> dy, std::span<const double> w, std::size_t rows, std::size_t in,
                    std::size_t out, std::span<double> dx) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < in; ++i) {
      double s = 0.0;
      for (std::size_t o = 0; o < out; ++o) s += dy[r * out + o] * w[o * in + i];
      dx[r * in + i] = s;
    }
  }
}

}  // namespace tactile::reference
