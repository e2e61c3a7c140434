#pragma once

// Dense kernels for the fully connected network, row-major throughout.
//
// Every output element is produced by exactly one thread with a fixed
// summation order, so results do not depend on the thread count and the
// `parallel = false` path is bit-identical to the parallel one.

#include <cstddef>
#include <span>

namespace tactile::kernels {

// y[r, o] = b[o] + sum_i x[r, i] w[o, i]      x: rows x in, w: out x in, y: rows x out
void affine_forward(std::span<const double> x, std::size_t rows, std::size_t in, std::span<const double> w,
                    std::span<const double> b, std::size_t out, std::span<double> y, bool parallel = true);

// dw[o, i] = sum_r dy[r, o] x[r, i],  db[o] = sum_r dy[r, o]   (overwrites dw, db)
void weight_gradient(std::span<const double> dy, std::span<const double> x, std::size_t rows, std::size_t in,
                     std::size_t out, std::span<double> dw, std::span<double> db, bool parallel = true);

// dx[r, i] = sum_o dy[r, o] w[o, i]   (overwrites dx)
void input_gradient(std::span<const double> dy, std::span<const double> w, std::size_t rows, std::size_t in,
                    std::size_t out, std::span<double> dx, bool parallel = true);

}  // namespace tactile::kernels

namespace tactile::reference {

// Textbook triple loops; kept as the test oracle and benchmark baseline.
void affine_forward(std::span<const double> x, std::size_t rows, std::size_t in, std::span<const double> w,
                    std::span<const double> b, std::size_t out, std::span<double> y);
void weight_gradient(std::span<const double> dy, std::span<const double> x, std::size_t rows, std::size_t in,
                     std::size_t out, std::span<double> dw, std::span<double> db);
void input_gradient(std::span<const double> dy, std::span<const double> w, std::size_t rows, std::size_t in,
                    std::size_t out, std::span<double> dx);

}  // namespace tactile::reference
