#pragma once

// Data-parallel inner kernels. Each has a plain serial reference and an
// OpenMP variant; the two produce bit-identical output (every output element
// is computed by exactly one thread with the same operation order), which
// tests/test_kernels.cpp checks and bench/ compares for speed.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rsm/core.hpp"

namespace rsm {

/// Square sparse matrix in compressed-row form.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col;
  std::vector<double> val;
};

namespace kernels {

/// Index into [0, n) under half-sample symmetric reflection (d c b a | a b c d | d c b a).
std::size_t reflect_index(long long i, std::size_t n);

namespace serial {
/// Separable convolution of a row-major width x height field with a
/// symmetric 1-D kernel (odd length), reflect padding at the borders.
void smooth_separable(std::span<const double> field, std::size_t width, std::size_t height,
                      std::span<const double> kernel, std::span<double> out);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
/// G[a][b] = <X_{rows[a]}, X_{rows[b]}> for the listed dataset rows.
void gram(const Dataset& data, std::span<const std::size_t> rows, std::span<double> out);
}  // namespace serial

namespace omp {
void smooth_separable(std::span<const double> field, std::size_t width, std::size_t height,
                      std::span<const double> kernel, std::span<double> out);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
void gram(const Dataset& data, std::span<const std::size_t> rows, std::span<double> out);
}  // namespace omp

}  // namespace kernels
}  // namespace rsm
