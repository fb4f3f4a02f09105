#include "rsm/kernels.hpp"

#include <omp.h>

#include "rsm/error.hpp"
#include "rsm/parallel.hpp"

namespace rsm::kernels {

std::size_t reflect_index(long long i, std::size_t n) {
  const auto period = 2 * static_cast<long long>(n);
  long long m = i % period;
  if (m < 0) m += period;
  return static_cast<std::size_t>(m < static_cast<long long>(n) ? m : period - 1 - m);
}

namespace {

void check_smooth_args(std::span<const double> field, std::size_t width, std::size_t height,
                       std::span<const double> kernel, std::span<double> out) {
  if (field.size() != width * height || out.size() != field.size()) {
    throw DimensionError("smooth_separable: buffer size mismatch");
  }
  if (kernel.size() % 2 == 0) throw ConfigError("smooth_separable: kernel length must be odd");
}

// Horizontal pass for one row, then vertical pass for one row. Both read only
// the input of their pass, so rows are independent.
inline void smooth_row_h(const double* in, double* out, std::size_t width,
                         std::span<const double> kernel) {
  const auto radius = static_cast<long long>(kernel.size() / 2);
  for (std::size_t c = 0; c < width; ++c) {
    double acc = 0.0;
    for (long long t = -radius; t <= radius; ++t) {
      acc += kernel[static_cast<std::size_t>(t + radius)] *
             in[reflect_index(static_cast<long long>(c) + t, width)];
    }
    out[c] = acc;
  }
}

inline void smooth_row_v(const double* in, double* out, std::size_t r, std::size_t width,
                         std::size_t height, std::span<const double> kernel) {
  const auto radius = static_cast<long long>(kernel.size() / 2);
  for (std::size_t c = 0; c < width; ++c) {
    double acc = 0.0;
    for (long long t = -radius; t <= radius; ++t) {
      const auto rr = reflect_index(static_cast<long long>(r) + t, height);
      acc += kernel[static_cast<std::size_t>(t + radius)] * in[rr * width + c];
    }
    out[r * width + c] = acc;
  }
}

inline void spmv_row(const CsrMatrix& a, std::span<const double> x, std::span<double> y,
                     std::size_t i) {
  double acc = 0.0;
  for (auto p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) acc += a.val[p] * x[a.col[p]];
  y[i] = acc;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
  return acc;
}

}  // namespace

namespace serial {

void smooth_separable(std::span<const double> field, std::size_t width, std::size_t height,
                      std::span<const double> kernel, std::span<double> out) {
  check_smooth_args(field, width, height, kernel, out);
  std::vector<double> tmp(field.size());
  for (std::size_t r = 0; r < height; ++r)
    smooth_row_h(field.data() + r * width, tmp.data() + r * width, width, kernel);
  for (std::size_t r = 0; r < height; ++r)
    smooth_row_v(tmp.data(), out.data(), r, width, height, kernel);
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < a.n; ++i) spmv_row(a, x, y, i);
}

void gram(const Dataset& data, std::span<const std::size_t> rows, std::span<double> out) {
  const auto n = rows.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const double v = dot(data.row(rows[a]), data.row(rows[b]));
      out[a * n + b] = v;
      out[b * n + a] = v;
    }
  }
}

}  // namespace serial

namespace omp {

void smooth_separable(std::span<const double> field, std::size_t width, std::size_t height,
                      std::span<const double> kernel, std::span<double> out) {
  check_smooth_args(field, width, height, kernel, out);
  std::vector<double> tmp(field.size());
  const auto h = static_cast<long long>(height);
  const int workers = parallel::jobs();
#pragma omp parallel num_threads(workers)
  {
#pragma omp for schedule(static)
    for (long long r = 0; r < h; ++r) {
      const auto row = static_cast<std::size_t>(r);
      smooth_row_h(field.data() + row * width, tmp.data() + row * width, width, kernel);
    }
#pragma omp for schedule(static)
    for (long long r = 0; r < h; ++r) {
      smooth_row_v(tmp.data(), out.data(), static_cast<std::size_t>(r), width, height, kernel);
    }
  }
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<long long>(a.n);
#pragma omp parallel for schedule(static) num_threads(parallel::jobs())
  for (long long i = 0; i < n; ++i) spmv_row(a, x, y, static_cast<std::size_t>(i));
}

void gram(const Dataset& data, std::span<const std::size_t> rows, std::span<double> out) {
  const auto n = static_cast<long long>(rows.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(parallel::jobs())
  for (long long a = 0; a < n; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    for (std::size_t b = ua; b < rows.size(); ++b) {
      const double v = dot(data.row(rows[ua]), data.row(rows[b]));
      out[ua * rows.size() + b] = v;
      out[b * rows.size() + ua] = v;
    }
  }
}

}  // namespace omp

}  // namespace rsm::kernels
