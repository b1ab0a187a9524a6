// Scalar reference kernels. Every SIMD variant is tested against these.

#include <algorithm>
#include <cmath>

#include "laat/kernels.hpp"

namespace laat::kernels {
namespace {

void sq_dists_scalar(const double* base, std::size_t dim_stride,
                     std::size_t dims, std::size_t count, const double* q,
                     double* out) {
  for (std::size_t k = 0; k < count; ++k) out[k] = 0.0;
  for (std::size_t d = 0; d < dims; ++d) {
    const double* col = base + d * dim_stride;
    const double qd = q[d];
    for (std::size_t k = 0; k < count; ++k) {
      const double diff = col[k] - qd;
      out[k] += diff * diff;
    }
  }
}

double element_sq_dist(const double* base, std::size_t dim_stride,
                       std::size_t dims, std::size_t k, const double* q) {
  double acc = 0.0;
  for (std::size_t d = 0; d < dims; ++d) {
    const double diff = base[d * dim_stride + k] - q[d];
    acc += diff * diff;
  }
  return acc;
}

void min_update_sq_dists_scalar(const double* base, std::size_t dim_stride,
                                std::size_t dims, std::size_t count,
                                const double* q, double* inout) {
  for (std::size_t k = 0; k < count; ++k) {
    const double d2 = element_sq_dist(base, dim_stride, dims, k, q);
    if (d2 < inout[k]) inout[k] = d2;
  }
}

double min_sq_dist_scalar(const double* base, std::size_t dim_stride,
                          std::size_t dims, std::size_t count,
                          const double* q) {
  double best = element_sq_dist(base, dim_stride, dims, 0, q);
  for (std::size_t k = 1; k < count; ++k) {
    best = std::min(best, element_sq_dist(base, dim_stride, dims, k, q));
  }
  return best;
}

void axpby_scalar(double a, const double* x, double b, const double* y,
                  std::size_t count, double* v) {
  for (std::size_t k = 0; k < count; ++k) v[k] = a * x[k] + b * y[k];
}

double exp_shift_sum_scalar(double* v, std::size_t count, double scale) {
  double vmax = v[0];
  for (std::size_t k = 1; k < count; ++k) vmax = std::max(vmax, v[k]);
  double total = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    v[k] = std::exp(scale * (v[k] - vmax));
    total += v[k];
  }
  return total;
}

double sum_scalar(const double* v, std::size_t count) {
  double total = 0.0;
  for (std::size_t k = 0; k < count; ++k) total += v[k];
  return total;
}

void scale_scalar(double* v, std::size_t count, double a) {
  for (std::size_t k = 0; k < count; ++k) v[k] *= a;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      "scalar",          sq_dists_scalar, min_update_sq_dists_scalar,
      min_sq_dist_scalar, axpby_scalar,   exp_shift_sum_scalar,
      sum_scalar,        scale_scalar,
  };
  return ops;
}

}  // namespace laat::kernels
