#pragma once

#include <cstddef>

namespace laat::kernels {

// Data-parallel inner loops behind neighborhood search, the walker softmax,
// pheromone evaporation and the Hausdorff sweep. Coordinate arguments use an
// SoA layout: dimension d of element k lives at base[d * dim_stride + k].
//
// A scalar reference implementation always exists; on x86-64 an AVX2+FMA
// variant is selected at runtime when the CPU supports it. The variants are
// equivalence-tested against each other, not guaranteed bit-identical.
struct Ops {
  const char* name;

  // out[k] = sum_d (base[d*dim_stride + k] - q[d])^2
  void (*sq_dists)(const double* base, std::size_t dim_stride,
                   std::size_t dims, std::size_t count, const double* q,
                   double* out);

  // inout[k] = min(inout[k], squared distance of element k to q)
  void (*min_update_sq_dists)(const double* base, std::size_t dim_stride,
                              std::size_t dims, std::size_t count,
                              const double* q, double* inout);

  // min over k of the squared distance of element k to q; count >= 1
  double (*min_sq_dist)(const double* base, std::size_t dim_stride,
                        std::size_t dims, std::size_t count, const double* q);

  // v[k] = a*x[k] + b*y[k]
  void (*axpby)(double a, const double* x, double b, const double* y,
                std::size_t count, double* v);

  // v[k] = exp(scale * (v[k] - max_k v[k])); returns sum_k v[k]; count >= 1
  double (*exp_shift_sum)(double* v, std::size_t count, double scale);

  double (*sum)(const double* v, std::size_t count);

  // v[k] *= a
  void (*scale)(double* v, std::size_t count, double a);
};

const Ops& scalar_ops();

#if defined(__x86_64__) || defined(_M_X64)
bool cpu_has_avx2();
const Ops& avx2_ops();  // call only when cpu_has_avx2()
#endif

// Active implementation. Defaults to the widest supported variant; the
// environment variable LAAT_KERNELS (scalar|avx2) overrides the choice.
const Ops& ops();

}  // namespace laat::kernels
