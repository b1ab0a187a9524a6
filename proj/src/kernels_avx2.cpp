// AVX2+FMA kernel variants. Compiled with -mavx2 -mfma in its own TU;
// callers reach it only through the runtime dispatch in kernels.cpp.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "laat/kernels.hpp"

namespace laat::kernels {
namespace {

// Mask with the low `count` (0..3) lanes active.
inline __m256i tail_mask(std::size_t count) {
  alignas(32) static const std::int64_t bits[8] = {-1, -1, -1, -1, 0, 0, 0, 0};
  return _mm256_loadu_si256(
      reinterpret_cast<const __m256i*>(bits + (4 - count)));
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_min_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_min_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// exp for 4 doubles: Cody-Waite range reduction, degree-13 Taylor
// polynomial, exponent reassembly through the bit pattern. Inputs are
// clamped to the finite range, so 2^n stays normal.
inline __m256d exp4(__m256d x) {
  const __m256d inv_ln2 = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

  x = _mm256_min_pd(x, _mm256_set1_pd(709.40));
  x = _mm256_max_pd(x, _mm256_set1_pd(-708.39));

  const __m256d n = _mm256_round_pd(
      _mm256_mul_pd(x, inv_ln2), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.6059043836821614599e-10);  // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.0876756987868098979e-9));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.5052108385441718775e-8));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985890653e-7));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985892511e-6));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.4801587301587301566e-5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.9841269841269841253e-4));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.3888888888888889419e-3));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(8.3333333333333332177e-3));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(4.1666666666666664354e-2));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.6666666666666665741e-1));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(5.0e-1));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // 2^n via the exponent field; n is integral and within [-1022, 1023]
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
  n64 = _mm256_slli_epi64(n64, 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(n64));
}

void sq_dists_avx2(const double* base, std::size_t dim_stride,
                   std::size_t dims, std::size_t count, const double* q,
                   double* out) {
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t d = 0; d < dims; ++d) {
      const __m256d c = _mm256_loadu_pd(base + d * dim_stride + k);
      const __m256d diff = _mm256_sub_pd(c, _mm256_set1_pd(q[d]));
      acc = _mm256_fmadd_pd(diff, diff, acc);
    }
    _mm256_storeu_pd(out + k, acc);
  }
  for (; k < count; ++k) {
    double acc = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const double diff = base[d * dim_stride + k] - q[d];
      acc = std::fma(diff, diff, acc);
    }
    out[k] = acc;
  }
}

void min_update_sq_dists_avx2(const double* base, std::size_t dim_stride,
                              std::size_t dims, std::size_t count,
                              const double* q, double* inout) {
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t d = 0; d < dims; ++d) {
      const __m256d c = _mm256_loadu_pd(base + d * dim_stride + k);
      const __m256d diff = _mm256_sub_pd(c, _mm256_set1_pd(q[d]));
      acc = _mm256_fmadd_pd(diff, diff, acc);
    }
    const __m256d cur = _mm256_loadu_pd(inout + k);
    _mm256_storeu_pd(inout + k, _mm256_min_pd(cur, acc));
  }
  for (; k < count; ++k) {
    double acc = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const double diff = base[d * dim_stride + k] - q[d];
      acc = std::fma(diff, diff, acc);
    }
    inout[k] = std::min(inout[k], acc);
  }
}

double min_sq_dist_avx2(const double* base, std::size_t dim_stride,
                        std::size_t dims, std::size_t count, const double* q) {
  __m256d best4 = _mm256_set1_pd(__builtin_huge_val());
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t d = 0; d < dims; ++d) {
      const __m256d c = _mm256_loadu_pd(base + d * dim_stride + k);
      const __m256d diff = _mm256_sub_pd(c, _mm256_set1_pd(q[d]));
      acc = _mm256_fmadd_pd(diff, diff, acc);
    }
    best4 = _mm256_min_pd(best4, acc);
  }
  double best = hmin(best4);
  for (; k < count; ++k) {
    double acc = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const double diff = base[d * dim_stride + k] - q[d];
      acc = std::fma(diff, diff, acc);
    }
    best = std::min(best, acc);
  }
  return best;
}

void axpby_avx2(double a, const double* x, double b, const double* y,
                std::size_t count, double* v) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    const __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(y + k));
    _mm256_storeu_pd(v + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), t));
  }
  for (; k < count; ++k) v[k] = std::fma(a, x[k], b * y[k]);
}

double exp_shift_sum_avx2(double* v, std::size_t count, double scale) {
  __m256d vmax4 = _mm256_set1_pd(v[0]);
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    vmax4 = _mm256_max_pd(vmax4, _mm256_loadu_pd(v + k));
  }
  double vmax = hmax(vmax4);
  for (; k < count; ++k) vmax = std::max(vmax, v[k]);

  const __m256d vm = _mm256_set1_pd(vmax);
  const __m256d vs = _mm256_set1_pd(scale);
  __m256d total4 = _mm256_setzero_pd();
  k = 0;
  for (; k + 4 <= count; k += 4) {
    const __m256d x = _mm256_loadu_pd(v + k);
    const __m256d e = exp4(_mm256_mul_pd(vs, _mm256_sub_pd(x, vm)));
    _mm256_storeu_pd(v + k, e);
    total4 = _mm256_add_pd(total4, e);
  }
  double total = hsum(total4);
  if (k < count) {
    // run the remaining lanes through the same vector path
    const std::size_t rest = count - k;
    const __m256i mask = tail_mask(rest);
    const __m256d x = _mm256_maskload_pd(v + k, mask);
    const __m256d e = exp4(_mm256_mul_pd(vs, _mm256_sub_pd(x, vm)));
    _mm256_maskstore_pd(v + k, mask, e);
    alignas(32) double lane[4];
    _mm256_store_pd(lane, e);
    for (std::size_t t = 0; t < rest; ++t) total += lane[t];
  }
  return total;
}

double sum_avx2(const double* v, std::size_t count) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(v + k));
  }
  double total = hsum(acc);
  for (; k < count; ++k) total += v[k];
  return total;
}

void scale_avx2(double* v, std::size_t count, double a) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    _mm256_storeu_pd(v + k, _mm256_mul_pd(va, _mm256_loadu_pd(v + k)));
  }
  for (; k < count; ++k) v[k] *= a;
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops = {
      "avx2",           sq_dists_avx2, min_update_sq_dists_avx2,
      min_sq_dist_avx2, axpby_avx2,    exp_shift_sum_avx2,
      sum_avx2,         scale_avx2,
  };
  return ops;
}

}  // namespace laat::kernels

#endif  // x86-64
