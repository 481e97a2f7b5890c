#include "rmsel/kernels.hpp"

#ifdef RMSEL_KERNELS_HAVE_AVX2

#include <immintrin.h>

// Explicit mul/add (no FMA) so every lane matches the scalar reference
// bit-for-bit; the project builds with -ffp-contract=off for the same
// reason. Only dot/sum reassociate.

namespace rmsel::kernels::avx2 {

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i),
                                           _mm256_loadu_pd(y + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double out = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) out += x[i] * y[i];
  return out;
}

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double out = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) out += x[i];
  return out;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t =
        _mm256_add_pd(_mm256_loadu_pd(y + i),
                      _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, t);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void add_scaled(double* out, const double* base, double a, const double* s,
                std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t =
        _mm256_add_pd(_mm256_loadu_pd(base + i),
                      _mm256_mul_pd(va, _mm256_loadu_pd(s + i)));
    _mm256_storeu_pd(out + i, t);
  }
  for (; i < n; ++i) out[i] = base[i] + a * s[i];
}

void rotate_pair(double* x, double* y, double c, double s, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(
        x + i, _mm256_sub_pd(_mm256_mul_pd(vc, vx), _mm256_mul_pd(vs, vy)));
    _mm256_storeu_pd(
        y + i, _mm256_add_pd(_mm256_mul_pd(vs, vx), _mm256_mul_pd(vc, vy)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

std::size_t count_pair_wins(const double* pc, const double* pr,
                            const double* dc, const double* dr, double w,
                            std::size_t n) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d lhs =
        _mm256_add_pd(_mm256_loadu_pd(pc + i),
                      _mm256_mul_pd(vw, _mm256_loadu_pd(dc + i)));
    const __m256d rhs =
        _mm256_add_pd(_mm256_loadu_pd(pr + i),
                      _mm256_mul_pd(vw, _mm256_loadu_pd(dr + i)));
    const int mask =
        _mm256_movemask_pd(_mm256_cmp_pd(lhs, rhs, _CMP_GT_OQ));
    count += static_cast<std::size_t>(__builtin_popcount(mask));
  }
  for (; i < n; ++i) {
    count += (pc[i] + w * dc[i]) > (pr[i] + w * dr[i]) ? 1u : 0u;
  }
  return count;
}

}  // namespace rmsel::kernels::avx2

#endif  // RMSEL_KERNELS_HAVE_AVX2
