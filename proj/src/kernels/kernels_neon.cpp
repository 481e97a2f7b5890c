#include "rmsel/kernels.hpp"

#ifdef RMSEL_KERNELS_HAVE_NEON

#include <arm_neon.h>

// Mirrors the AVX2 variant: explicit mul/add so lanes match the scalar
// reference bit-for-bit; only dot/sum reassociate.

namespace rmsel::kernels::neon {

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  }
  double out = vaddvq_f64(acc);
  for (; i < n; ++i) out += x[i] * y[i];
  return out;
}

double sum(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double out = vaddvq_f64(acc);
  for (; i < n; ++i) out += x[i];
  return out;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i,
              vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void add_scaled(double* out, const double* base, double a, const double* s,
                std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(base + i),
                                 vmulq_f64(va, vld1q_f64(s + i))));
  }
  for (; i < n; ++i) out[i] = base[i] + a * s[i];
}

void rotate_pair(double* x, double* y, double c, double s, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vx = vld1q_f64(x + i);
    const float64x2_t vy = vld1q_f64(y + i);
    vst1q_f64(x + i, vsubq_f64(vmulq_f64(vc, vx), vmulq_f64(vs, vy)));
    vst1q_f64(y + i, vaddq_f64(vmulq_f64(vs, vx), vmulq_f64(vc, vy)));
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
  const float64x2_t vw = vdupq_n_f64(w);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t lhs =
        vaddq_f64(vld1q_f64(pc + i), vmulq_f64(vw, vld1q_f64(dc + i)));
    const float64x2_t rhs =
        vaddq_f64(vld1q_f64(pr + i), vmulq_f64(vw, vld1q_f64(dr + i)));
    const uint64x2_t m = vcgtq_f64(lhs, rhs);
    count += vgetq_lane_u64(m, 0) & 1u;
    count += vgetq_lane_u64(m, 1) & 1u;
  }
  for (; i < n; ++i) {
    count += (pc[i] + w * dc[i]) > (pr[i] + w * dr[i]) ? 1u : 0u;
  }
  return count;
}

}  // namespace rmsel::kernels::neon

#endif  // RMSEL_KERNELS_HAVE_NEON
