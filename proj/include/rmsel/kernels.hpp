#pragma once

#include <cstddef>
#include <string_view>

// Low-level vector kernels used by the numeric modules. Each kernel has a
// scalar reference implementation and, where the platform provides it, a
// SIMD variant. The dispatched entry points pick the widest supported
// instruction set at first use; tests compare the variants directly.
//
// Elementwise kernels (axpy, add_scaled, rotate_pair, count_pair_wins) are
// bit-identical across variants: every lane performs the same mul/add
// sequence as the scalar loop. Reductions (dot, sum) may differ from the
// scalar result by reassociation rounding only.

namespace rmsel::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

// Widest ISA supported by the running CPU.
Isa detect_best();

// Currently dispatched ISA.
Isa active_isa();

// Overrides dispatch (tests, RMSEL_ISA env). Throws std::invalid_argument
// if the requested ISA is not supported on this CPU.
void force_isa(Isa isa);

// ---- dispatched entry points ----

double dot(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);

// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

// out[i] = base[i] + a * s[i]   (out may alias base)
void add_scaled(double* out, const double* base, double a, const double* s,
                std::size_t n);

// In-place plane rotation: (x[i], y[i]) <- (c*x[i] - s*y[i], s*x[i] + c*y[i])
void rotate_pair(double* x, double* y, double c, double s, std::size_t n);

// Number of indices with pc[i] + w*dc[i] > pr[i] + w*dr[i].
std::size_t count_pair_wins(const double* pc, const double* pr,
                            const double* dc, const double* dr, double w,
                            std::size_t n);

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void add_scaled(double* out, const double* base, double a, const double* s,
                std::size_t n);
void rotate_pair(double* x, double* y, double c, double s, std::size_t n);
std::size_t count_pair_wins(const double* pc, const double* pr,
                            const double* dc, const double* dr, double w,
                            std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define RMSEL_KERNELS_HAVE_AVX2 1
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void add_scaled(double* out, const double* base, double a, const double* s,
                std::size_t n);
void rotate_pair(double* x, double* y, double c, double s, std::size_t n);
std::size_t count_pair_wins(const double* pc, const double* pr,
                            const double* dc, const double* dr, double w,
                            std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
#define RMSEL_KERNELS_HAVE_NEON 1
namespace neon {
double dot(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void add_scaled(double* out, const double* base, double a, const double* s,
                std::size_t n);
void rotate_pair(double* x, double* y, double c, double s, std::size_t n);
std::size_t count_pair_wins(const double* pc, const double* pr,
                            const double* dc, const double* dr, double w,
                            std::size_t n);
}  // namespace neon
#endif

}  // namespace rmsel::kernels
