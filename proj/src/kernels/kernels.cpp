#include "rmsel/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace rmsel::kernels {

namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void add_scaled(double* out, const double* base, double a, const double* s,
                std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = base[i] + a * s[i];
}

void rotate_pair(double* x, double* y, double c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

std::size_t count_pair_wins(const double* pc, const double* pr,
                            const double* dc, const double* dr, double w,
                            std::size_t n) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    count += (pc[i] + w * dc[i]) > (pr[i] + w * dr[i]) ? 1u : 0u;
  }
  return count;
}

}  // namespace scalar

namespace {

struct Vtable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*add_scaled)(double*, const double*, double, const double*,
                     std::size_t);
  void (*rotate_pair)(double*, double*, double, double, std::size_t);
  std::size_t (*count_pair_wins)(const double*, const double*, const double*,
                                 const double*, double, std::size_t);
};

constexpr Vtable kScalarTable{scalar::dot,        scalar::sum,
                              scalar::axpy,       scalar::add_scaled,
                              scalar::rotate_pair, scalar::count_pair_wins};

#ifdef RMSEL_KERNELS_HAVE_AVX2
constexpr Vtable kAvx2Table{avx2::dot,        avx2::sum,
                            avx2::axpy,       avx2::add_scaled,
                            avx2::rotate_pair, avx2::count_pair_wins};
#endif
#ifdef RMSEL_KERNELS_HAVE_NEON
constexpr Vtable kNeonTable{neon::dot,        neon::sum,
                            neon::axpy,       neon::add_scaled,
                            neon::rotate_pair, neon::count_pair_wins};
#endif

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#ifdef RMSEL_KERNELS_HAVE_AVX2
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Isa::neon:
#ifdef RMSEL_KERNELS_HAVE_NEON
      return true;  // mandatory on aarch64
#else
      return false;
#endif
  }
  return false;
}

const Vtable& table_for(Isa isa) {
  switch (isa) {
#ifdef RMSEL_KERNELS_HAVE_AVX2
    case Isa::avx2:
      return kAvx2Table;
#endif
#ifdef RMSEL_KERNELS_HAVE_NEON
    case Isa::neon:
      return kNeonTable;
#endif
    default:
      return kScalarTable;
  }
}

struct Dispatch {
  Isa isa;
  const Vtable* table;

  Dispatch() {
    isa = detect_best();
    if (const char* env = std::getenv("RMSEL_ISA")) {
      const std::string_view want(env);
      if (want == "scalar") isa = Isa::scalar;
      else if (want == "avx2" && isa_supported(Isa::avx2)) isa = Isa::avx2;
      else if (want == "neon" && isa_supported(Isa::neon)) isa = Isa::neon;
    }
    table = &table_for(isa);
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

Isa detect_best() {
#ifdef RMSEL_KERNELS_HAVE_AVX2
  if (isa_supported(Isa::avx2)) return Isa::avx2;
#endif
#ifdef RMSEL_KERNELS_HAVE_NEON
  return Isa::neon;
#endif
  return Isa::scalar;
}

Isa active_isa() { return dispatch().isa; }

void force_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("kernels: ISA not supported on this CPU: " +
                                std::string(isa_name(isa)));
  }
  dispatch().isa = isa;
  dispatch().table = &table_for(isa);
}

double dot(const double* x, const double* y, std::size_t n) {
  return dispatch().table->dot(x, y, n);
}

double sum(const double* x, std::size_t n) { return dispatch().table->sum(x, n); }

void axpy(double a, const double* x, double* y, std::size_t n) {
  dispatch().table->axpy(a, x, y, n);
}

void add_scaled(double* out, const double* base, double a, const double* s,
                std::size_t n) {
  dispatch().table->add_scaled(out, base, a, s, n);
}

void rotate_pair(double* x, double* y, double c, double s, std::size_t n) {
  dispatch().table->rotate_pair(x, y, c, s, n);
}

std::size_t count_pair_wins(const double* pc, const double* pr,
                            const double* dc, const double* dr, double w,
                            std::size_t n) {
  return dispatch().table->count_pair_wins(pc, pr, dc, dr, w, n);
}

}  // namespace rmsel::kernels
