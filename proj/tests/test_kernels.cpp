#include <doctest.h>

#include <cmath>
#include <vector>

#include "rmsel/kernels.hpp"
#include "rmsel/rng.hpp"

namespace k = rmsel::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, rmsel::rng::Engine& engine,
                                  double scale = 1.0) {
  std::vector<double> out(n);
  for (auto& v : out) v = scale * engine.normal();
  return out;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar dot and sum match a long-double reference") {
  rmsel::rng::Engine engine(11);
  for (const std::size_t n : {1u, 3u, 4u, 7u, 64u, 1001u}) {
    const auto x = random_vector(n, engine);
    const auto y = random_vector(n, engine);
    long double dot_ref = 0.0L;
    long double sum_ref = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      dot_ref += static_cast<long double>(x[i]) * y[i];
      sum_ref += x[i];
    }
    CHECK(k::scalar::dot(x.data(), y.data(), n) ==
          doctest::Approx(static_cast<double>(dot_ref)).epsilon(1e-12));
    CHECK(k::scalar::sum(x.data(), n) ==
          doctest::Approx(static_cast<double>(sum_ref)).epsilon(1e-12));
  }
}

#ifdef RMSEL_KERNELS_HAVE_AVX2
TEST_CASE("avx2 variants agree with scalar") {
  if (k::detect_best() != k::Isa::avx2) {
    MESSAGE("avx2 not available; skipping");
    return;
  }
  rmsel::rng::Engine engine(12);
  for (const std::size_t n : {1u, 2u, 3u, 4u, 5u, 8u, 13u, 100u, 1000u}) {
    const auto x = random_vector(n, engine);
    const auto y = random_vector(n, engine);

    SUBCASE("") {}  // keep loop body flat

    // reductions: tolerance for reassociation only
    CHECK(k::avx2::dot(x.data(), y.data(), n) ==
          doctest::Approx(k::scalar::dot(x.data(), y.data(), n))
              .epsilon(1e-13));
    CHECK(k::avx2::sum(x.data(), n) ==
          doctest::Approx(k::scalar::sum(x.data(), n)).epsilon(1e-13));

    // elementwise: bit-identical
    const double a = engine.normal();
    auto y_scalar = y;
    auto y_avx2 = y;
    k::scalar::axpy(a, x.data(), y_scalar.data(), n);
    k::avx2::axpy(a, x.data(), y_avx2.data(), n);
    CHECK(y_scalar == y_avx2);

    std::vector<double> out_scalar(n);
    std::vector<double> out_avx2(n);
    k::scalar::add_scaled(out_scalar.data(), x.data(), a, y.data(), n);
    k::avx2::add_scaled(out_avx2.data(), x.data(), a, y.data(), n);
    CHECK(out_scalar == out_avx2);

    const double angle = engine.uniform(0.0, 3.0);
    auto xs = x;
    auto ys = y;
    auto xv = x;
    auto yv = y;
    k::scalar::rotate_pair(xs.data(), ys.data(), std::cos(angle),
                           std::sin(angle), n);
    k::avx2::rotate_pair(xv.data(), yv.data(), std::cos(angle),
                         std::sin(angle), n);
    CHECK(xs == xv);
    CHECK(ys == yv);
  }
}

TEST_CASE("avx2 count_pair_wins is exactly the scalar count") {
  if (k::detect_best() != k::Isa::avx2) {
    MESSAGE("avx2 not available; skipping");
    return;
  }
  rmsel::rng::Engine engine(13);
  for (const std::size_t n : {1u, 4u, 5u, 63u, 64u, 65u, 777u}) {
    const auto pc = random_vector(n, engine);
    const auto pr = random_vector(n, engine);
    const auto dc = random_vector(n, engine);
    const auto dr = random_vector(n, engine);
    for (const double w : {-0.35, 0.0, 0.7}) {
      CHECK(k::avx2::count_pair_wins(pc.data(), pr.data(), dc.data(),
                                     dr.data(), w, n) ==
            k::scalar::count_pair_wins(pc.data(), pr.data(), dc.data(),
                                       dr.data(), w, n));
    }
  }
  // exact ties never count
  const std::vector<double> same{1.0, -2.0, 3.0, 4.0, -5.0, 6.0, 7.0, 8.0};
  CHECK(k::avx2::count_pair_wins(same.data(), same.data(), same.data(),
                                 same.data(), 0.4, same.size()) == 0);
}
#endif

TEST_CASE("dispatch honors force_isa") {
  const auto before = k::active_isa();
  k::force_isa(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  const std::vector<double> x{1.0, 2.0, 3.0};
  CHECK(k::dot(x.data(), x.data(), 3) == doctest::Approx(14.0));
  k::force_isa(before);
  CHECK(k::active_isa() == before);
}

}  // TEST_SUITE
