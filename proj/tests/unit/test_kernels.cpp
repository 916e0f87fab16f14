#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "tau/kernels.hpp"

namespace k = tau::kernels;

namespace {

std::vector<k::cplx> random_cplx(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<k::cplx> v(n);
  for (auto& x : v) x = {u(rng), u(rng)};
  return v;
}

}  // namespace

TEST_CASE("weighted dot: OpenMP matches the serial reference") {
  for (std::size_t n : {0u, 1u, 7u, 1000u, 100003u}) {
    const auto a = random_cplx(n, 1), b = random_cplx(n, 2);
    std::vector<double> w(n);
    std::vector<std::uint8_t> mask(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 1.0 + std::abs(a[i]);
      mask[i] = i % 5 != 3;
    }
    const auto s = k::serial::weighted_dot(a, b, w, mask);
    const auto p = k::parallel::weighted_dot(a, b, w, mask);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += w[i] * std::abs(a[i]) * std::abs(b[i]);
    // Summation order differs, so agreement is to rounding of the absolute sum.
    CHECK(std::abs(s - p) <= 1e-14 * std::max(1.0, scale));
    if (n == 7) {
      k::cplx direct = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask[i]) direct += w[i] * std::conj(a[i]) * b[i];
      CHECK(std::abs(s - direct) <= 1e-15 * scale);
    }
  }
}

TEST_CASE("band apply: OpenMP matches the serial reference bitwise") {
  for (std::size_t n : {1u, 2u, 50u, 70001u}) {
    const auto lo = random_cplx(n, 3), di = random_cplx(n, 4), up = random_cplx(n, 5), x = random_cplx(n, 6);
    std::vector<k::cplx> ys(n), yp(n);
    k::serial::band_apply({lo, di, up}, x, ys);
    k::parallel::band_apply({lo, di, up}, x, yp);
    CHECK(ys == yp);
    const std::size_t i = n / 2;
    k::cplx want = di[i] * x[i];
    if (i > 0) want += lo[i] * x[i - 1];
    if (i + 1 < n) want += up[i] * x[i + 1];
    CHECK(std::abs(ys[i] - want) <= 1e-15 * (1.0 + std::abs(want)));
  }
}

TEST_CASE("for_each visits every index once") {
  for (std::size_t n : {0u, 1u, 513u}) {
    std::vector<std::atomic<int>> hits(n);
    k::parallel::for_each(n, [&](std::size_t i) { hits[i]++; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](const auto& h) { return h.load() == 1; }));
  }
  CHECK(k::max_threads() >= 1);
}

TEST_CASE("Sturm count of a diagonal matrix") {
  const std::vector<double> d{3.0, -1.0, 2.0, 5.0};
  const std::vector<double> p(4, 0.0);
  CHECK(k::serial::sturm_count(d, p, 0.0) == 1);
  CHECK(k::serial::sturm_count(d, p, 2.5) == 2);
  CHECK(k::serial::sturm_count(d, p, 10.0) == 4);
}
