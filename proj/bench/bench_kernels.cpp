#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "tau/kernels.hpp"

namespace k = tau::kernels;

namespace {

struct Data {
  std::vector<k::cplx> a, b, lower, diag, upper;
  std::vector<double> w;
  std::vector<std::uint8_t> mask;
  std::vector<k::cplx> y;

  explicit Data(std::size_t n) : a(n), b(n), lower(n), diag(n), upper(n), w(n), mask(n, 1), y(n) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = {u(rng), u(rng)};
      b[i] = {u(rng), u(rng)};
      lower[i] = u(rng);
      diag[i] = 2.0 + u(rng);
      upper[i] = u(rng);
      w[i] = std::exp(u(rng));
    }
  }
  k::BandView bands() const { return {lower, diag, upper}; }
};

template <bool Parallel>
void weighted_dot(benchmark::State& st) {
  const Data d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    const auto v = Parallel ? k::parallel::weighted_dot(d.a, d.b, d.w, d.mask) : k::serial::weighted_dot(d.a, d.b, d.w, d.mask);
    benchmark::DoNotOptimize(v);
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void band_apply(benchmark::State& st) {
  Data d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    if (Parallel) {
      k::parallel::band_apply(d.bands(), d.a, d.y);
    } else {
      k::serial::band_apply(d.bands(), d.a, d.y);
    }
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

// Independent per-probe work, the pattern used for factorization probes.
template <bool Parallel>
void probes(benchmark::State& st) {
  const Data d(4096);
  std::vector<k::cplx> out(static_cast<std::size_t>(st.range(0)));
  const auto body = [&](std::size_t p) {
    std::vector<k::cplx> y(d.a.size());
    k::serial::band_apply(d.bands(), d.a, y);
    out[p] = k::serial::weighted_dot(y, d.b, d.w, d.mask);
  };
  for (auto _ : st) {
    if (Parallel) {
      k::parallel::for_each(out.size(), body);
    } else {
      k::serial::for_each(out.size(), body);
    }
    benchmark::ClobberMemory();
  }
}

}  // namespace

BENCHMARK(weighted_dot<false>)->Name("weighted_dot/serial")->Range(1 << 10, 1 << 20);
BENCHMARK(weighted_dot<true>)->Name("weighted_dot/openmp")->Range(1 << 10, 1 << 20);
BENCHMARK(band_apply<false>)->Name("band_apply/serial")->Range(1 << 10, 1 << 20);
BENCHMARK(band_apply<true>)->Name("band_apply/openmp")->Range(1 << 10, 1 << 20);
BENCHMARK(probes<false>)->Name("probes/serial")->Range(8, 256);
BENCHMARK(probes<true>)->Name("probes/openmp")->Range(8, 256);

BENCHMARK_MAIN();
