// Microbenchmarks for the hot paths: spectral primitives, one Petviashvili
// step, one RK4 step. Grid sizes follow the production runs (1024 for the
// wave solver, 4096 for long-wave evolution).

#include "kgb/closed_form.hpp"
#include "kgb/evolution.hpp"
#include "kgb/model.hpp"
#include "kgb/spectral.hpp"
#include "kgb/state.hpp"
#include "kgb/wave_solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

kgb::ModelCoefficients region2_coefficients() {
  kgb::ModelCoefficients c;
  c.alpha = 0.6;
  c.a_uu = 1.0;
  c.a_uv = 1.0;
  c.a_vv = 1.0;
  c.b_uu = 1.0;
  c.b_vv = 1.0;
  return c;
}

kgb::RealField bump(kgb::GridPtr g, double amp, double width) {
  return kgb::sample(g, [=](double x) {
    const double s = 1.0 / std::cosh(width * x);
    return amp * s * s;
  });
}

void bm_forward_fft(benchmark::State& state) {
  auto g = kgb::build_grid(60.0, static_cast<int>(state.range(0)));
  const auto f = bump(g, 0.4, 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(kgb::forward_fft(f));
}
BENCHMARK(bm_forward_fft)->Arg(1024)->Arg(4096)->Arg(32768);

void bm_derivative(benchmark::State& state) {
  auto g = kgb::build_grid(60.0, static_cast<int>(state.range(0)));
  const auto f = bump(g, 0.4, 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(kgb::derivative(f, 1));
}
BENCHMARK(bm_derivative)->Arg(1024)->Arg(4096);

void bm_petviashvili_step(benchmark::State& state) {
  const auto c = region2_coefficients();
  auto g = kgb::build_grid(60.0, static_cast<int>(state.range(0)));
  const auto S = kgb::assemble_symbols(c, 0.8, g);
  const auto u = bump(g, 0.42, 0.33);
  auto v = u;
  for (auto& value : v.v)
    value *= value;
  for (auto _ : state)
    benchmark::DoNotOptimize(kgb::petviashvili_step(u, v, S, c));
}
BENCHMARK(bm_petviashvili_step)->Arg(1024)->Arg(4096);

kgb::EvolutionState traveling(const kgb::RealField& u, const kgb::RealField& v) {
  kgb::EvolutionState s;
  s.grid = u.grid;
  s.u = u;
  s.v = v;
  const double m = kgb::mean(u);
  s.w = kgb::make_field(u.grid);
  for (int j = 0; j < u.grid->N; ++j)
    s.w.v[static_cast<std::size_t>(j)] =
        -0.8 * (u.v[static_cast<std::size_t>(j)] - m);
  s.z = kgb::derivative(v, 1);
  for (auto& value : s.z.v)
    value *= -0.8;
  return s;
}

void bm_rk4_step(benchmark::State& state) {
  const auto c = region2_coefficients();
  auto g = kgb::build_grid(60.0, static_cast<int>(state.range(0)));
  const auto u = bump(g, 0.42, 0.33);
  auto v = u;
  for (auto& value : v.v)
    value *= value;
  const auto s0 = traveling(u, v);
  for (auto _ : state)
    benchmark::DoNotOptimize(kgb::step_rk4(s0, c, 1e-3));
}
BENCHMARK(bm_rk4_step)->Arg(1024)->Arg(4096);

} // namespace

BENCHMARK_MAIN();
