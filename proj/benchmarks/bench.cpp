#include <benchmark/benchmark.h>

#include <dmech/builtins.hpp>
#include <dmech/dms.hpp>
#include <dmech/nonholonomic.hpp>
#include <dmech/reduction.hpp>
#include <dmech/routh.hpp>

#include <memory>

namespace {

using dmech::Vec;

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

void BM_harmonic_step(benchmark::State& state) {
  const auto sys = dmech::make_harmonic_oscillator(0.01, 2.0);
  Vec q0(1), q1(1);
  q0 << 1.0;
  q1 << 0.9998;
  for (auto _ : state) {
    auto r = dmech::step(sys, q0, q1);
    benchmark::DoNotOptimize(r.q2);
  }
}
BENCHMARK(BM_harmonic_step);

void BM_harmonic_simulate_100(benchmark::State& state) {
  const auto sys = dmech::make_harmonic_oscillator(0.01, 2.0);
  Vec q0(1), q1(1);
  q0 << 1.0;
  q1 << 0.9998;
  for (auto _ : state) {
    auto r = dmech::simulate(sys, q0, q1, 100);
    benchmark::DoNotOptimize(r.curve);
  }
}
BENCHMARK(BM_harmonic_simulate_100);

void BM_central_force_reduced_step(benchmark::State& state) {
  const auto sys = dmech::make_central_force(0.01, {0.0, 0.5});
  auto conn = std::make_shared<dmech::TrivialConnection>(*sys.bundle());
  const dmech::ReducedSystem rs(sys, conn);
  const auto full = dmech::simulate(sys, vec2(1.0, 0.0), vec2(1.0005, 0.012), 1);
  const auto rc = dmech::reduce_curve(rs, full.curve);
  for (auto _ : state) {
    auto r = dmech::reduced_step(rs, rc.points.front());
    benchmark::DoNotOptimize(r.next);
  }
}
BENCHMARK(BM_central_force_reduced_step);

void BM_nonholonomic_step(benchmark::State& state) {
  const auto n = dmech::make_nonholonomic_particle(0.05);
  const Vec q0 = vec3(0.0, 0.0, 0.0);
  const Vec q1 = vec3(0.005, 0.1, 0.00025);
  for (auto _ : state) {
    auto r = dmech::nh_step(n, q0, q1);
    benchmark::DoNotOptimize(r.q2);
  }
}
BENCHMARK(BM_nonholonomic_step);

void BM_routh_residual(benchmark::State& state) {
  const auto sys = dmech::make_central_force(0.01, {0.0, 0.5});
  Vec mu(1);
  mu << 0.012;
  const dmech::RouthSetup setup(sys, mu);
  Vec t0(1), t1(1), t2(1);
  t0 << 0.998;
  t1 << 1.0;
  t2 << 1.0005;
  for (auto _ : state) {
    Vec r = dmech::routh_residual(setup, t0, t1, t2);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_routh_residual);

}  // namespace

BENCHMARK_MAIN();
