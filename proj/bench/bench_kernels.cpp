// Serial reference kernel against the OpenMP kernel on random disc states.

#include "vortexlab/system.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace vortexlab;

struct Fixture {
  std::vector<double> strengths;
  std::vector<int> cluster;
  Eigen::VectorXd z;
  DomainPtr domain = unit_disc();

  explicit Fixture(int n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int p = 0; p < n; ++p) {
      strengths.push_back(unit(rng));
      cluster.push_back(p % 4);
    }
    z.resize(2 * n);
    for (int p = 0; p < n; ++p) {
      Vec2 x;
      do x = Vec2(unit(rng), unit(rng)); while (x.norm() > 0.9);
      z.segment<2>(2 * p) = x;
    }
  }

  Interaction interaction() const { return {strengths, cluster, domain.get(), {}}; }
};

template <Evaluation (*Kernel)(const Interaction&, const Eigen::Ref<const Eigen::VectorXd>&,
                               Order)>
void run(benchmark::State& state, Order order) {
  const Fixture f(static_cast<int>(state.range(0)));
  const Interaction in = f.interaction();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(in, f.z, order));
  state.SetComplexityN(state.range(0));
}

void serial_gradient(benchmark::State& s) { run<serial::assemble>(s, Order::Gradient); }
void parallel_gradient(benchmark::State& s) { run<parallel::assemble>(s, Order::Gradient); }
void serial_hessian(benchmark::State& s) { run<serial::assemble>(s, Order::Hessian); }
void parallel_hessian(benchmark::State& s) { run<parallel::assemble>(s, Order::Hessian); }

BENCHMARK(serial_gradient)->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(parallel_gradient)->RangeMultiplier(4)->Range(16, 1024)->UseRealTime();
BENCHMARK(serial_hessian)->RangeMultiplier(4)->Range(16, 256);
BENCHMARK(parallel_hessian)->RangeMultiplier(4)->Range(16, 256)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
