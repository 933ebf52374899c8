#include <benchmark/benchmark.h>

#include "infochain/mechanisms.hpp"
#include "infochain/sim.hpp"

using namespace infochain;

namespace {

AnswerMatrix desk_matrix(std::size_t n) { return binarize(synthesize_dataset(n, n, 1)); }

template <bool Naive>
void rewards(benchmark::State& state) {
  const auto m = desk_matrix(static_cast<std::size_t>(state.range(0)));
  const auto mech = static_cast<Mechanism>(state.range(1));
  for (auto _ : state) {
    auto r = Naive ? rewards_naive(m, mech, Rational(1)) : compute_rewards(m, mech, Rational(1));
    benchmark::DoNotOptimize(r);
  }
}

void sampled_dg(benchmark::State& state) {
  const auto m = desk_matrix(30);
  const auto mode = PeerMode::sampled(static_cast<std::size_t>(state.range(0)), SelectionSeed{1, 2});
  for (auto _ : state) {
    auto r = compute_rewards(m, Mechanism::DasguptaGhosh, Rational(1), mode);
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK(rewards<false>)->ArgsProduct({{10, 30}, {0, 1, 2}})->Unit(benchmark::kMicrosecond);
BENCHMARK(rewards<true>)->ArgsProduct({{10, 30}, {0, 1, 2}})->Unit(benchmark::kMicrosecond);
BENCHMARK(sampled_dg)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
