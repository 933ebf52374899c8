#include <benchmark/benchmark.h>

#include "infochain/commitment.hpp"
#include "infochain/keccak.hpp"
#include "infochain/peer_selection.hpp"

using namespace infochain;

namespace {

void keccak(benchmark::State& state) {
  const Bytes input(static_cast<std::size_t>(state.range(0)), 0xA5);
  for (auto _ : state) benchmark::DoNotOptimize(keccak256(input));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}

void commit_and_verify(benchmark::State& state) {
  std::vector<std::pair<QuestionId, bool>> answers;
  std::vector<QuestionId> order;
  for (std::size_t i = 0; i < kMaxAnswersPerCommitment; ++i) {
    order.push_back("q" + std::to_string(i));
    answers.emplace_back(order.back(), i % 3 == 0);
  }
  const auto v = PackedAnswerVector::pack(answers, order);
  SplitMix64 rng(1);
  const auto key = SecretKey::from_generator(rng);
  for (auto _ : state) {
    const auto c = commit(v, key);
    benchmark::DoNotOptimize(verify_reveal(c, v, key));
  }
}

}  // namespace

BENCHMARK(keccak)->Arg(22)->Arg(64)->Arg(1024);
BENCHMARK(commit_and_verify);
