#include <benchmark/benchmark.h>

#include "judgekit/rng.hpp"
#include "judgekit/simulator.hpp"
#include "judgekit/stats.hpp"

using namespace judgekit;

namespace {

ContingencyTable make_table(int pairs, std::uint64_t seed) {
    DeterministicRng rng(seed);
    ContingencyTable t;
    for (int i = 0; i < pairs; ++i) {
        t.add(Rating(1 + static_cast<int>(rng.next_u64() % 5)),
              Rating(1 + static_cast<int>(rng.next_u64() % 5)));
    }
    return t;
}

void BM_WeightedKappa(benchmark::State& state) {
    const auto table = make_table(static_cast<int>(state.range(0)), 42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(weighted_kappa(table));
    }
}
BENCHMARK(BM_WeightedKappa)->Arg(50)->Arg(1000);

void BM_BuildContingency(benchmark::State& state) {
    DeterministicRng rng(7);
    std::vector<RatingPair> pairs;
    for (int i = 0; i < state.range(0); ++i) {
        pairs.emplace_back(Rating(1 + static_cast<int>(rng.next_u64() % 5)),
                           Rating(1 + static_cast<int>(rng.next_u64() % 5)));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_contingency(pairs));
    }
}
BENCHMARK(BM_BuildContingency)->Arg(100)->Arg(10000);

void BM_AgreementByGroup(benchmark::State& state) {
    const auto corpus = generate_corpus(static_cast<int>(state.range(0)), 3);
    const auto reviews = simulate_pool(default_profiles(3), corpus);
    const auto dims = make_dimension_index(corpus.records);
    for (auto _ : state) {
        benchmark::DoNotOptimize(agreement_by_group(reviews, corpus.reference_reviews, dims));
    }
}
BENCHMARK(BM_AgreementByGroup)->Arg(10)->Arg(100);

}  // namespace
