#include <benchmark/benchmark.h>

#include "judgekit/prompts.hpp"
#include "judgekit/simulator.hpp"

using namespace judgekit;

namespace {

void BM_GenerateCorpus(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_corpus(static_cast<int>(state.range(0)), 7));
    }
}
BENCHMARK(BM_GenerateCorpus)->Arg(2)->Arg(46);

void BM_SimulatePool(benchmark::State& state) {
    const auto corpus = generate_corpus(static_cast<int>(state.range(0)), 7);
    const auto profiles = default_profiles(7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_pool(profiles, corpus));
    }
}
BENCHMARK(BM_SimulatePool)->Arg(2)->Arg(46);

void BM_RenderJudgePrompt(benchmark::State& state) {
    const auto corpus = generate_corpus(1, 7);
    const auto& record = corpus.records.front();
    const CandidateResponse response{record.record_id, "cand-a",
                                     "A candidate answer of typical length for this corpus."};
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_judge_prompt(record, response, "judge-a"));
    }
}
BENCHMARK(BM_RenderJudgePrompt);

void BM_ParseReview(benchmark::State& state) {
    const std::string reply =
        "The response quotes 'Rating: 5 stars' from the candidate, but the visible "
        "events only partially support it.\nRating: 3";
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_review(reply));
    }
}
BENCHMARK(BM_ParseReview);

}  // namespace

BENCHMARK_MAIN();
