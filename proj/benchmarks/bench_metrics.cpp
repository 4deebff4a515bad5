#include <benchmark/benchmark.h>

#include <random>

#include "scc/eval/metrics.hpp"

using namespace scc::eval;

namespace {

std::vector<EvalPair> corpus(std::size_t n, std::size_t len) {
    static const std::vector<std::string> words{"the", "knight", "knights", "takes", "pawn", "pawns", "and",
                                                "white", "black", "is", "better", "attacks", "attacked"};
    std::mt19937_64 rng(3);
    std::vector<EvalPair> out(n);
    for (auto& p : out) {
        for (std::size_t k = 0; k < len; ++k) p.hypothesis.push_back(words[rng() % words.size()]);
        for (std::size_t k = 0; k < len; ++k) p.reference.push_back(words[rng() % words.size()]);
        p.category = "quality";
    }
    return out;
}

}  // namespace

static void BM_Bleu4(benchmark::State& state) {
    const auto pairs = corpus(1000, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(bleu_corpus(pairs, 4));
}
BENCHMARK(BM_Bleu4)->Arg(8)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_MeteorS(benchmark::State& state) {
    const auto pairs = corpus(200, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(meteor_s(pairs));
}
BENCHMARK(BM_MeteorS)->Arg(8)->Arg(20)->Unit(benchmark::kMillisecond);
