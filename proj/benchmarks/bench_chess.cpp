#include <benchmark/benchmark.h>

#include "scc/chess/board.hpp"

using namespace scc::chess;

static void BM_Perft(benchmark::State& state) {
    const auto board = Board::start();
    for (auto _ : state) benchmark::DoNotOptimize(perft(board, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Perft)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_LegalMovesMiddlegame(benchmark::State& state) {
    const auto board = Board::from_fen("r1bq1rk1/pp2bppp/2n1pn2/3p4/2PP4/2N1PN2/PP2BPPP/R2QKB1R w KQ - 0 8");
    for (auto _ : state) benchmark::DoNotOptimize(legal_moves(board));
}
BENCHMARK(BM_LegalMovesMiddlegame);
