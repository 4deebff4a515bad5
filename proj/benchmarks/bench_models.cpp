#include <benchmark/benchmark.h>

#include "scc/chess/notation.hpp"
#include "scc/commentary/model.hpp"
#include "scc/engine/engine.hpp"

using namespace scc;

namespace {

engine::EngineConfig engine_config(std::size_t filters, std::size_t layers, std::size_t d) {
    engine::EngineConfig c;
    c.filters = filters;
    c.conv_layers = layers;
    c.state_dim = d;
    return c;
}

}  // namespace

static void BM_EngineEvaluate(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const engine::Engine eng(std::make_shared<engine::EngineNet>(engine_config(n, 4, 2 * n)));
    const auto board = chess::Board::start();
    for (auto _ : state) benchmark::DoNotOptimize(eng.evaluate(board).win_rate);
}
BENCHMARK(BM_EngineEvaluate)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_GenerateComment(benchmark::State& state) {
    commentary::ModelConfig config;
    config.engine = engine_config(16, 2, 32);
    config.move_encoder.token_width = 16;
    config.move_encoder.hidden = 16;
    config.decoder_hidden = 64;
    config.word_width = 32;
    config.vocab_size = 2000;
    const commentary::CommentaryModel model(config, commentary::Mode::mult, {commentary::Category::quality});
    const auto board = chess::Board::start();
    const auto cont = commentary::plan_continuations(model.engine(commentary::Category::quality), board,
                                                     chess::parse_uci(board, "e2e4"), commentary::Category::quality, 4);
    commentary::GenerationConfig gen;
    gen.beam_width = static_cast<std::size_t>(state.range(0));
    gen.method = gen.beam_width == 1 ? commentary::GenerationConfig::Method::greedy
                                     : commentary::GenerationConfig::Method::beam;
    gen.max_tokens = 20;
    for (auto _ : state) benchmark::DoNotOptimize(commentary::generate(model, commentary::Category::quality, cont, gen));
}
BENCHMARK(BM_GenerateComment)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
