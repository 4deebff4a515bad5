#include "fixtures.hpp"

#include <random>

namespace scc::testing {

std::vector<chess::Board> random_positions(std::size_t count, std::uint64_t seed, int max_plies) {
    std::mt19937_64 rng(seed);
    std::vector<chess::Board> out;
    while (out.size() < count) {
        auto board = chess::Board::start();
        for (int ply = 0; ply < max_plies && out.size() < count; ++ply) {
            out.push_back(board);
            const auto moves = chess::legal_moves(board);
            if (moves.empty() || chess::is_terminal(board)) break;
            board = chess::apply_move(board, moves[rng() % moves.size()]);
        }
    }
    return out;
}

engine::EngineConfig tiny_engine_config(std::uint64_t seed) {
    engine::EngineConfig c;
    c.filters = 8;
    c.conv_layers = 2;
    c.state_dim = 16;
    c.seed = seed;
    return c;
}

commentary::ModelConfig tiny_model_config(std::size_t vocab_size, std::uint64_t seed) {
    commentary::ModelConfig c;
    c.engine = tiny_engine_config(seed);
    c.move_encoder.token_width = 8;
    c.move_encoder.hidden = 8;
    c.decoder_hidden = 16;
    c.word_width = 8;
    c.vocab_size = vocab_size;
    c.seed = seed;
    return c;
}

std::vector<data::CommentaryRecord> toy_records(std::size_t per_category, std::uint64_t seed, std::size_t games) {
    std::mt19937_64 rng(seed);
    const auto positions = random_positions(per_category * 8, seed, 60);
    std::vector<data::CommentaryRecord> out;
    std::size_t next = 0;
    for (const auto category : commentary::kAllCategories) {
        for (std::size_t i = 0; i < per_category;) {
            const auto& board = positions[next++ % positions.size()];
            if (chess::is_terminal(board)) continue;
            const auto moves = chess::legal_moves(board);
            const auto move = moves[rng() % moves.size()];
            const auto after = chess::apply_move(board, move);
            // planning needs a continuation after the move
            if (category == commentary::Category::planning && chess::is_terminal(after)) continue;
            data::CommentaryRecord r;
            r.game_id = "g" + std::to_string(out.size() % games);
            r.board = board;
            r.move = move;
            r.category = category;
            const auto piece = board.at(move.from);
            r.tokens = {std::string(chess::to_string(piece->kind)), "to", move.to.name()};
            out.push_back(std::move(r));
            ++i;
        }
    }
    return out;
}

commentary::Bundle tiny_bundle(std::uint64_t seed) {
    std::vector<std::vector<std::string>> corpus;
    for (const auto& r : toy_records(2, seed, 4)) corpus.push_back(r.tokens);
    auto vocab = data::Vocabulary::build(corpus, 1);
    auto model = std::make_shared<commentary::CommentaryModel>(
        tiny_model_config(vocab.size(), seed), commentary::Mode::mult,
        std::vector<commentary::Category>{commentary::kAllCategories.begin(), commentary::kAllCategories.end()});
    return {std::move(model), std::move(vocab), "tiny-" + std::to_string(seed), {}};
}

}  // namespace scc::testing
