#include "scc/engine/selfplay.hpp"

#include <cmath>
#include <sstream>

#include "scc/chess/notation.hpp"

namespace scc::engine {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(nn::Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

chess::Move sample(const EngineEval& eval, double temperature, nn::Rng& rng) {
    std::vector<double> weights;
    weights.reserve(eval.policy.size());
    double total = 0.0;
    for (const auto& e : eval.policy) {
        const double w = std::pow(e.probability, 1.0 / temperature);
        weights.push_back(w);
        total += w;
    }
    if (!(total > 0.0)) return eval.best().move;
    double u = uniform01(rng) * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        u -= weights[i];
        if (u < 0.0) return eval.policy[i].move;
    }
    return eval.policy.back().move;
}

}  // namespace

std::string GameRecord::result_tag() const {
    if (white_score == 1.0) return "1-0";
    if (white_score == 0.0) return "0-1";
    return "1/2-1/2";
}

GameRecord play_game(const Engine& white, const Engine& black, const SelfPlayConfig& config, std::uint64_t game_seed) {
    if (config.temperature <= 0.0) throw std::invalid_argument("temperature must be positive");
    nn::Rng rng(game_seed);
    GameRecord record;
    auto board = chess::Board::from_fen(record.start_fen);
    for (int ply = 0;; ++ply) {
        record.status = chess::game_status(board);
        if (record.status != chess::GameStatus::ongoing) {
            const bool mated = record.status == chess::GameStatus::checkmate;
            record.white_score = !mated ? 0.5 : (board.side_to_move() == chess::Color::white ? 0.0 : 1.0);
            break;
        }
        if (ply >= config.max_plies) {
            record.capped = true;
            record.white_score = 0.5;
            break;
        }
        const Engine& mover = board.side_to_move() == chess::Color::white ? white : black;
        const auto eval = mover.evaluate(board);
        const auto move = ply < config.sampled_plies ? sample(eval, config.temperature, rng) : eval.best().move;
        record.moves.push_back(move);
        board = chess::apply_move(board, move);
    }
    return record;
}

std::vector<GameRecord> self_play(const Engine& engine, int n_games, const SelfPlayConfig& config) {
    if (n_games < 0) throw std::invalid_argument("game count must be non-negative");
    std::vector<GameRecord> games;
    games.reserve(static_cast<std::size_t>(n_games));
    for (int i = 0; i < n_games; ++i) {
        games.push_back(play_game(engine, engine, config, mix(config.seed ^ mix(static_cast<std::uint64_t>(i)))));
    }
    return games;
}

std::vector<TrainingTuple> game_tuples(const std::vector<GameRecord>& games) {
    std::vector<TrainingTuple> out;
    for (const auto& game : games) {
        auto board = chess::Board::from_fen(game.start_fen);
        for (const auto& move : game.moves) {
            const double score = board.side_to_move() == chess::Color::white ? game.white_score : 1.0 - game.white_score;
            out.push_back({board, move, score});
            board = chess::apply_move(board, move);
        }
    }
    return out;
}

std::string to_pgn(const std::vector<GameRecord>& games, const std::string& checkpoint_hash, std::uint64_t seed) {
    std::ostringstream out;
    for (std::size_t i = 0; i < games.size(); ++i) {
        const auto& game = games[i];
        out << "[Event \"scc self-play\"]\n"
            << "[Round \"" << i + 1 << "\"]\n"
            << "[White \"scc\"]\n[Black \"scc\"]\n"
            << "[Result \"" << game.result_tag() << "\"]\n"
            << "[SccCheckpoint \"" << checkpoint_hash << "\"]\n"
            << "[SccSeed \"" << seed << "\"]\n";
        if (game.start_fen != chess::kStartFen) out << "[SetUp \"1\"]\n[FEN \"" << game.start_fen << "\"]\n";
        out << '\n';
        auto board = chess::Board::from_fen(game.start_fen);
        std::string line;
        auto emit = [&](const std::string& token) {
            if (!line.empty() && line.size() + 1 + token.size() > 79) {
                out << line << '\n';
                line.clear();
            }
            if (!line.empty()) line += ' ';
            line += token;
        };
        for (const auto& move : game.moves) {
            if (board.side_to_move() == chess::Color::white) {
                emit(std::to_string(board.fullmove_number()) + ".");
            } else if (&move == &game.moves.front()) {
                emit(std::to_string(board.fullmove_number()) + "...");
            }
            emit(chess::to_san(board, move));
            board = chess::apply_move(board, move);
        }
        emit(game.result_tag());
        out << line << "\n\n";
    }
    return out.str();
}

GatingReport score_gate(int wins, int draws, int losses, double threshold) {
    if (wins < 0 || draws < 0 || losses < 0 || wins + draws + losses == 0) {
        throw std::invalid_argument("gating needs a non-empty, non-negative tally");
    }
    return {wins + draws + losses, wins, draws, losses, threshold};
}

GatingReport gate(const Engine& candidate, const Engine& incumbent, int games, double threshold, int max_plies) {
    if (games <= 0 || games % 2 != 0) throw std::invalid_argument("gating needs a positive, even number of games");
    SelfPlayConfig config;
    config.sampled_plies = 0;
    config.max_plies = max_plies;
    int wins = 0, draws = 0, losses = 0;
    for (int i = 0; i < games; ++i) {
        const bool candidate_white = i % 2 == 0;
        const auto record = candidate_white ? play_game(candidate, incumbent, config, 0)
                                            : play_game(incumbent, candidate, config, 0);
        const double score = candidate_white ? record.white_score : 1.0 - record.white_score;
        if (score == 1.0) ++wins;
        else if (score == 0.0) ++losses;
        else ++draws;
    }
    return score_gate(wins, draws, losses, threshold);
}

IterationReport train_with_self_play(const EngineNet& net, std::span<const TrainingTuple> supervised,
                                     const IterationConfig& config) {
    IterationReport report;
    auto best = net.clone();
    for (int it = 0; it < config.iterations; ++it) {
        std::vector<TrainingTuple> data(supervised.begin(), supervised.end());
        if (report.self_play_games > 0) {
            auto cfg = config.self_play;
            cfg.seed = mix(config.self_play.seed + static_cast<std::uint64_t>(it));
            const auto extra = game_tuples(self_play(Engine(best), report.self_play_games, cfg));
            data.insert(data.end(), extra.begin(), extra.end());
        }
        if (data.empty()) throw std::invalid_argument("no training data");
        auto train = config.train;
        train.seed = mix(config.train.seed + static_cast<std::uint64_t>(it));
        report.training.push_back(train_supervised(net, data, train));
        const auto result =
            gate(Engine(net.clone()), Engine(best), config.gate_games, config.gate_threshold, config.self_play.max_plies);
        report.gates.push_back(result);
        if (result.accepted()) {
            best = net.clone();
            ++report.self_play_games;
        }
        if (report.training.back().aborted) break;
    }
    net.copy_parameters_from(*best);
    return report;
}

}  // namespace scc::engine
