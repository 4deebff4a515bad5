#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scc/engine/engine.hpp"
#include "scc/engine/training.hpp"

namespace scc::engine {

struct SelfPlayConfig {
    double temperature = 1.0;
    /// Plies sampled from D before switching to argmax.
    int sampled_plies = 10;
    /// Games reaching this many plies are scored as draws.
    int max_plies = 300;
    std::uint64_t seed = 1;
};

struct GameRecord {
    std::string start_fen{chess::kStartFen};
    std::vector<chess::Move> moves;
    /// White's score: 1, 0.5 or 0.
    double white_score = 0.5;
    chess::GameStatus status = chess::GameStatus::ongoing;  // ongoing when capped
    bool capped = false;

    std::string result_tag() const;
};

/// One game between `white` and `black`. With `sampled_plies` = 0 play is
/// deterministic argmax.
GameRecord play_game(const Engine& white, const Engine& black, const SelfPlayConfig& config, std::uint64_t game_seed);

/// `n_games` games of the engine against itself; game i uses a seed derived
/// from (config.seed, i).
std::vector<GameRecord> self_play(const Engine& engine, int n_games, const SelfPlayConfig& config);

/// Replays every game into (B, M, v') tuples: White's moves get s, Black's 1 - s.
std::vector<TrainingTuple> game_tuples(const std::vector<GameRecord>& games);

/// PGN text; each game carries SccCheckpoint and SccSeed tags.
std::string to_pgn(const std::vector<GameRecord>& games, const std::string& checkpoint_hash, std::uint64_t seed);

struct GatingReport {
    int games = 0;
    int wins = 0;
    int draws = 0;
    int losses = 0;
    double threshold = 0.55;

    double candidate_score() const { return wins + 0.5 * draws; }
    double rate() const { return games == 0 ? 0.0 : candidate_score() / games; }
    bool accepted() const { return rate() > threshold; }
};

/// Scores a finished match; wins + draws + losses must be positive.
GatingReport score_gate(int wins, int draws, int losses, double threshold = 0.55);

/// Argmax match with alternating colors (candidate is White in even games).
GatingReport gate(const Engine& candidate, const Engine& incumbent, int games = 20, double threshold = 0.55,
                  int max_plies = 300);

struct IterationConfig {
    int iterations = 3;
    TrainConfig train{};
    SelfPlayConfig self_play{};
    int gate_games = 20;
    double gate_threshold = 0.55;
};

struct IterationReport {
    std::vector<GatingReport> gates;
    std::vector<TrainReport> training;
    /// Self-play games per iteration; starts at 0 and grows by one per acceptance.
    int self_play_games = 0;
};

/// Alternates training on supervised + self-play tuples with gating against
/// the best network so far. On return `net` holds the best accepted weights.
IterationReport train_with_self_play(const EngineNet& net, std::span<const TrainingTuple> supervised,
                                     const IterationConfig& config);

}  // namespace scc::engine
