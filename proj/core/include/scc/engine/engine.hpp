#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "scc/chess/board.hpp"
#include "scc/engine/network.hpp"
#include "scc/engine/planes.hpp"

namespace scc::engine {

struct PolicyEntry {
    chess::Move move;
    std::size_t index;  // policy_index(move)
    double probability;
};

/// Engine output for one board: E_S, the legal-move distribution D and the
/// win rate v for the side to move.
struct EngineEval {
    nn::Tensor board_state;
    std::vector<PolicyEntry> policy;  // legal moves only, in legal_moves order
    double win_rate = 0.5;

    /// Probability at a policy index; exactly 0 for illegal indices.
    double probability(std::size_t index) const;
    double probability(const chess::Move& move) const { return probability(policy_index(move)); }
    /// Full 20,480-entry distribution.
    nn::Tensor dense_policy() const;
    const PolicyEntry& best() const;
};

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Result of excluding the played move from the engine's choice.
struct Alternative {
    chess::Move move;
    /// True when the played move is the only legal move (move == actual).
    bool degenerate = false;
};

/// Read-only inference over a shared EngineNet. Safe to use from several
/// threads while no one trains the network.
class Engine {
public:
    explicit Engine(std::shared_ptr<const EngineNet> net);

    const EngineNet& net() const noexcept { return *net_; }
    std::shared_ptr<const EngineNet> shared_net() const noexcept { return net_; }

    /// Throws EngineError when game_status(board) != ongoing.
    EngineEval evaluate(const chess::Board& board) const;
    nn::Tensor board_state(const chess::Board& board) const;
    /// Win rate for the side to move; terminal boards get their game result
    /// (checkmated side 0, draws 0.5).
    double win_rate(const chess::Board& board) const;

    chess::Move best_move(const chess::Board& board) const;

    /// Argmax continuation of up to `horizon` plies as (resulting board, move)
    /// pairs; each move is played on the previous pair's board (the first on
    /// `board`). Stops at terminal positions.
    std::vector<std::pair<chess::Board, chess::Move>> rollout(const chess::Board& board, int horizon) const;

    /// Highest-probability legal move other than `actual`.
    Alternative select_alternative(const chess::Board& board, const chess::Move& actual) const;

private:
    // Evaluation requiring only that legal moves exist.
    EngineEval raw_evaluate(const chess::Board& board) const;

    std::shared_ptr<const EngineNet> net_;
};

/// Value a finished game assigns to the side to move.
double terminal_value(chess::GameStatus status);

/// Win rate converted from the side to move to `perspective`.
inline double win_rate_for(double stm_win_rate, chess::Color side_to_move, chess::Color perspective) {
    return side_to_move == perspective ? stm_win_rate : 1.0 - stm_win_rate;
}

/// (B, M, v') with v' the final result from the mover's perspective.
struct TrainingTuple {
    chess::Board board;
    chess::Move move;
    double outcome = 0.5;  // one of 0, 0.5, 1
};

struct EngineLossTerms {
    nn::Var total;   // mean of policy + value
    nn::Var policy;  // mean of -log p(M|B)
    nn::Var value;   // mean of (v - v')^2
};

/// Mean over `batch` of -log p(M|B) + (v - v')^2. Throws EngineError when a
/// move is outside the legal mask or an outcome is not in {0, 0.5, 1}.
EngineLossTerms engine_loss(nn::Graph& g, const EngineNet& net, std::span<const TrainingTuple> batch);

}  // namespace scc::engine
