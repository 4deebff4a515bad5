#include "scc/engine/engine.hpp"

#include <algorithm>
#include <cmath>

namespace scc::engine {

double EngineEval::probability(std::size_t index) const {
    for (const auto& e : policy) {
        if (e.index == index) return e.probability;
    }
    return 0.0;
}

nn::Tensor EngineEval::dense_policy() const {
    nn::Tensor out({kPolicySize});
    for (const auto& e : policy) out[e.index] = e.probability;
    return out;
}

const PolicyEntry& EngineEval::best() const {
    if (policy.empty()) throw EngineError("no legal moves");
    // First maximum in legal_moves order, so ties break deterministically.
    return *std::max_element(policy.begin(), policy.end(),
                             [](const PolicyEntry& a, const PolicyEntry& b) { return a.probability < b.probability; });
}

Engine::Engine(std::shared_ptr<const EngineNet> net) : net_(std::move(net)) {
    if (!net_) throw std::invalid_argument("engine requires a network");
}

EngineEval Engine::raw_evaluate(const chess::Board& board) const {
    const auto moves = chess::legal_moves(board);
    nn::Graph g(false);
    const auto state = net_->board_state(g, board);
    EngineEval out;
    out.board_state = g.value(state);
    out.win_rate = g.scalar_value(net_->win_rate(g, state));
    if (!moves.empty()) {
        const auto probs = g.value(g.softmax(net_->policy_logits(g, state, board, moves)));
        out.policy.reserve(moves.size());
        for (std::size_t i = 0; i < moves.size(); ++i) out.policy.push_back({moves[i], policy_index(moves[i]), probs[i]});
    }
    return out;
}

EngineEval Engine::evaluate(const chess::Board& board) const {
    const auto status = chess::game_status(board);
    if (status != chess::GameStatus::ongoing) {
        throw EngineError("cannot evaluate finished position (" + std::string(chess::to_string(status)) +
                          "): " + board.fen());
    }
    return raw_evaluate(board);
}

nn::Tensor Engine::board_state(const chess::Board& board) const {
    nn::Graph g(false);
    return g.value(net_->board_state(g, board));
}

double terminal_value(chess::GameStatus status) {
    switch (status) {
        case chess::GameStatus::checkmate: return 0.0;
        case chess::GameStatus::ongoing: throw std::invalid_argument("game is not finished");
        default: return 0.5;
    }
}

double Engine::win_rate(const chess::Board& board) const {
    const auto status = chess::game_status(board);
    if (status != chess::GameStatus::ongoing) return terminal_value(status);
    nn::Graph g(false);
    return g.scalar_value(net_->win_rate(g, net_->board_state(g, board)));
}

chess::Move Engine::best_move(const chess::Board& board) const { return evaluate(board).best().move; }

std::vector<std::pair<chess::Board, chess::Move>> Engine::rollout(const chess::Board& board, int horizon) const {
    std::vector<std::pair<chess::Board, chess::Move>> out;
    chess::Board current = board;
    for (int ply = 0; ply < horizon; ++ply) {
        if (chess::game_status(current) != chess::GameStatus::ongoing) break;
        const auto move = raw_evaluate(current).best().move;
        current = chess::apply_move(current, move);
        out.emplace_back(current, move);
    }
    return out;
}

Alternative Engine::select_alternative(const chess::Board& board, const chess::Move& actual) const {
    if (!chess::find_legal(board, actual)) throw EngineError("move " + actual.uci() + " is not legal in " + board.fen());
    // Positions drawn by rule still have legal moves to rank.
    const auto eval = raw_evaluate(board);
    const PolicyEntry* best = nullptr;
    for (const auto& e : eval.policy) {
        if (e.move == actual) continue;
        if (!best || e.probability > best->probability) best = &e;
    }
    if (!best) return {actual, true};
    return {best->move, false};
}

EngineLossTerms engine_loss(nn::Graph& g, const EngineNet& net, std::span<const TrainingTuple> batch) {
    if (batch.empty()) throw EngineError("empty training batch");
    std::vector<nn::Var> policy_terms;
    std::vector<nn::Var> value_terms;
    policy_terms.reserve(batch.size());
    value_terms.reserve(batch.size());
    for (const auto& t : batch) {
        if (t.outcome != 0.0 && t.outcome != 0.5 && t.outcome != 1.0) {
            throw EngineError("outcome label must be 0, 0.5 or 1");
        }
        const auto moves = chess::legal_moves(t.board);
        const auto it = std::find(moves.begin(), moves.end(), t.move);
        if (it == moves.end()) {
            throw EngineError("move " + t.move.uci() + " is outside the legal mask of " + t.board.fen());
        }
        const auto state = net.board_state(g, t.board);
        const auto logits = net.policy_logits(g, state, t.board, moves);
        policy_terms.push_back(g.softmax_cross_entropy(logits, static_cast<std::size_t>(it - moves.begin())));
        value_terms.push_back(g.square(g.add_scalar(net.win_rate(g, state), -t.outcome)));
    }
    const auto policy = g.mean(policy_terms);
    const auto value = g.mean(value_terms);
    return {g.add(policy, value), policy, value};
}

}  // namespace scc::engine
