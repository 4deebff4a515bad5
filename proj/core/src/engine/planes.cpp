#include "scc/engine/planes.hpp"

#include <algorithm>
#include <numeric>

namespace scc::engine {

using chess::Color;

double FeaturePlanes::plane_sum(std::size_t plane) const {
    const auto v = planes.values().subspan(plane * 64, 64);
    return std::accumulate(v.begin(), v.end(), 0.0);
}

FeaturePlanes encode_planes(const chess::Board& board) {
    FeaturePlanes f{nn::Tensor({kPlaneCount, 8, 8})};
    auto& t = f.planes;
    const Color us = board.side_to_move();

    for (int i = 0; i < 64; ++i) {
        const auto p = board.placement()[i];
        if (!p) continue;
        const auto sq = orient(chess::Square::from_index(i), us);
        const std::size_t plane = static_cast<std::size_t>(p->kind) + (p->color == us ? 0 : 6);
        t[plane * 64 + static_cast<std::size_t>(sq.index())] = 1.0;
    }

    auto fill = [&t](std::size_t plane, double value) {
        std::fill_n(t.values().begin() + static_cast<std::ptrdiff_t>(plane * 64), 64, value);
    };
    const int repeats_now = std::max(board.repetition_count() - 1, 0);
    const int repeats_before = std::max(board.previous_repetition_count() - 1, 0);
    fill(12, std::min(repeats_now, 3) / 3.0);
    fill(13, std::min(repeats_before, 3) / 3.0);
    fill(14, std::min(board.fullmove_number(), 200) / 200.0);
    fill(15, std::min(board.halfmove_clock(), 100) / 100.0);

    const auto& rights = board.castling();
    const Color them = chess::opposite(us);
    fill(16, rights.king_side(us) ? 1.0 : 0.0);
    fill(17, rights.queen_side(us) ? 1.0 : 0.0);
    fill(18, rights.king_side(them) ? 1.0 : 0.0);
    fill(19, rights.queen_side(them) ? 1.0 : 0.0);
    return f;
}

std::size_t policy_index(const chess::Move& move) {
    return (static_cast<std::size_t>(move.from.index()) * 64 + static_cast<std::size_t>(move.to.index())) * 5 +
           static_cast<std::size_t>(chess::promotion_slot(move.promotion));
}

std::size_t oriented_policy_index(const chess::Move& move, chess::Color side) {
    chess::Move m = move;
    m.from = orient(move.from, side);
    m.to = orient(move.to, side);
    return policy_index(m);
}

chess::Move move_from_policy_index(std::size_t index) {
    if (index >= kPolicySize) throw std::out_of_range("policy index outside move space");
    const int slot = static_cast<int>(index % 5);
    const auto squares = index / 5;
    return chess::Move{chess::Square::from_index(static_cast<int>(squares / 64)),
                       chess::Square::from_index(static_cast<int>(squares % 64)), chess::promotion_from_slot(slot),
                       chess::MoveFlag::none};
}

}  // namespace scc::engine
