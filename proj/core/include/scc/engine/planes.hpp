#pragma once

#include <cstddef>
#include <optional>

#include "scc/chess/board.hpp"
#include "scc/nn/tensor.hpp"

namespace scc::engine {

inline constexpr std::size_t kPlaneCount = 20;

/// Board encoded as 20 stacked 8x8 planes, seen from the side to move (the
/// mover's first rank is row 0):
///
///   0-5    mover's P, R, N, B, Q, K
///   6-11   opponent's P, R, N, B, Q, K
///   12     min(repeats of the current position, 3) / 3
///   13     min(repeats of the previous position, 3) / 3
///   14     min(fullmove number, 200) / 200
///   15     min(halfmove clock, 100) / 100
///   16-19  castling rights: mover K, mover Q, opponent K, opponent Q
///
/// A "repeat" is an occurrence beyond the first.
struct FeaturePlanes {
    nn::Tensor planes;  // [20, 8, 8]

    double at(std::size_t plane, int rank, int file) const { return planes[(plane * 8 + rank) * 8 + file]; }
    double plane_sum(std::size_t plane) const;
};

FeaturePlanes encode_planes(const chess::Board& board);

/// Square as seen by the side to move.
inline chess::Square orient(chess::Square sq, chess::Color side) {
    return side == chess::Color::white ? sq : sq.flipped();
}

/// Policy move space: (from * 64 + to) * 5 + promotion slot.
inline constexpr std::size_t kPolicySize = 64 * 64 * 5;

std::size_t policy_index(const chess::Move& move);
/// Index of the move after orienting both squares for `side`.
std::size_t oriented_policy_index(const chess::Move& move, chess::Color side);
/// Inverse of policy_index (no flags set).
chess::Move move_from_policy_index(std::size_t index);

}  // namespace scc::engine
