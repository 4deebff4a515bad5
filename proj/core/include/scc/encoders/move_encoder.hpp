#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "scc/chess/board.hpp"
#include "scc/nn/layers.hpp"

namespace scc::encoders {

/// The six tokens describing a move: from square, to square, piece on the
/// from square, piece on the to square (or empty), promotion (or none) and
/// whether the move gives check.
struct MoveFeatures {
    chess::Square from;
    chess::Square to;
    chess::Piece moved;
    std::optional<chess::Piece> captured;  // piece standing on `to`; empty for en passant
    std::optional<chess::PieceKind> promotion;
    bool check = false;

    static constexpr std::size_t kLength = 6;
    /// Ids in the encoder's closed token vocabulary, in the order above.
    std::array<std::size_t, kLength> tokens() const;
    std::vector<std::string> describe() const;
};

/// Token vocabulary layout: 64 squares, 13 piece states, 5 promotion states,
/// 2 check states.
inline constexpr std::size_t kSquareTokens = 64;
inline constexpr std::size_t kPieceStateTokens = 13;
inline constexpr std::size_t kPromotionTokens = 5;
inline constexpr std::size_t kCheckTokens = 2;
inline constexpr std::size_t kMoveTokenCount = kSquareTokens + kPieceStateTokens + kPromotionTokens + kCheckTokens;

/// Throws chess::ChessError when `move` is not legal on `board`.
MoveFeatures move_features(const chess::Board& board, const chess::Move& move);

struct MoveEncoderConfig {
    std::size_t width = 128;        // d
    std::size_t token_width = 32;   // token embedding size
    std::size_t hidden = 64;        // per-direction recurrent width
};

/// Token embeddings -> bidirectional LSTM -> six rows of width d (E_M).
class MoveEncoder {
public:
    MoveEncoder(const std::string& name, const MoveEncoderConfig& config, nn::Rng& rng);

    std::vector<nn::Var> encode(nn::Graph& g, const MoveFeatures& features) const;
    std::size_t width() const noexcept { return config_.width; }
    void collect(nn::ParameterList& out) const;

private:
    MoveEncoderConfig config_;
    nn::Embedding tokens_;
    nn::BiRnn rnn_;
};

}  // namespace scc::encoders
