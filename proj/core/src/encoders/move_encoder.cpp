#include "scc/encoders/move_encoder.hpp"

namespace scc::encoders {

namespace {

std::size_t piece_state(const std::optional<chess::Piece>& p) {
    if (!p) return 0;
    return 1 + static_cast<std::size_t>(p->kind) + (p->color == chess::Color::white ? 0 : 6);
}

std::string piece_name(const std::optional<chess::Piece>& p) {
    if (!p) return "empty";
    return std::string(chess::to_string(p->color)) + "-" + std::string(chess::to_string(p->kind));
}

}  // namespace

std::array<std::size_t, MoveFeatures::kLength> MoveFeatures::tokens() const {
    constexpr std::size_t piece_base = kSquareTokens;
    constexpr std::size_t promo_base = piece_base + kPieceStateTokens;
    constexpr std::size_t check_base = promo_base + kPromotionTokens;
    return {static_cast<std::size_t>(from.index()),
            static_cast<std::size_t>(to.index()),
            piece_base + piece_state(moved),
            piece_base + piece_state(captured),
            promo_base + static_cast<std::size_t>(chess::promotion_slot(promotion)),
            check_base + (check ? 1 : 0)};
}

std::vector<std::string> MoveFeatures::describe() const {
    return {from.name(), to.name(), piece_name(moved), piece_name(captured),
            promotion ? std::string(chess::to_string(*promotion)) : "none", check ? "check" : "no-check"};
}

MoveFeatures move_features(const chess::Board& board, const chess::Move& move) {
    const auto legal = chess::find_legal(board, move);
    if (!legal) {
        throw chess::ChessError(chess::ChessError::Kind::illegal_move,
                                "move " + move.uci() + " is not legal in " + board.fen());
    }
    MoveFeatures f;
    f.from = legal->from;
    f.to = legal->to;
    f.moved = *board.at(legal->from);
    f.captured = board.at(legal->to);
    f.promotion = legal->promotion;
    f.check = chess::apply_move(board, *legal).in_check();
    return f;
}

MoveEncoder::MoveEncoder(const std::string& name, const MoveEncoderConfig& config, nn::Rng& rng)
    : config_(config),
      tokens_(name + "/tokens", kMoveTokenCount, config.token_width, rng),
      rnn_(name + "/birnn", config.token_width, config.hidden, config.width, rng) {}

std::vector<nn::Var> MoveEncoder::encode(nn::Graph& g, const MoveFeatures& features) const {
    std::vector<nn::Var> sequence;
    sequence.reserve(MoveFeatures::kLength);
    for (const auto id : features.tokens()) {
        if (id >= kMoveTokenCount) throw std::out_of_range("move token outside the encoder vocabulary");
        sequence.push_back(tokens_(g, id));
    }
    return rnn_.encode(g, sequence);
}

void MoveEncoder::collect(nn::ParameterList& out) const {
    tokens_.collect(out);
    rnn_.collect(out);
}

}  // namespace scc::encoders
