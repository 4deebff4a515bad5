#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scc/chess/types.hpp"

namespace scc::chess {

inline constexpr std::string_view kStartFen = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

class Board;

namespace detail {
/// apply_move without the legality check; `move` must come from legal_moves.
Board play_legal(const Board& board, const Move& move);
}  // namespace detail

/// Immutable chess position.
///
/// Besides the six FEN fields a Board carries the repetition count of the
/// current position (placement + castling rights + side to move) and of the
/// position one ply earlier, so features can be computed without replaying
/// the game. Boards share their reversible-move history through an immutable
/// linked list, which keeps copies cheap and thread-safe.
class Board {
public:
    using Placement = std::array<std::optional<Piece>, 64>;

    /// The standard initial position.
    static Board start();

    /// Parses a 6-field FEN record. Throws ChessError(malformed_fen) naming the
    /// offending field.
    static Board from_fen(std::string_view fen);

    std::string fen() const;

    std::optional<Piece> at(Square sq) const noexcept { return placement_[sq.index()]; }
    const Placement& placement() const noexcept { return placement_; }
    Color side_to_move() const noexcept { return side_; }
    const CastlingRights& castling() const noexcept { return castling_; }
    std::optional<Square> en_passant() const noexcept { return en_passant_; }
    int halfmove_clock() const noexcept { return halfmove_clock_; }
    int fullmove_number() const noexcept { return fullmove_number_; }
    /// Times the current placement+rights+side has occurred in the game (>= 1).
    int repetition_count() const noexcept { return repetition_count_; }
    /// Repetition count of the position before the last move (0 if unknown).
    int previous_repetition_count() const noexcept { return previous_repetition_count_; }

    /// Zobrist key of placement, castling rights and side to move.
    std::uint64_t key() const noexcept { return key_; }

    std::optional<Square> king_square(Color c) const noexcept;
    bool is_attacked(Square sq, Color by) const noexcept;
    bool in_check() const noexcept;
    int piece_count() const noexcept;

    /// Copy with the repetition counters replaced (used when a position is
    /// restored from storage without its history).
    Board with_repetition_counts(int current, int previous) const;

    /// Colors swapped and ranks mirrored; the side to move flips too.
    Board color_mirrored() const;

    /// Compares the FEN-visible state; repetition counters and history are
    /// not part of identity.
    friend bool operator==(const Board& a, const Board& b) noexcept;

private:
    struct HistoryNode {
        std::uint64_t key;
        int count;
        std::shared_ptr<const HistoryNode> parent;
    };

    friend Board detail::play_legal(const Board& board, const Move& move);

    void recompute_key() noexcept;
    void validate() const;

    Placement placement_{};
    Color side_{Color::white};
    CastlingRights castling_{};
    std::optional<Square> en_passant_;
    int halfmove_clock_{0};
    int fullmove_number_{1};
    int repetition_count_{1};
    int previous_repetition_count_{0};
    std::uint64_t key_{0};
    std::shared_ptr<const HistoryNode> history_;
};

/// All legal moves, ordered by (from, to, promotion slot).
std::vector<Move> legal_moves(const Board& board);

/// Returns the board after `move`. Throws ChessError(illegal_move) carrying the
/// move and the FEN when `move` is not legal on `board`.
Board apply_move(const Board& board, const Move& move);

/// The legal move matching (from, to, promotion) with flags filled in, if any.
std::optional<Move> find_legal(const Board& board, const Move& move);

GameStatus game_status(const Board& board);

inline bool is_terminal(const Board& board) { return game_status(board) != GameStatus::ongoing; }

/// Leaf count of the legal move tree at exactly `depth` plies.
std::uint64_t perft(const Board& board, int depth);

}  // namespace scc::chess
