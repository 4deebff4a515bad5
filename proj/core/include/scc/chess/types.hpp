#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace scc::chess {

enum class Color : std::uint8_t { white = 0, black = 1 };

constexpr Color opposite(Color c) noexcept {
    return c == Color::white ? Color::black : Color::white;
}

// Order matches the engine's piece planes: P, R, N, B, Q, K.
enum class PieceKind : std::uint8_t { pawn = 0, rook, knight, bishop, queen, king };

inline constexpr int kPieceKinds = 6;

struct Piece {
    PieceKind kind{PieceKind::pawn};
    Color color{Color::white};

    friend constexpr bool operator==(Piece, Piece) = default;

    /// FEN letter: uppercase for white.
    char letter() const noexcept;
    static std::optional<Piece> from_letter(char c) noexcept;
};

/// Board cell; index = rank * 8 + file, a1 = 0, h8 = 63.
class Square {
public:
    constexpr Square() = default;
    constexpr Square(int file, int rank) : index_(static_cast<std::uint8_t>(rank * 8 + file)) {
        if (file < 0 || file > 7 || rank < 0 || rank > 7) throw std::out_of_range("square coordinate outside 0..7");
    }
    static constexpr Square from_index(int index) {
        if (index < 0 || index > 63) throw std::out_of_range("square index outside 0..63");
        return Square(index % 8, index / 8);
    }
    /// "e4" -> Square; nullopt on malformed input.
    static std::optional<Square> parse(std::string_view name) noexcept;

    constexpr int file() const noexcept { return index_ % 8; }
    constexpr int rank() const noexcept { return index_ / 8; }
    constexpr int index() const noexcept { return index_; }
    /// Same file, rank mirrored (a1 <-> a8).
    constexpr Square flipped() const noexcept { return from_index(index_ ^ 56); }
    std::string name() const;

    friend constexpr auto operator<=>(Square, Square) = default;

private:
    std::uint8_t index_{0};
};

enum class MoveFlag : std::uint8_t {
    none = 0,
    capture = 1 << 0,
    en_passant = 1 << 1,
    castle_king = 1 << 2,
    castle_queen = 1 << 3,
    gives_check = 1 << 4,
};

constexpr MoveFlag operator|(MoveFlag a, MoveFlag b) noexcept {
    return static_cast<MoveFlag>(static_cast<std::uint8_t>(a) | static_cast<std::uint8_t>(b));
}

/// A move. Identity (equality, ordering) is (from, to, promotion); flags are
/// annotations filled in by the move generator.
struct Move {
    Square from;
    Square to;
    std::optional<PieceKind> promotion;
    MoveFlag flags{MoveFlag::none};

    bool has(MoveFlag f) const noexcept {
        return (static_cast<std::uint8_t>(flags) & static_cast<std::uint8_t>(f)) != 0;
    }
    bool is_capture() const noexcept { return has(MoveFlag::capture); }
    bool is_castle() const noexcept { return has(MoveFlag::castle_king) || has(MoveFlag::castle_queen); }
    bool gives_check() const noexcept { return has(MoveFlag::gives_check); }

    /// UCI text, e.g. "e2e4", "b7b8q".
    std::string uci() const;

    friend bool operator==(const Move& a, const Move& b) noexcept {
        return a.from == b.from && a.to == b.to && a.promotion == b.promotion;
    }
    friend std::strong_ordering operator<=>(const Move& a, const Move& b) noexcept;
};

/// Promotion slot used for move ordering and the engine's move index:
/// none=0, queen=1, rook=2, bishop=3, knight=4.
int promotion_slot(std::optional<PieceKind> promotion) noexcept;
std::optional<PieceKind> promotion_from_slot(int slot);

enum class GameStatus : std::uint8_t {
    ongoing,
    checkmate,
    stalemate,
    draw_fifty_move,
    draw_repetition,
    draw_insufficient_material,
};

std::string_view to_string(GameStatus status) noexcept;
std::string_view to_string(PieceKind kind) noexcept;
std::string_view to_string(Color color) noexcept;

struct CastlingRights {
    bool white_king = false;
    bool white_queen = false;
    bool black_king = false;
    bool black_queen = false;

    bool king_side(Color c) const noexcept { return c == Color::white ? white_king : black_king; }
    bool queen_side(Color c) const noexcept { return c == Color::white ? white_queen : black_queen; }
    friend bool operator==(const CastlingRights&, const CastlingRights&) = default;
};

/// Errors raised by the chess layer. `kind` distinguishes the failure for callers
/// that need to report it (e.g. ambiguous SAN vs illegal move).
class ChessError : public std::runtime_error {
public:
    enum class Kind { malformed_fen, illegal_move, ambiguous_move, unparseable_move };

    ChessError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace scc::chess
