#include "scc/chess/types.hpp"

#include <cctype>

namespace scc::chess {

namespace {
constexpr std::string_view kLetters = "prnbqk";
}

char Piece::letter() const noexcept {
    const char c = kLetters[static_cast<int>(kind)];
    return color == Color::white ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
}

std::optional<Piece> Piece::from_letter(char c) noexcept {
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const auto pos = kLetters.find(lower);
    if (pos == std::string_view::npos) return std::nullopt;
    return Piece{static_cast<PieceKind>(pos), std::isupper(static_cast<unsigned char>(c)) ? Color::white : Color::black};
}

std::optional<Square> Square::parse(std::string_view name) noexcept {
    if (name.size() != 2) return std::nullopt;
    const int file = name[0] - 'a';
    const int rank = name[1] - '1';
    if (file < 0 || file > 7 || rank < 0 || rank > 7) return std::nullopt;
    return Square(file, rank);
}

std::string Square::name() const {
    return {static_cast<char>('a' + file()), static_cast<char>('1' + rank())};
}

std::string Move::uci() const {
    std::string s = from.name() + to.name();
    if (promotion) s += kLetters[static_cast<int>(*promotion)];
    return s;
}

std::strong_ordering operator<=>(const Move& a, const Move& b) noexcept {
    if (auto c = a.from <=> b.from; c != 0) return c;
    if (auto c = a.to <=> b.to; c != 0) return c;
    return promotion_slot(a.promotion) <=> promotion_slot(b.promotion);
}

int promotion_slot(std::optional<PieceKind> promotion) noexcept {
    if (!promotion) return 0;
    switch (*promotion) {
        case PieceKind::queen: return 1;
        case PieceKind::rook: return 2;
        case PieceKind::bishop: return 3;
        case PieceKind::knight: return 4;
        default: return 0;
    }
}

std::optional<PieceKind> promotion_from_slot(int slot) {
    switch (slot) {
        case 0: return std::nullopt;
        case 1: return PieceKind::queen;
        case 2: return PieceKind::rook;
        case 3: return PieceKind::bishop;
        case 4: return PieceKind::knight;
        default: throw std::out_of_range("promotion slot outside 0..4");
    }
}

std::string_view to_string(GameStatus status) noexcept {
    switch (status) {
        case GameStatus::ongoing: return "ongoing";
        case GameStatus::checkmate: return "checkmate";
        case GameStatus::stalemate: return "stalemate";
        case GameStatus::draw_fifty_move: return "draw_fifty_move";
        case GameStatus::draw_repetition: return "draw_repetition";
        case GameStatus::draw_insufficient_material: return "draw_insufficient_material";
    }
    return "unknown";
}

std::string_view to_string(PieceKind kind) noexcept {
    switch (kind) {
        case PieceKind::pawn: return "pawn";
        case PieceKind::rook: return "rook";
        case PieceKind::knight: return "knight";
        case PieceKind::bishop: return "bishop";
        case PieceKind::queen: return "queen";
        case PieceKind::king: return "king";
    }
    return "unknown";
}

std::string_view to_string(Color color) noexcept {
    return color == Color::white ? "white" : "black";
}

}  // namespace scc::chess
