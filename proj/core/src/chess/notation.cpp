#include "scc/chess/notation.hpp"

#include <cctype>

namespace scc::chess {

namespace {

[[noreturn]] void unparseable(std::string_view text) {
    throw ChessError(ChessError::Kind::unparseable_move, "cannot parse move text \"" + std::string(text) + "\"");
}

[[noreturn]] void illegal(const Board& board, std::string_view text) {
    throw ChessError(ChessError::Kind::illegal_move,
                     "illegal move \"" + std::string(text) + "\" in position " + board.fen());
}

std::optional<PieceKind> promotion_letter(char c) {
    switch (std::tolower(static_cast<unsigned char>(c))) {
        case 'q': return PieceKind::queen;
        case 'r': return PieceKind::rook;
        case 'b': return PieceKind::bishop;
        case 'n': return PieceKind::knight;
        default: return std::nullopt;
    }
}

bool looks_like_uci(std::string_view t) {
    if (t.size() != 4 && t.size() != 5) return false;
    if (!Square::parse(t.substr(0, 2)) || !Square::parse(t.substr(2, 2))) return false;
    return t.size() == 4 || promotion_letter(t[4]).has_value();
}

char san_letter(PieceKind kind) {
    switch (kind) {
        case PieceKind::knight: return 'N';
        case PieceKind::bishop: return 'B';
        case PieceKind::rook: return 'R';
        case PieceKind::queen: return 'Q';
        case PieceKind::king: return 'K';
        default: return '\0';
    }
}

}  // namespace

Move parse_uci(const Board& board, std::string_view text) {
    if (!looks_like_uci(text)) unparseable(text);
    Move m{*Square::parse(text.substr(0, 2)), *Square::parse(text.substr(2, 2)), std::nullopt, MoveFlag::none};
    if (text.size() == 5) m.promotion = promotion_letter(text[4]);
    const auto legal = find_legal(board, m);
    if (!legal) illegal(board, text);
    return *legal;
}

Move parse_san(const Board& board, std::string_view text) {
    std::string_view t = text;
    while (!t.empty() && (t.back() == '+' || t.back() == '#' || t.back() == '!' || t.back() == '?')) t.remove_suffix(1);
    if (t.empty()) unparseable(text);

    const auto moves = legal_moves(board);
    if (t == "O-O" || t == "0-0" || t == "O-O-O" || t == "0-0-0") {
        const auto flag = t.size() == 3 ? MoveFlag::castle_king : MoveFlag::castle_queen;
        for (const auto& m : moves) {
            if (m.has(flag)) return m;
        }
        illegal(board, text);
    }

    PieceKind kind = PieceKind::pawn;
    if (std::string_view("KQRBN").find(t.front()) != std::string_view::npos) {
        kind = Piece::from_letter(t.front())->kind;
        t.remove_prefix(1);
    }

    std::optional<PieceKind> promo;
    if (const auto eq = t.find('='); eq != std::string_view::npos) {
        if (eq + 2 != t.size()) unparseable(text);
        promo = promotion_letter(t[eq + 1]);
        if (!promo) unparseable(text);
        t = t.substr(0, eq);
    } else if (kind == PieceKind::pawn && t.size() >= 3 && std::isupper(static_cast<unsigned char>(t.back()))) {
        promo = promotion_letter(t.back());
        if (!promo) unparseable(text);
        t.remove_suffix(1);
    }

    if (t.size() < 2) unparseable(text);
    const auto dest = Square::parse(t.substr(t.size() - 2));
    if (!dest) unparseable(text);
    t.remove_suffix(2);
    if (!t.empty() && (t.back() == 'x' || t.back() == ':')) t.remove_suffix(1);

    std::optional<int> from_file;
    std::optional<int> from_rank;
    for (char c : t) {
        if (c >= 'a' && c <= 'h' && !from_file) from_file = c - 'a';
        else if (c >= '1' && c <= '8' && !from_rank) from_rank = c - '1';
        else unparseable(text);
    }

    std::optional<Move> found;
    int matches = 0;
    for (const auto& m : moves) {
        const auto piece = board.at(m.from);
        if (!piece || piece->kind != kind || m.to != *dest || m.is_castle()) continue;
        if (from_file && m.from.file() != *from_file) continue;
        if (from_rank && m.from.rank() != *from_rank) continue;
        if (m.promotion != promo) continue;
        found = m;
        ++matches;
    }
    if (matches == 0) illegal(board, text);
    if (matches > 1) {
        throw ChessError(ChessError::Kind::ambiguous_move,
                         "ambiguous move \"" + std::string(text) + "\" in position " + board.fen());
    }
    return *found;
}

Move parse_move_text(const Board& board, std::string_view text) {
    if (looks_like_uci(text)) return parse_uci(board, text);
    return parse_san(board, text);
}

std::string to_san(const Board& board, const Move& move) {
    const auto legal = find_legal(board, move);
    if (!legal) illegal(board, move.uci());
    const Move m = *legal;

    std::string san;
    if (m.has(MoveFlag::castle_king)) {
        san = "O-O";
    } else if (m.has(MoveFlag::castle_queen)) {
        san = "O-O-O";
    } else {
        const PieceKind kind = board.at(m.from)->kind;
        if (kind == PieceKind::pawn) {
            if (m.is_capture()) san += static_cast<char>('a' + m.from.file());
        } else {
            san += san_letter(kind);
            bool clash = false;
            bool same_file = false;
            bool same_rank = false;
            for (const auto& other : legal_moves(board)) {
                if (other.to != m.to || other.from == m.from || board.at(other.from)->kind != kind) continue;
                clash = true;
                same_file |= other.from.file() == m.from.file();
                same_rank |= other.from.rank() == m.from.rank();
            }
            if (clash) {
                if (!same_file) san += static_cast<char>('a' + m.from.file());
                else if (!same_rank) san += static_cast<char>('1' + m.from.rank());
                else san += m.from.name();
            }
        }
        if (m.is_capture()) san += 'x';
        san += m.to.name();
        if (m.promotion) {
            san += '=';
            san += san_letter(*m.promotion);
        }
    }
    if (m.gives_check()) {
        const Board after = detail::play_legal(board, m);
        san += legal_moves(after).empty() ? '#' : '+';
    }
    return san;
}

}  // namespace scc::chess
