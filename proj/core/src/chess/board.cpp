#include "scc/chess/board.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace scc::chess {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct ZobristTable {
    std::array<std::uint64_t, 12 * 64> pieces{};
    std::uint64_t black_to_move{};
    std::array<std::uint64_t, 4> castling{};
};

constexpr ZobristTable make_zobrist() {
    ZobristTable t{};
    std::uint64_t state = 0x5CC0C0FFEEULL;
    for (auto& k : t.pieces) k = splitmix64(state);
    t.black_to_move = splitmix64(state);
    for (auto& k : t.castling) k = splitmix64(state);
    return t;
}

constexpr ZobristTable kZobrist = make_zobrist();

int piece_code(Piece p) { return static_cast<int>(p.color) * 6 + static_cast<int>(p.kind); }

constexpr std::array<std::array<int, 2>, 8> kKnightSteps{{{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}}};
constexpr std::array<std::array<int, 2>, 8> kKingSteps{{{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
constexpr std::array<std::array<int, 2>, 4> kRookDirs{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
constexpr std::array<std::array<int, 2>, 4> kBishopDirs{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

bool on_board(int file, int rank) { return file >= 0 && file < 8 && rank >= 0 && rank < 8; }

bool is(const std::optional<Piece>& p, PieceKind kind, Color color) {
    return p && p->kind == kind && p->color == color;
}

bool attacked(const Board::Placement& cells, Square sq, Color by) {
    const int f = sq.file();
    const int r = sq.rank();

    // Pawns attack diagonally forward, so look one rank "behind" the target.
    const int pawn_rank = by == Color::white ? r - 1 : r + 1;
    for (int df : {-1, 1}) {
        if (on_board(f + df, pawn_rank) && is(cells[pawn_rank * 8 + f + df], PieceKind::pawn, by)) return true;
    }
    for (auto [df, dr] : kKnightSteps) {
        if (on_board(f + df, r + dr) && is(cells[(r + dr) * 8 + f + df], PieceKind::knight, by)) return true;
    }
    for (auto [df, dr] : kKingSteps) {
        if (on_board(f + df, r + dr) && is(cells[(r + dr) * 8 + f + df], PieceKind::king, by)) return true;
    }
    auto slide = [&](const auto& dirs, PieceKind kind) {
        for (auto [df, dr] : dirs) {
            for (int nf = f + df, nr = r + dr; on_board(nf, nr); nf += df, nr += dr) {
                const auto& p = cells[nr * 8 + nf];
                if (!p) continue;
                if (p->color == by && (p->kind == kind || p->kind == PieceKind::queen)) return true;
                break;
            }
        }
        return false;
    };
    return slide(kRookDirs, PieceKind::rook) || slide(kBishopDirs, PieceKind::bishop);
}

std::optional<Square> find_king(const Board::Placement& cells, Color c) {
    for (int i = 0; i < 64; ++i) {
        if (is(cells[i], PieceKind::king, c)) return Square::from_index(i);
    }
    return std::nullopt;
}

// Moves the pieces for `m` on a raw placement (no bookkeeping).
void make_on(Board::Placement& cells, const Move& m, Color mover) {
    auto piece = cells[m.from.index()];
    cells[m.from.index()].reset();
    if (m.has(MoveFlag::en_passant)) {
        cells[Square(m.to.file(), m.from.rank()).index()].reset();
    }
    if (m.promotion) piece = Piece{*m.promotion, mover};
    cells[m.to.index()] = piece;
    const int home = mover == Color::white ? 0 : 7;
    if (m.has(MoveFlag::castle_king)) {
        cells[Square(5, home).index()] = cells[Square(7, home).index()];
        cells[Square(7, home).index()].reset();
    } else if (m.has(MoveFlag::castle_queen)) {
        cells[Square(3, home).index()] = cells[Square(0, home).index()];
        cells[Square(0, home).index()].reset();
    }
}

void generate_pseudo(const Board& b, std::vector<Move>& out) {
    const auto& cells = b.placement();
    const Color us = b.side_to_move();
    const Color them = opposite(us);

    auto add = [&](Square from, Square to, MoveFlag flags, std::optional<PieceKind> promo = std::nullopt) {
        out.push_back(Move{from, to, promo, flags});
    };
    auto add_pawn = [&](Square from, Square to, MoveFlag flags) {
        if (to.rank() == 0 || to.rank() == 7) {
            for (auto k : {PieceKind::queen, PieceKind::rook, PieceKind::bishop, PieceKind::knight}) add(from, to, flags, k);
        } else {
            add(from, to, flags);
        }
    };

    for (int i = 0; i < 64; ++i) {
        const auto& p = cells[i];
        if (!p || p->color != us) continue;
        const Square from = Square::from_index(i);
        const int f = from.file();
        const int r = from.rank();

        switch (p->kind) {
            case PieceKind::pawn: {
                const int dir = us == Color::white ? 1 : -1;
                const int start = us == Color::white ? 1 : 6;
                if (on_board(f, r + dir) && !cells[(r + dir) * 8 + f]) {
                    add_pawn(from, Square(f, r + dir), MoveFlag::none);
                    if (r == start && !cells[(r + 2 * dir) * 8 + f]) add(from, Square(f, r + 2 * dir), MoveFlag::none);
                }
                for (int df : {-1, 1}) {
                    if (!on_board(f + df, r + dir)) continue;
                    const Square to(f + df, r + dir);
                    const auto& target = cells[to.index()];
                    if (target && target->color == them) {
                        add_pawn(from, to, MoveFlag::capture);
                    } else if (b.en_passant() && *b.en_passant() == to) {
                        add(from, to, MoveFlag::capture | MoveFlag::en_passant);
                    }
                }
                break;
            }
            case PieceKind::knight:
            case PieceKind::king: {
                const auto& steps = p->kind == PieceKind::knight ? kKnightSteps : kKingSteps;
                for (auto [df, dr] : steps) {
                    if (!on_board(f + df, r + dr)) continue;
                    const Square to(f + df, r + dr);
                    const auto& target = cells[to.index()];
                    if (!target) add(from, to, MoveFlag::none);
                    else if (target->color == them) add(from, to, MoveFlag::capture);
                }
                break;
            }
            default: {
                auto slide = [&](const auto& dirs) {
                    for (auto [df, dr] : dirs) {
                        for (int nf = f + df, nr = r + dr; on_board(nf, nr); nf += df, nr += dr) {
                            const Square to(nf, nr);
                            const auto& target = cells[to.index()];
                            if (!target) {
                                add(from, to, MoveFlag::none);
                                continue;
                            }
                            if (target->color == them) add(from, to, MoveFlag::capture);
                            break;
                        }
                    }
                };
                if (p->kind != PieceKind::bishop) slide(kRookDirs);
                if (p->kind != PieceKind::rook) slide(kBishopDirs);
                break;
            }
        }
    }

    // Castling: rights imply king and rook on their home squares.
    const int home = us == Color::white ? 0 : 7;
    const Square king_from(4, home);
    if (!is(cells[king_from.index()], PieceKind::king, us) || attacked(cells, king_from, them)) return;
    const auto& rights = b.castling();
    if (rights.king_side(us) && !cells[Square(5, home).index()] && !cells[Square(6, home).index()] &&
        !attacked(cells, Square(5, home), them) && !attacked(cells, Square(6, home), them)) {
        add(king_from, Square(6, home), MoveFlag::castle_king);
    }
    if (rights.queen_side(us) && !cells[Square(1, home).index()] && !cells[Square(2, home).index()] &&
        !cells[Square(3, home).index()] && !attacked(cells, Square(3, home), them) &&
        !attacked(cells, Square(2, home), them)) {
        add(king_from, Square(2, home), MoveFlag::castle_queen);
    }
}

[[noreturn]] void fen_error(std::string_view field, std::string_view detail, std::string_view fen) {
    throw ChessError(ChessError::Kind::malformed_fen,
                     "invalid FEN " + std::string(field) + ": " + std::string(detail) + " in \"" + std::string(fen) + "\"");
}

int parse_counter(std::string_view text, std::string_view field, std::string_view fen) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value < 0) fen_error(field, "not a non-negative integer", fen);
    return value;
}

}  // namespace

Board Board::start() { return from_fen(kStartFen); }

Board Board::from_fen(std::string_view fen) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos < fen.size()) {
        while (pos < fen.size() && fen[pos] == ' ') ++pos;
        if (pos >= fen.size()) break;
        const auto end = std::min(fen.find(' ', pos), fen.size());
        fields.push_back(fen.substr(pos, end - pos));
        pos = end;
    }
    if (fields.size() != 6) {
        fen_error("field count", "expected 6 fields, got " + std::to_string(fields.size()), fen);
    }

    Board b;
    int rank = 7;
    int file = 0;
    for (char c : fields[0]) {
        if (c == '/') {
            if (file != 8) fen_error("placement", "rank " + std::to_string(rank + 1) + " does not span 8 files", fen);
            --rank;
            file = 0;
            if (rank < 0) fen_error("placement", "more than 8 ranks", fen);
        } else if (c >= '1' && c <= '8') {
            file += c - '0';
            if (file > 8) fen_error("placement", "rank overflows 8 files", fen);
        } else {
            auto piece = Piece::from_letter(c);
            if (!piece) fen_error("placement", std::string("illegal piece letter '") + c + "'", fen);
            if (file > 7) fen_error("placement", "rank overflows 8 files", fen);
            b.placement_[rank * 8 + file] = piece;
            ++file;
        }
    }
    if (rank != 0 || file != 8) fen_error("placement", "expected 8 complete ranks", fen);

    if (fields[1] == "w") b.side_ = Color::white;
    else if (fields[1] == "b") b.side_ = Color::black;
    else fen_error("side to move", "expected 'w' or 'b'", fen);

    if (fields[2] != "-") {
        for (char c : fields[2]) {
            bool* flag = nullptr;
            switch (c) {
                case 'K': flag = &b.castling_.white_king; break;
                case 'Q': flag = &b.castling_.white_queen; break;
                case 'k': flag = &b.castling_.black_king; break;
                case 'q': flag = &b.castling_.black_queen; break;
                default: fen_error("castling", std::string("unexpected character '") + c + "'", fen);
            }
            if (*flag) fen_error("castling", "repeated right", fen);
            *flag = true;
        }
    }

    if (fields[3] != "-") {
        auto sq = Square::parse(fields[3]);
        if (!sq) fen_error("en passant", "not a square", fen);
        b.en_passant_ = sq;
    }

    b.halfmove_clock_ = parse_counter(fields[4], "halfmove clock", fen);
    b.fullmove_number_ = parse_counter(fields[5], "fullmove number", fen);
    if (b.fullmove_number_ < 1) fen_error("fullmove number", "must be >= 1", fen);

    try {
        b.validate();
    } catch (const ChessError& e) {
        throw ChessError(ChessError::Kind::malformed_fen, std::string(e.what()) + " in \"" + std::string(fen) + "\"");
    }
    b.recompute_key();
    b.history_ = std::make_shared<const HistoryNode>(HistoryNode{b.key_, 1, nullptr});
    return b;
}

void Board::validate() const {
    auto fail = [](std::string_view field, std::string_view detail) {
        throw ChessError(ChessError::Kind::malformed_fen, "invalid FEN " + std::string(field) + ": " + std::string(detail));
    };
    for (Color c : {Color::white, Color::black}) {
        const auto kings = std::count_if(placement_.begin(), placement_.end(),
                                         [c](const auto& p) { return is(p, PieceKind::king, c); });
        if (kings != 1) fail("placement", "expected exactly one " + std::string(to_string(c)) + " king");
    }
    for (int f = 0; f < 8; ++f) {
        for (int r : {0, 7}) {
            const auto& p = placement_[r * 8 + f];
            if (p && p->kind == PieceKind::pawn) fail("placement", "pawn on rank 1 or 8");
        }
    }
    for (Color c : {Color::white, Color::black}) {
        const int home = c == Color::white ? 0 : 7;
        const bool king_home = is(placement_[Square(4, home).index()], PieceKind::king, c);
        if (castling_.king_side(c) && (!king_home || !is(placement_[Square(7, home).index()], PieceKind::rook, c))) {
            fail("castling", "king-side right without king and rook on home squares");
        }
        if (castling_.queen_side(c) && (!king_home || !is(placement_[Square(0, home).index()], PieceKind::rook, c))) {
            fail("castling", "queen-side right without king and rook on home squares");
        }
    }
    if (en_passant_) {
        const int expected = side_ == Color::white ? 5 : 2;
        if (en_passant_->rank() != expected) fail("en passant", "target on the wrong rank for the side to move");
    }
    const auto their_king = find_king(placement_, opposite(side_));
    if (attacked(placement_, *their_king, side_)) fail("placement", "side not to move is in check");
}

void Board::recompute_key() noexcept {
    std::uint64_t k = 0;
    for (int i = 0; i < 64; ++i) {
        if (placement_[i]) k ^= kZobrist.pieces[piece_code(*placement_[i]) * 64 + i];
    }
    if (side_ == Color::black) k ^= kZobrist.black_to_move;
    if (castling_.white_king) k ^= kZobrist.castling[0];
    if (castling_.white_queen) k ^= kZobrist.castling[1];
    if (castling_.black_king) k ^= kZobrist.castling[2];
    if (castling_.black_queen) k ^= kZobrist.castling[3];
    key_ = k;
}

std::string Board::fen() const {
    std::ostringstream out;
    for (int rank = 7; rank >= 0; --rank) {
        int empty = 0;
        for (int file = 0; file < 8; ++file) {
            const auto& p = placement_[rank * 8 + file];
            if (!p) {
                ++empty;
                continue;
            }
            if (empty) out << empty;
            empty = 0;
            out << p->letter();
        }
        if (empty) out << empty;
        if (rank) out << '/';
    }
    out << (side_ == Color::white ? " w " : " b ");
    std::string rights;
    if (castling_.white_king) rights += 'K';
    if (castling_.white_queen) rights += 'Q';
    if (castling_.black_king) rights += 'k';
    if (castling_.black_queen) rights += 'q';
    out << (rights.empty() ? "-" : rights) << ' ';
    out << (en_passant_ ? en_passant_->name() : "-") << ' ' << halfmove_clock_ << ' ' << fullmove_number_;
    return out.str();
}

std::optional<Square> Board::king_square(Color c) const noexcept { return find_king(placement_, c); }

bool Board::is_attacked(Square sq, Color by) const noexcept { return attacked(placement_, sq, by); }

bool Board::in_check() const noexcept {
    const auto k = king_square(side_);
    return k && attacked(placement_, *k, opposite(side_));
}

int Board::piece_count() const noexcept {
    return static_cast<int>(std::count_if(placement_.begin(), placement_.end(), [](const auto& p) { return p.has_value(); }));
}

Board Board::with_repetition_counts(int current, int previous) const {
    if (current < 1 || previous < 0) throw std::invalid_argument("repetition counts out of range");
    Board b = *this;
    b.repetition_count_ = current;
    b.previous_repetition_count_ = previous;
    b.history_ = std::make_shared<const HistoryNode>(HistoryNode{b.key_, current, nullptr});
    return b;
}

Board Board::color_mirrored() const {
    Board b;
    for (int i = 0; i < 64; ++i) {
        if (const auto& p = placement_[i]) b.placement_[i ^ 56] = Piece{p->kind, opposite(p->color)};
    }
    b.side_ = opposite(side_);
    b.castling_ = {castling_.black_king, castling_.black_queen, castling_.white_king, castling_.white_queen};
    if (en_passant_) b.en_passant_ = en_passant_->flipped();
    b.halfmove_clock_ = halfmove_clock_;
    b.fullmove_number_ = fullmove_number_;
    b.repetition_count_ = repetition_count_;
    b.previous_repetition_count_ = previous_repetition_count_;
    b.recompute_key();
    b.history_ = std::make_shared<const HistoryNode>(HistoryNode{b.key_, b.repetition_count_, nullptr});
    return b;
}

bool operator==(const Board& a, const Board& b) noexcept {
    return a.placement_ == b.placement_ && a.side_ == b.side_ && a.castling_ == b.castling_ &&
           a.en_passant_ == b.en_passant_ && a.halfmove_clock_ == b.halfmove_clock_ &&
           a.fullmove_number_ == b.fullmove_number_;
}

std::vector<Move> legal_moves(const Board& board) {
    std::vector<Move> pseudo;
    pseudo.reserve(64);
    generate_pseudo(board, pseudo);

    const Color us = board.side_to_move();
    const Color them = opposite(us);
    std::vector<Move> legal;
    legal.reserve(pseudo.size());
    for (Move m : pseudo) {
        auto cells = board.placement();
        make_on(cells, m, us);
        const auto own_king = find_king(cells, us);
        if (attacked(cells, *own_king, them)) continue;
        const auto their_king = find_king(cells, them);
        if (attacked(cells, *their_king, us)) m.flags = m.flags | MoveFlag::gives_check;
        legal.push_back(m);
    }
    std::sort(legal.begin(), legal.end());
    return legal;
}

std::optional<Move> find_legal(const Board& board, const Move& move) {
    for (const auto& m : legal_moves(board)) {
        if (m == move) return m;
    }
    return std::nullopt;
}

Board apply_move(const Board& board, const Move& move) {
    const auto legal = find_legal(board, move);
    if (!legal) {
        throw ChessError(ChessError::Kind::illegal_move, "illegal move " + move.uci() + " in position " + board.fen());
    }
    return detail::play_legal(board, *legal);
}

namespace detail {

Board play_legal(const Board& board, const Move& move) {
    Board b = board;
    const Color us = board.side_to_move();
    const auto moving = board.placement_[move.from.index()];
    const bool capture = move.is_capture();
    const bool pawn_move = moving && moving->kind == PieceKind::pawn;

    make_on(b.placement_, move, us);

    auto drop_right_at = [&b](Square sq) {
        if (sq == Square(0, 0)) b.castling_.white_queen = false;
        if (sq == Square(7, 0)) b.castling_.white_king = false;
        if (sq == Square(0, 7)) b.castling_.black_queen = false;
        if (sq == Square(7, 7)) b.castling_.black_king = false;
    };
    if (moving && moving->kind == PieceKind::king) {
        if (us == Color::white) b.castling_.white_king = b.castling_.white_queen = false;
        else b.castling_.black_king = b.castling_.black_queen = false;
    }
    drop_right_at(move.from);
    drop_right_at(move.to);

    b.en_passant_.reset();
    if (pawn_move && std::abs(move.to.rank() - move.from.rank()) == 2) {
        b.en_passant_ = Square(move.from.file(), (move.from.rank() + move.to.rank()) / 2);
    }

    b.halfmove_clock_ = (pawn_move || capture) ? 0 : board.halfmove_clock_ + 1;
    if (us == Color::black) ++b.fullmove_number_;
    b.side_ = opposite(us);
    b.recompute_key();

    b.previous_repetition_count_ = board.repetition_count_;
    int count = 1;
    std::shared_ptr<const Board::HistoryNode> parent;
    if (b.halfmove_clock_ > 0) {
        parent = board.history_;
        int steps = 0;
        for (auto node = parent.get(); node && steps < b.halfmove_clock_; node = node->parent.get(), ++steps) {
            if (node->key == b.key_) {
                count = node->count + 1;
                break;
            }
        }
    }
    b.repetition_count_ = count;
    b.history_ = std::make_shared<const Board::HistoryNode>(Board::HistoryNode{b.key_, count, std::move(parent)});
    return b;
}

}  // namespace detail

namespace {

bool insufficient_material(const Board& b) {
    std::vector<std::pair<PieceKind, int>> minors;  // kind, square colour
    for (int i = 0; i < 64; ++i) {
        const auto& p = b.placement()[i];
        if (!p || p->kind == PieceKind::king) continue;
        if (p->kind != PieceKind::bishop && p->kind != PieceKind::knight) return false;
        const Square sq = Square::from_index(i);
        minors.emplace_back(p->kind, (sq.file() + sq.rank()) % 2);
    }
    if (minors.size() <= 1) return true;
    if (minors.size() == 2) {
        // K+B vs K+B with bishops on the same colour.
        int white_bishops = 0;
        for (int i = 0; i < 64; ++i) {
            const auto& p = b.placement()[i];
            if (p && p->kind == PieceKind::bishop && p->color == Color::white) ++white_bishops;
        }
        return minors[0].first == PieceKind::bishop && minors[1].first == PieceKind::bishop && white_bishops == 1 &&
               minors[0].second == minors[1].second;
    }
    return false;
}

}  // namespace

GameStatus game_status(const Board& board) {
    if (legal_moves(board).empty()) return board.in_check() ? GameStatus::checkmate : GameStatus::stalemate;
    if (board.halfmove_clock() >= 100) return GameStatus::draw_fifty_move;
    if (board.repetition_count() >= 3) return GameStatus::draw_repetition;
    if (insufficient_material(board)) return GameStatus::draw_insufficient_material;
    return GameStatus::ongoing;
}

std::uint64_t perft(const Board& board, int depth) {
    if (depth <= 0) return 1;
    const auto moves = legal_moves(board);
    if (depth == 1) return moves.size();
    std::uint64_t nodes = 0;
    for (const auto& m : moves) nodes += perft(detail::play_legal(board, m), depth - 1);
    return nodes;
}

}  // namespace scc::chess
