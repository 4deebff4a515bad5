#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "reference_movegen.hpp"
#include "scc/chess/board.hpp"
#include "scc/chess/notation.hpp"

using namespace scc::chess;

namespace {

std::vector<std::string> uci_list(const Board& b) {
    std::vector<std::string> out;
    for (const auto& m : legal_moves(b)) out.push_back(m.uci());
    std::sort(out.begin(), out.end());
    return out;
}

Board play(Board b, std::initializer_list<const char*> moves) {
    for (const char* m : moves) b = apply_move(b, parse_move_text(b, m));
    return b;
}

ChessError::Kind error_kind(auto&& fn) {
    try {
        fn();
    } catch (const ChessError& e) {
        return e.kind();
    }
    FAIL("expected ChessError");
    return ChessError::Kind::malformed_fen;
}

}  // namespace

TEST_CASE("start position") {
    const auto b = Board::start();
    CHECK(b.piece_count() == 32);
    CHECK(b.side_to_move() == Color::white);
    CHECK(b.castling().white_king);
    CHECK(b.castling().white_queen);
    CHECK(b.castling().black_king);
    CHECK(b.castling().black_queen);
    CHECK(b.fen() == std::string(kStartFen));
    CHECK(legal_moves(b).size() == 20);
    CHECK(game_status(b) == GameStatus::ongoing);
}

TEST_CASE("fen errors") {
    CHECK(error_kind([] { Board::from_fen("8/8/8/8/8/8/8/8 w - - 0 1"); }) == ChessError::Kind::malformed_fen);
    CHECK_THROWS_AS(Board::from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq -"), ChessError);
    CHECK_THROWS_AS(Board::from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNX w KQkq - 0 1"), ChessError);
    CHECK_THROWS_AS(Board::from_fen("k7/8/8/8/8/8/8/KK6 w - - 0 1"), ChessError);
    CHECK_THROWS_AS(Board::from_fen("k7/8/8/8/8/8/8/K6P w - - 0 1"), ChessError);
    CHECK_THROWS_AS(Board::from_fen("k7/8/8/8/8/8/8/K7 w - e3 0 1"), ChessError);
    CHECK_THROWS_AS(Board::from_fen("k7/8/8/8/8/8/8/K7 w - - -1 1"), ChessError);
    CHECK_THROWS_AS(Board::from_fen("k7/8/8/8/8/8/8/K7 w - - 0 0"), ChessError);
    try {
        Board::from_fen("k7/8/8/8/8/8/8/K7 x - - 0 1");
    } catch (const ChessError& e) {
        CHECK(std::string(e.what()).find("side") != std::string::npos);
    }
}

TEST_CASE("apply e2e4") {
    const auto b = Board::start();
    const auto after = apply_move(b, parse_move_text(b, "e2e4"));
    CHECK(after.fen() == "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1");
    CHECK(b.fen() == std::string(kStartFen));
    CHECK(scc::testing::reference_play(std::string(kStartFen), "e2e4") == after.fen());
}

TEST_CASE("move text parsing") {
    const auto b = Board::start();
    const auto e4 = parse_move_text(b, "e2e4");
    CHECK(e4.from == *Square::parse("e2"));
    CHECK(e4.to == *Square::parse("e4"));
    const auto nf3 = parse_move_text(b, "Nf3");
    CHECK(nf3.from == *Square::parse("g1"));
    CHECK(nf3.to == *Square::parse("f3"));
    CHECK(error_kind([&] { parse_move_text(b, "e2e5"); }) == ChessError::Kind::illegal_move);
    CHECK(error_kind([&] { parse_move_text(b, "zz"); }) == ChessError::Kind::unparseable_move);
    const auto knights = Board::from_fen("k7/8/8/8/8/8/8/KN3N2 w - - 0 1");
    CHECK(error_kind([&] { parse_move_text(knights, "Nd2"); }) == ChessError::Kind::ambiguous_move);
    CHECK(parse_move_text(knights, "Nbd2").from == *Square::parse("b1"));
    CHECK_THROWS_AS(apply_move(b, Move{*Square::parse("e2"), *Square::parse("e5")}), ChessError);
}

TEST_CASE("san round trip on random positions") {
    for (const auto& b : scc::testing::random_positions(300, 11)) {
        for (const auto& m : legal_moves(b)) {
            const auto san = to_san(b, m);
            CHECK(parse_move_text(b, san) == m);
            CHECK(parse_move_text(b, m.uci()) == m);
        }
    }
}

TEST_CASE("castling, en passant and promotion san") {
    const auto castle = Board::from_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1");
    CHECK(parse_move_text(castle, "O-O").to == *Square::parse("g1"));
    CHECK(parse_move_text(castle, "O-O-O").to == *Square::parse("c1"));
    CHECK(parse_move_text(castle, "O-O").is_castle());
    const auto ep = Board::from_fen("k7/8/8/3pP3/8/8/8/K7 w - d6 0 1");
    const auto exd6 = parse_move_text(ep, "exd6");
    CHECK(exd6.has(MoveFlag::en_passant));
    CHECK(apply_move(ep, exd6).piece_count() == 3);
    const auto promo = Board::from_fen("k7/4P3/8/8/8/8/8/K7 w - - 0 1");
    CHECK(parse_move_text(promo, "e7e8n").promotion == PieceKind::knight);
    CHECK(to_san(promo, parse_move_text(promo, "e8=Q+")) == "e8=Q+");
}

TEST_CASE("game status") {
    const auto fools = play(Board::start(), {"f3", "e5", "g4", "Qh4#"});
    CHECK(fools.in_check());
    CHECK(legal_moves(fools).empty());
    CHECK(game_status(fools) == GameStatus::checkmate);

    const auto stalemate = Board::from_fen("k7/2K5/1Q6/8/8/8/8/8 b - - 0 1");
    CHECK(legal_moves(stalemate).empty());
    CHECK(scc::testing::reference_legal_moves(stalemate.fen()).empty());
    CHECK(game_status(stalemate) == GameStatus::stalemate);

    const auto fifty = Board::from_fen("k7/8/8/8/8/8/8/KR6 w - - 100 80");
    CHECK_FALSE(legal_moves(fifty).empty());
    CHECK(game_status(fifty) == GameStatus::draw_fifty_move);

    CHECK(game_status(Board::from_fen("k7/8/8/8/8/8/8/KB6 w - - 0 1")) == GameStatus::draw_insufficient_material);
    CHECK(game_status(Board::from_fen("k7/8/8/8/8/8/8/KR6 w - - 0 1")) == GameStatus::ongoing);

    auto rep = Board::start();
    for (int i = 0; i < 2; ++i) rep = play(rep, {"Nf3", "Nf6", "Ng1", "Ng8"});
    CHECK(rep.repetition_count() == 3);
    CHECK(game_status(rep) == GameStatus::draw_repetition);
}

TEST_CASE("repetition counts follow the game history") {
    auto b = Board::start();
    CHECK(b.repetition_count() == 1);
    b = play(b, {"Nf3", "Nf6", "Ng1"});
    CHECK(b.previous_repetition_count() == 1);
    b = play(b, {"Ng8"});
    CHECK(b.repetition_count() == 2);
    CHECK(Board::from_fen(b.fen()).repetition_count() == 1);
}

TEST_CASE("perft") {
    const auto start = Board::start();
    CHECK(perft(start, 0) == 1);
    CHECK(perft(start, 1) == 20);
    CHECK(perft(start, 2) == 400);
    CHECK(perft(start, 3) == 8902);
    CHECK(perft(start, 4) == 197281);
    const auto kiwipete = Board::from_fen("r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1");
    CHECK(perft(kiwipete, 1) == 48);
    CHECK(perft(kiwipete, 2) == 2039);
    CHECK(perft(kiwipete, 3) == 97862);
    CHECK(perft(Board::from_fen("8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1"), 4) == 43238);
    CHECK(perft(Board::from_fen("r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1"), 3) == 9467);
    CHECK(perft(Board::from_fen("rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8"), 3) == 62379);
}

TEST_CASE("legal moves agree with the reference generator along random playouts") {
    std::mt19937_64 rng(5);
    for (int game = 0; game < 60; ++game) {
        auto b = Board::start();
        for (int ply = 0; ply < 200 && !is_terminal(b); ++ply) {
            const auto fen = b.fen();
            REQUIRE(uci_list(b) == scc::testing::reference_legal_moves(fen));
            CHECK(Board::from_fen(fen) == b);
            CHECK(Board::from_fen(fen).fen() == fen);
            const auto moves = legal_moves(b);
            CHECK(std::is_sorted(moves.begin(), moves.end()));
            const auto m = moves[rng() % moves.size()];
            const auto next = apply_move(b, m);
            CHECK(next.fen() == scc::testing::reference_play(fen, m.uci()));
            CHECK(next.in_check() == m.gives_check());
            CHECK(next.piece_count() == b.piece_count() - (m.is_capture() ? 1 : 0));
            const auto mover_king = next.king_square(b.side_to_move());
            REQUIRE(mover_king);
            CHECK_FALSE(next.is_attacked(*mover_king, next.side_to_move()));
            b = next;
        }
    }
}

TEST_CASE("color mirroring preserves move counts") {
    for (const auto& b : scc::testing::random_positions(200, 3)) {
        const auto m = b.color_mirrored();
        CHECK(m.side_to_move() == opposite(b.side_to_move()));
        CHECK(legal_moves(m).size() == legal_moves(b).size());
        CHECK(game_status(m) == game_status(b));
    }
}
