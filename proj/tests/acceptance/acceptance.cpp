// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "reference_movegen.hpp"
#include "scc/chess/notation.hpp"
#include "scc/commentary/training.hpp"
#include "scc/data/pgn.hpp"
#include "scc/data/shards.hpp"
#include "scc/encoders/context.hpp"
#include "scc/encoders/move_encoder.hpp"
#include "scc/engine/selfplay.hpp"
#include "scc/engine/training.hpp"
#include "scc/eval/metrics.hpp"
#include "scc/nn/gradcheck.hpp"
#include "scc/service/api.hpp"

using namespace scc;
namespace fs = std::filesystem;

namespace {

// Collects failed expectations for one criterion.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        failed_ |= !ok;
    }
    void note(const std::string& s) { notes_ += (notes_.empty() ? "" : ", ") + s; }
    bool ok() const { return !failed_; }
    std::string detail() const {
        if (failed_) {
            std::string out;
            for (const auto& f : failures_) out += (out.empty() ? "" : "; ") + f;
            return out;
        }
        return notes_;
    }

private:
    bool failed_ = false;
    std::vector<std::string> failures_;
    std::string notes_;
};

struct Criterion {
    std::string name;
    double time_limit_seconds;
    std::function<void(Check&)> run;
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

nn::Tensor random_tensor(nn::Shape shape, nn::Rng& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    nn::Tensor t(std::move(shape));
    for (auto& v : t.values()) v = u(rng);
    return t;
}

nn::ParameterPtr random_param(const std::string& name, nn::Shape shape, nn::Rng& rng, double scale = 1.0) {
    auto p = nn::make_parameter(name, shape);
    p->value = random_tensor(std::move(shape), rng, scale);
    return p;
}

nn::Var weighted_sum(nn::Graph& g, nn::Var y, std::uint64_t seed) {
    nn::Rng rng(seed);
    return g.sum(g.mul(y, g.constant(random_tensor(g.value(y).shape(), rng))));
}

// ---- chess ----------------------------------------------------------------

void chess_correctness(Check& check) {
    const auto start = chess::Board::start();
    const std::uint64_t expected[] = {20, 400, 8902};
    for (int depth = 1; depth <= 3; ++depth) {
        const auto n = chess::perft(start, depth);
        check.expect(n == expected[depth - 1], "perft(" + std::to_string(depth) + ") = " + std::to_string(n));
    }

    std::mt19937_64 rng(2024);
    std::size_t plies = 0, violations = 0;
    auto violation = [&](bool ok, const std::string& what, const std::string& fen) {
        if (!ok) {
            ++violations;
            check.expect(false, what + " at " + fen);
        }
    };
    for (int game = 0; game < 1000; ++game) {
        auto b = chess::Board::start();
        for (int ply = 0; ply < 300; ++ply, ++plies) {
            const auto fen = b.fen();
            const auto moves = chess::legal_moves(b);
            const auto status = chess::game_status(b);
            violation(chess::Board::from_fen(fen).fen() == fen, "FEN round trip", fen);
            // the independent generator is slow; it checks every position of the first 100 games
            if (game < 100) {
                std::vector<std::string> ucis;
                for (const auto& m : moves) ucis.push_back(m.uci());
                std::sort(ucis.begin(), ucis.end());
                violation(ucis == testing::reference_legal_moves(fen), "move list differs from reference", fen);
            }
            if (moves.empty()) {
                violation(status == (b.in_check() ? chess::GameStatus::checkmate : chess::GameStatus::stalemate),
                          "no moves but status is not mate or stalemate", fen);
                break;
            }
            if (status != chess::GameStatus::ongoing) break;
            const auto m = moves[rng() % moves.size()];
            const auto next = chess::apply_move(b, m);
            const auto king = next.king_square(b.side_to_move());
            violation(king && !next.is_attacked(*king, next.side_to_move()), "mover left in check", fen);
            violation(next.side_to_move() != b.side_to_move(), "side to move did not alternate", fen);
            violation(next.in_check() == m.gives_check(), "check flag disagrees", fen);
            violation(next.piece_count() == b.piece_count() - (m.is_capture() ? 1 : 0), "piece count", fen);
            violation(chess::parse_san(b, chess::to_san(b, m)) == m, "SAN round trip", fen);
            if (game < 100) violation(next.fen() == testing::reference_play(fen, m.uci()), "resulting FEN", fen);
            b = next;
        }
    }
    check.note("1000 games, " + std::to_string(plies) + " plies, " + std::to_string(violations) + " violations");
}

// ---- numerics -------------------------------------------------------------

void numerics(Check& check) {
    double worst = 0;
    std::size_t checks = 0;
    auto gradcheck = [&](const std::string& what, const nn::LossBuilder& loss, std::span<const nn::ParameterPtr> params,
                         std::uint64_t seed, std::size_t coordinates = 12) {
        nn::GradientCheckOptions opts;
        opts.seed = seed;
        opts.coordinates_per_parameter = coordinates;
        const auto report = nn::gradient_check(loss, params, opts);
        worst = std::max(worst, report.max_relative_error);
        ++checks;
        check.expect(report.passed && report.max_relative_error < 1e-4,
                     what + " seed " + std::to_string(seed) + ": " + report.summary());
    };

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        nn::Rng r(seed);
        {
            nn::Dense layer("dense", 5, 4, r);
            nn::Conv2d conv("conv", 2, 3, r);
            nn::Embedding embed("embed", 7, 3, r);
            auto x = random_param("x", {5}, r);
            auto planes = random_param("planes", {2, 8, 8}, r);
            nn::ParameterList params;
            layer.collect(params);
            conv.collect(params);
            embed.collect(params);
            params.add(x);
            params.add(planes);
            gradcheck(
                "dense, conv2d, embedding",
                [&](nn::Graph& g) {
                    const nn::Var parts[] = {layer(g, g.param(x)), g.reshape(conv(g, g.param(planes)), {192}),
                                             embed(g, seed % 7)};
                    return weighted_sum(g, g.concat(parts), seed);
                },
                params.items(), seed);
        }
        {
            nn::LstmCell cell("lstm", 3, 4, r);
            nn::BiRnn rnn("rnn", 3, 4, 5, r);
            std::vector<nn::ParameterPtr> xs;
            for (int i = 0; i < 4; ++i) xs.push_back(random_param("x" + std::to_string(i), {3}, r, 2.0));
            nn::ParameterList params;
            cell.collect(params);
            rnn.collect(params);
            for (const auto& x : xs) params.add(x);
            gradcheck(
                "lstm, birnn",
                [&](nn::Graph& g) {
                    auto st = cell.zero_state(g);
                    std::vector<nn::Var> seq;
                    for (const auto& x : xs) {
                        st = cell.step(g, g.param(x), st);
                        seq.push_back(g.param(x));
                    }
                    auto rows = rnn.encode(g, seq);
                    rows.push_back(st.h);
                    rows.push_back(st.c);
                    return weighted_sum(g, g.concat(rows), seed);
                },
                params.items(), seed);
        }
        {
            const std::size_t d = 5, q = 4;
            encoders::Attention attention("att", d, q, r);
            encoders::ValueEmbedding value("W_val", d, r);
            encoders::DiffEmbedding diff("W_diff", d, r);
            encoders::MultiChoiceEncoder mce("mce", d, r);
            mce.experience->value = random_tensor({d}, r);
            auto rows = random_param("rows", {3, d}, r);
            auto s0 = random_param("s0", {d}, r);
            auto s1 = random_param("s1", {d}, r);
            auto h = random_param("h", {q}, r);
            auto v = random_param("v", {1}, r, 0.5);
            nn::ParameterList params;
            for (const auto& p : {attention.weight, value.weight, diff.weight, mce.experience, rows, s0, s1, h, v}) {
                params.add(p);
            }
            gradcheck(
                "attention, W_val, W_diff, multi-choice",
                [&](nn::Graph& g) {
                    const auto ev = value(g, g.param(s0), g.param(v));
                    const auto ed = diff(g, g.param(s0), g.param(s1), g.param(v));
                    std::vector<nn::Var> move_rows;
                    for (std::size_t i = 0; i < 6; ++i) move_rows.push_back(g.row(g.param(rows), i % 3));
                    const std::vector<encoders::Choice> choices{
                        encoders::make_choice(g, move_rows, g.param(s0), ev),
                        encoders::make_choice(g, move_rows, g.param(s1), ed)};
                    const nn::Var parts[] = {attention.attend(g, g.param(rows), g.param(h)).z,
                                             mce.context(g, choices, g.param(h), attention).z};
                    return weighted_sum(g, g.concat(parts), seed + 100);
                },
                params.items(), seed);
        }
        {
            encoders::MoveEncoder encoder("me", {6, 4, 3}, r);
            const auto board = testing::random_positions(30, seed)[29];
            const auto moves = chess::legal_moves(board);
            const auto features = encoders::move_features(board, moves[seed % moves.size()]);
            nn::ParameterList params;
            encoder.collect(params);
            gradcheck(
                "move encoder",
                [&](nn::Graph& g) { return weighted_sum(g, g.stack(encoder.encode(g, features)), seed); },
                params.items(), seed);
        }
    }

    // engine loss
    const auto positions = testing::random_positions(60, 12);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto net = std::make_shared<engine::EngineNet>(testing::tiny_engine_config(seed));
        std::vector<engine::TrainingTuple> batch;
        for (std::size_t i = seed; i < positions.size() && batch.size() < 2; i += 7) {
            if (chess::is_terminal(positions[i])) continue;
            const auto moves = chess::legal_moves(positions[i]);
            batch.push_back({positions[i], moves[seed % moves.size()], seed % 2 ? 1.0 : 0.5});
        }
        gradcheck(
            "engine loss", [&](nn::Graph& g) { return engine::engine_loss(g, *net, batch).total; },
            net->parameters().items(), seed);
    }

    // generation loss for every category, end to end into the engine
    constexpr std::size_t kVocab = 30;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const commentary::CommentaryModel model(testing::tiny_model_config(kVocab, seed), commentary::Mode::mult,
                                                {commentary::kAllCategories.begin(), commentary::kAllCategories.end()});
        const auto boards = testing::random_positions(100, seed + 40, 40);
        nn::Rng rng(seed);
        std::size_t next = 0;
        for (const auto c : commentary::kAllCategories) {
            std::optional<commentary::Continuations> cont;
            while (!cont) {
                const auto& board = boards[(next += 7) % boards.size()];
                if (chess::is_terminal(board)) continue;
                const auto moves = chess::legal_moves(board);
                try {
                    cont = commentary::plan_continuations(model.engine(c), board, moves[rng() % moves.size()], c, 3);
                } catch (const commentary::CommentaryError&) {
                }
            }
            std::vector<std::size_t> tokens;
            for (int k = 0; k < 3; ++k) tokens.push_back(data::Vocabulary::kSpecials + rng() % (kVocab - 4));
            tokens.push_back(data::Vocabulary::kEos);
            const auto params = model.parameters(c);
            auto has = [&](const std::string& name) {
                return std::any_of(params.items().begin(), params.items().end(),
                                   [&](const nn::ParameterPtr& p) { return p->name == name; });
            };
            const std::string cat(commentary::to_string(c));
            check.expect(has("engine/trunk/weight"), cat + " does not reach the engine trunk");
            if (commentary::uses_choices(c)) {
                check.expect(has("mce/g") && has("mce/W_val"), cat + " lacks g or W_val");
            }
            if (c == commentary::Category::quality) check.expect(has("quality/W_diff"), "quality lacks W_diff");
            gradcheck(
                "generation loss " + cat,
                [&](nn::Graph& g) { return commentary::generation_loss(g, model, c, *cont, tokens).loss; },
                params.items(), seed, 4);
        }
    }
    check.note(std::to_string(checks) + " checks, max relative error " + fmt(worst, 3));
}

// ---- attention ------------------------------------------------------------

void attention_algebra(Check& check) {
    nn::Rng rng(31);
    std::uniform_int_distribution<std::size_t> dims(1, 7), counts(1, 5);
    double worst_mass = 0, worst_perm = 0;
    for (int instance = 0; instance < 1000; ++instance) {
        const std::size_t n = dims(rng), d = dims(rng), q = dims(rng);
        encoders::Attention attention("a", d, q, rng);
        attention.weight->value = random_tensor({d, q}, rng, 2.0);
        const auto rows = random_tensor({n, d}, rng, 2.0);
        nn::Graph g(false);
        const auto r = attention.attend(g, g.constant(rows), g.constant(random_tensor({q}, rng, 2.0)));
        const auto& a = g.value(r.weights);
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            check.expect(a[i] >= 0.0, "negative attention weight");
            total += a[i];
        }
        worst_mass = std::max(worst_mass, std::abs(total - 1.0));
        for (std::size_t j = 0; j < d; ++j) {
            double lo = rows.at(0, j), hi = rows.at(0, j);
            for (std::size_t i = 1; i < n; ++i) {
                lo = std::min(lo, rows.at(i, j));
                hi = std::max(hi, rows.at(i, j));
            }
            const double z = g.value(r.z)[j];
            check.expect(z >= lo - 1e-12 && z <= hi + 1e-12, "z outside the convex hull");
        }

        // multi-choice: total mass and permutation equivariance
        const std::size_t k = counts(rng);
        encoders::MultiChoiceEncoder mce("mce", d, rng);
        mce.experience->value = random_tensor({d}, rng, 2.0);
        std::vector<nn::Tensor> blocks;
        for (std::size_t i = 0; i < k; ++i) blocks.push_back(random_tensor({8, d}, rng));
        const auto query = random_tensor({q}, rng);
        std::vector<std::size_t> perm(k);
        for (std::size_t i = 0; i < k; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        auto run = [&](nn::Graph& gr, const std::vector<std::size_t>& order) {
            std::vector<encoders::Choice> choices;
            for (const auto i : order) {
                const auto rows_i = gr.constant(blocks[i]);
                choices.push_back({rows_i, gr.row(rows_i, 6)});
            }
            return mce.context(gr, choices, gr.constant(query), attention);
        };
        std::vector<std::size_t> identity(k);
        for (std::size_t i = 0; i < k; ++i) identity[i] = i;
        nn::Graph g1(false), g2(false);
        const auto base = run(g1, identity);
        const auto permuted = run(g2, perm);
        double mass = 0;
        for (const auto& ai : base.attention) {
            for (double x : g1.value(ai).values()) mass += x;
        }
        worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
        for (std::size_t j = 0; j < d; ++j) {
            worst_perm = std::max(worst_perm, std::abs(g1.value(base.z)[j] - g2.value(permuted.z)[j]));
        }
        for (std::size_t i = 0; i < k; ++i) {
            worst_perm = std::max(worst_perm, std::abs(g2.value(permuted.choice_weights)[i] -
                                                       g1.value(base.choice_weights)[perm[i]]));
        }
    }
    check.expect(worst_mass <= 1e-6, "attention mass off by " + fmt(worst_mass));
    check.expect(worst_perm <= 1e-9, "permutation changed the context by " + fmt(worst_perm));
    check.note("1000 instances, max mass error " + fmt(worst_mass, 2) + ", max permutation error " + fmt(worst_perm, 2));
}

// ---- engine loss and gating -----------------------------------------------

void engine_loss_spot(Check& check) {
    auto config = testing::tiny_engine_config(1);
    config.zero_init_heads = true;
    const engine::EngineNet net(config);
    // two legal moves, so a zero policy head gives probability 0.5; a zero value head gives v = 0.5
    const auto board = chess::Board::from_fen("7k/8/8/8/1P6/p6p/P6P/7K w - - 0 1");
    const auto moves = chess::legal_moves(board);
    check.expect(moves.size() == 2, "fixture should have two legal moves");
    const engine::TrainingTuple t{board, moves[0], 1.0};
    nn::Graph g;
    const double loss = g.scalar_value(engine::engine_loss(g, net, std::span(&t, 1)).total);
    check.expect(std::abs(loss - 0.943147) <= 1e-5, "loss " + fmt(loss, 8));
    check.note("loss " + fmt(loss, 7));
}

void gating_logic(Check& check) {
    const auto a = engine::score_gate(12, 0, 8);
    const auto b = engine::score_gate(11, 0, 9);
    const auto c = engine::score_gate(10, 3, 7);
    check.expect(std::abs(a.rate() - 0.60) < 1e-12 && a.accepted(), "0.60 should be accepted");
    check.expect(std::abs(b.rate() - 0.55) < 1e-12 && !b.accepted(), "0.55 should be rejected");
    check.expect(std::abs(c.rate() - 0.575) < 1e-12 && c.accepted(), "0.575 should be accepted");
    check.note("0.600 accept, 0.550 reject, 0.575 accept");
}

// ---- learning sanity ------------------------------------------------------

void learning_sanity(Check& check) {
    using clock = std::chrono::steady_clock;
    const engine::EngineConfig config{};  // full-size engine

    // (a) 512 positions labelled by a fixed random teacher network
    {
        auto teacher_config = config;
        teacher_config.seed = 99;
        const engine::Engine teacher(std::make_shared<engine::EngineNet>(teacher_config));
        std::vector<engine::TrainingTuple> corpus;
        for (const auto& b : testing::random_positions(2000, 5, 80)) {
            if (chess::is_terminal(b)) continue;
            const auto e = teacher.evaluate(b);
            corpus.push_back({b, e.best().move, e.win_rate > 0.5 ? 1.0 : 0.0});
            if (corpus.size() == 512) break;
        }
        check.expect(corpus.size() == 512, "corpus has " + std::to_string(corpus.size()) + " tuples");
        const auto net = std::make_shared<engine::EngineNet>(config);
        engine::TrainConfig tc;
        tc.steps = 200;
        tc.batch_size = 32;
        tc.optimizer.learning_rate = 1e-3;
        const auto t0 = clock::now();
        const auto report = engine::train_supervised(*net, corpus, tc);
        const auto s = engine::smoothed_loss(report.losses, 20);
        const double reduction = 1.0 - s.final / s.initial;
        check.expect(!report.aborted && reduction >= 0.30, "engine loss reduction " + fmt(reduction));
        check.note("(a) loss " + fmt(s.initial) + " -> " + fmt(s.final) + " (" + fmt(100 * reduction, 3) + "% in " +
                   fmt(std::chrono::duration<double>(clock::now() - t0).count(), 3) + "s)");
    }

    // (b) memorise one tuple
    {
        const auto net = std::make_shared<engine::EngineNet>(config);
        const auto board = chess::Board::start();
        const engine::TrainingTuple t{board, chess::parse_move_text(board, "g1f3"), 1.0};
        const engine::Engine eng(net);
        engine::TrainConfig tc;
        tc.steps = 25;
        tc.batch_size = 1;
        tc.optimizer.learning_rate = 1e-3;
        long steps = 0;
        double p = eng.evaluate(board).probability(t.move);
        while (p <= 0.99 && steps < 500) {
            tc.seed = static_cast<std::uint64_t>(steps);
            const auto r = engine::train_supervised(*net, std::span(&t, 1), tc);
            if (r.aborted) break;
            steps += tc.steps;
            p = eng.evaluate(board).probability(t.move);
        }
        check.expect(p > 0.99, "policy[M] " + fmt(p) + " after " + std::to_string(steps) + " steps");
        check.note("(b) policy[M] " + fmt(p) + " after " + std::to_string(steps) + " steps");
    }

    // (c) teacher-forced token accuracy per category on 32 samples
    {
        const auto records = testing::toy_records(32, 77, 8);
        std::vector<std::vector<std::string>> corpus;
        for (const auto& r : records) corpus.push_back(r.tokens);
        const auto vocab = data::Vocabulary::build(corpus, 1);
        auto mc = testing::tiny_model_config(vocab.size(), 3);
        mc.decoder_hidden = 32;
        mc.word_width = 16;
        commentary::CommentaryTrainConfig tc;
        tc.steps = 2000;
        tc.batch_size = 8;
        tc.optimizer.learning_rate = 0.01;
        tc.validation_interval = tc.steps;
        std::string accuracies;
        for (const auto c : commentary::kAllCategories) {
            commentary::CommentaryModel model(mc, commentary::Mode::single, {c});
            std::vector<data::CommentaryRecord> mine;
            for (const auto& r : records) {
                if (r.category == c) mine.push_back(r);
            }
            const auto prepared = commentary::prepare_samples(model, mine, vocab);
            check.expect(prepared.samples.size() == 32, std::string(commentary::to_string(c)) + " has " +
                                                            std::to_string(prepared.samples.size()) + " samples");
            const auto report = commentary::train_commentary(model, prepared.samples, {}, tc);
            const double acc = commentary::token_accuracy(model, prepared.samples);
            check.expect(!report.aborted && acc >= 0.95,
                         std::string(commentary::to_string(c)) + " token accuracy " + fmt(acc));
            accuracies += (accuracies.empty() ? "" : " ") + std::string(commentary::to_string(c)) + "=" + fmt(acc, 3);
        }
        check.note("(c) " + accuracies);
    }
}

// ---- metrics --------------------------------------------------------------

// Best alignment by enumerating every one-to-one linking.
double brute_force_meteor(const eval::Sentence& hyp, const eval::Sentence& ref) {
    int best_exact = -1, best_matches = 0, best_chunks = 0;
    std::vector<int> link(hyp.size(), -1);
    std::vector<bool> used(ref.size(), false);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == hyp.size()) {
            int exact = 0, matches = 0, chunks = 0;
            for (std::size_t k = 0; k < hyp.size(); ++k) {
                if (link[k] < 0) continue;
                ++matches;
                exact += hyp[k] == ref[link[k]];
                if (k == 0 || link[k - 1] < 0 || link[k - 1] + 1 != link[k]) ++chunks;
            }
            const bool better = exact != best_exact       ? exact > best_exact
                                : matches != best_matches ? matches > best_matches
                                                          : chunks < best_chunks;
            if (better) {
                best_exact = exact;
                best_matches = matches;
                best_chunks = chunks;
            }
            return;
        }
        rec(i + 1);
        for (std::size_t j = 0; j < ref.size(); ++j) {
            if (used[j] || (hyp[i] != ref[j] && eval::stem(hyp[i]) != eval::stem(ref[j]))) continue;
            used[j] = true;
            link[i] = static_cast<int>(j);
            rec(i + 1);
            used[j] = false;
            link[i] = -1;
        }
    };
    rec(0);
    if (best_matches == 0) return 0;
    const double p = best_matches / static_cast<double>(hyp.size());
    const double r = best_matches / static_cast<double>(ref.size());
    const double frag = static_cast<double>(best_chunks) / best_matches;
    return 10 * p * r / (r + 9 * p) * (1 - 0.5 * frag * frag * frag);
}

void metrics(Check& check) {
    static const std::vector<std::string> words{"the", "knight", "knights", "takes", "taking", "pawn", "pawns",
                                                "on", "e5", "white", "black", "attacks", "attacked", "a"};
    std::mt19937_64 rng(12);
    std::vector<eval::EvalPair> identity;
    for (int i = 0; i < 50; ++i) {
        eval::Sentence s;
        for (std::size_t k = 4 + rng() % 10; k-- > 0;) s.push_back(words[rng() % words.size()]);
        identity.push_back({s, s, "x"});
    }
    const double b4 = eval::bleu_corpus(identity, 4), b2 = eval::bleu_corpus(identity, 2);
    check.expect(b4 == 1.0 && b2 == 1.0, "identity BLEU " + fmt(b4) + " / " + fmt(b2));

    const std::vector<eval::EvalPair> fixture{{{"the", "cat", "sat"}, {"the", "cat", "sat", "on", "the", "mat"}, "x"}};
    const double fixed = eval::bleu_corpus(fixture, 2);
    check.expect(std::abs(fixed - 0.3679) <= 1e-4, "BLEU-2 fixture " + fmt(fixed, 6));

    std::size_t agree = 0;
    for (int i = 0; i < 200; ++i) {
        eval::Sentence h, r;
        for (std::size_t k = 1 + rng() % 8; k-- > 0;) h.push_back(words[rng() % words.size()]);
        for (std::size_t k = 1 + rng() % 8; k-- > 0;) r.push_back(words[rng() % words.size()]);
        const double ours = eval::meteor_sentence(h, r), oracle = brute_force_meteor(h, r);
        agree += std::abs(ours - oracle) < 1e-12;
    }
    check.expect(agree == 200, "meteor_s differs from the oracle on " + std::to_string(200 - agree) + " pairs");
    check.note("identity 1.0, BLEU-2 fixture " + fmt(fixed, 6) + ", meteor_s oracle " + std::to_string(agree) + "/200");
}

// ---- pipeline ---------------------------------------------------------------

std::string rated_pgn(std::uint64_t seed, int games) {
    std::mt19937_64 rng(seed);
    std::ostringstream out;
    for (int game = 0; game < games; ++game) {
        auto b = chess::Board::start();
        std::string movetext;
        for (int ply = 0; ply < 120 && !chess::is_terminal(b); ++ply) {
            const auto moves = chess::legal_moves(b);
            const auto m = moves[rng() % moves.size()];
            if (ply % 2 == 0) movetext += std::to_string(ply / 2 + 1) + ". ";
            movetext += chess::to_san(b, m) + " ";
            b = chess::apply_move(b, m);
        }
        const auto status = chess::game_status(b);
        std::string result = "*";
        if (status == chess::GameStatus::checkmate) {
            result = b.side_to_move() == chess::Color::white ? "0-1" : "1-0";
        } else if (status != chess::GameStatus::ongoing) {
            result = "1/2-1/2";
        } else if (game % 3 != 0) {
            result = game % 2 ? "1-0" : "1/2-1/2";  // adjudicated
        }
        out << "[White \"w" << game << "\"]\n[Black \"b" << game << "\"]\n[WhiteElo \"" << 1900 + rng() % 400
            << "\"]\n[BlackElo \"" << 1900 + rng() % 400 << "\"]\n[Result \"" << result << "\"]\n\n"
            << movetext << result << "\n\n";
    }
    return out.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void pipeline(Check& check) {
    const auto root = fs::temp_directory_path() / "scc_acceptance_pipeline";
    fs::remove_all(root);
    auto shard_run = [&](const std::string& name) {
        const auto parsed = data::parse_pgn_text(rated_pgn(8, 40));
        const auto tuples = data::extract_engine_tuples(parsed.games, 2000).tuples;
        data::write_shard(root / name, tuples);
        return tuples.size();
    };
    fs::create_directories(root);
    const auto n = shard_run("a.shard");
    shard_run("b.shard");
    check.expect(n > 0, "no tuples extracted");
    check.expect(slurp(root / "a.shard") == slurp(root / "b.shard"), "tuple shards differ");

    for (const std::size_t games : {10u, 100u}) {
        const auto records = testing::toy_records(std::max<std::size_t>(games / 5, 4), 17, games);
        std::vector<std::string> dirs;
        for (const char* run : {"run1", "run2"}) {
            const auto split = data::split_by_game(records, 5);
            std::vector<std::vector<std::string>> corpus;
            for (const auto& r : split.train) corpus.push_back(r.tokens);
            const auto dir = root / (std::to_string(games) + run);
            data::write_prepared_dataset(dir, split, data::Vocabulary::build(corpus, 1));
            dirs.push_back(dir.string());

            std::map<data::Split, std::size_t> per_split;
            for (const auto& [game, s] : split.manifest) ++per_split[s];
            const auto expected = data::split_counts(games);
            check.expect(split.manifest.size() == games, "manifest size " + std::to_string(split.manifest.size()));
            check.expect(per_split[data::Split::train] == games * 7 / 10 && per_split[data::Split::valid] == games / 10 &&
                             per_split[data::Split::test] == games * 2 / 10,
                         std::to_string(games) + " games not split 7:1:2");
            check.expect(expected.train == per_split[data::Split::train], "split_counts disagrees");
            auto follows = [&](const std::vector<data::CommentaryRecord>& part, data::Split s) {
                for (const auto& r : part) {
                    if (split.manifest.at(r.game_id) != s) return false;
                }
                return true;
            };
            check.expect(follows(split.train, data::Split::train) && follows(split.valid, data::Split::valid) &&
                             follows(split.test, data::Split::test),
                         "a game's samples span splits");
        }
        for (const char* f : {"train.tsv", "valid.tsv", "test.tsv", "vocab.txt", "splits.tsv"}) {
            check.expect(slurp(fs::path(dirs[0]) / f) == slurp(fs::path(dirs[1]) / f),
                         std::string(f) + " differs between runs");
        }
    }
    fs::remove_all(root);
    check.note(std::to_string(n) + " tuples, shards/vocab/splits byte-identical, 7:1:2 on 10 and 100 games");
}

// ---- service ----------------------------------------------------------------

void service_contract(Check& check) {
    const auto bundle = std::make_shared<const commentary::Bundle>(testing::tiny_bundle(13));
    service::ServiceOptions options;
    options.generation.max_tokens = 12;
    const service::CommentService svc(bundle, options);
    const std::string start = chess::Board::start().fen();

    const auto legal = svc.handle("POST", "/api/legal", nlohmann::json{{"fen", start}}.dump());
    check.expect(legal.status == 200 && legal.body["moves"].size() == 20,
                 "/api/legal returned " + legal.body.dump().substr(0, 80));

    const auto request = nlohmann::json{{"fen", start}, {"move", "e2e4"}}.dump();
    std::vector<std::string> bodies(8);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < bodies.size(); ++i) {
        threads.emplace_back([&, i] { bodies[i] = svc.handle("POST", "/api/comment", request).body.dump(); });
    }
    for (auto& t : threads) t.join();
    check.expect(std::all_of(bodies.begin(), bodies.end(), [&](const std::string& b) { return b == bodies[0]; }),
                 "concurrent identical requests differ");

    std::mt19937_64 rng(6);
    std::size_t replayed = 0;
    for (const auto& board : testing::random_positions(40, 77, 60)) {
        if (chess::is_terminal(board)) continue;
        const auto moves = chess::legal_moves(board);
        const auto move = moves[rng() % moves.size()];
        const int horizon = 1 + static_cast<int>(rng() % 16);
        const auto r = svc.comment(nlohmann::json{{"fen", board.fen()}, {"move", move.uci()}, {"horizon", horizon}});
        check.expect(r.status == 200, "comment failed: " + r.body.dump().substr(0, 120));
        if (r.status != 200) continue;
        for (const char* k : {"win_rate_before", "win_rate_after"}) {
            const double v = r.body[k].get<double>();
            check.expect(v >= 0.0 && v <= 1.0, std::string(k) + " out of range");
        }
        auto pos = chess::apply_move(board, move);
        bool ok = r.body["rollout"].size() <= static_cast<std::size_t>(horizon);
        for (const auto& m : r.body["rollout"]) {
            try {
                pos = chess::apply_move(pos, chess::parse_uci(pos, m.get<std::string>()));
            } catch (const chess::ChessError&) {
                ok = false;
                break;
            }
        }
        check.expect(ok, "rollout does not replay from " + board.fen());
        replayed += ok;
    }
    check.note("20 legal moves, 8 identical concurrent bodies, " + std::to_string(replayed) + " rollouts replayed");
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"chess correctness", 30, chess_correctness},
        {"numerics (gradient checks)", 300, numerics},
        {"attention algebra", 60, attention_algebra},
        {"engine loss spot value", 10, engine_loss_spot},
        {"gating logic", 10, gating_logic},
        {"learning sanity", 900, learning_sanity},
        {"metrics", 60, metrics},
        {"pipeline determinism", 60, pipeline},
        {"service contract", 60, service_contract},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Check check;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        check.expect(secs < c.time_limit_seconds, "took " + fmt(secs, 4) + "s, limit " + fmt(c.time_limit_seconds) + "s");
        failed += !check.ok();
        std::cout << (check.ok() ? "PASS " : "FAIL ") << c.name << " [" << fmt(secs, 3) << "s]: " << check.detail()
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
