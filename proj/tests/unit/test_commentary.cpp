#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "fixtures.hpp"
#include "scc/chess/notation.hpp"
#include "scc/commentary/bundle.hpp"
#include "scc/commentary/training.hpp"
#include "scc/nn/gradcheck.hpp"

using namespace scc;
using namespace scc::commentary;

namespace {

constexpr std::size_t kVocab = 40;

std::shared_ptr<CommentaryModel> tiny_model(Mode mode, std::uint64_t seed = 1,
                                            std::vector<Category> cats = {kAllCategories.begin(),
                                                                          kAllCategories.end()}) {
    return std::make_shared<CommentaryModel>(testing::tiny_model_config(kVocab, seed), mode, std::move(cats));
}

// A sample per category on a random middlegame position.
std::vector<Sample> random_samples(const CommentaryModel& model, std::uint64_t seed, std::size_t per_category = 1) {
    nn::Rng rng(seed);
    std::vector<Sample> out;
    const auto positions = testing::random_positions(200, seed, 40);
    std::size_t next = 0;
    for (const auto c : model.categories()) {
        for (std::size_t k = 0; k < per_category;) {
            const auto& board = positions[(next += 7) % positions.size()];
            if (chess::is_terminal(board)) continue;
            const auto moves = chess::legal_moves(board);
            const auto move = moves[rng() % moves.size()];
            try {
                auto cont = plan_continuations(model.engine(c), board, move, c, 3);
                std::vector<std::size_t> tokens(1 + rng() % 4);
                for (auto& t : tokens) t = data::Vocabulary::kSpecials + rng() % (kVocab - data::Vocabulary::kSpecials);
                tokens.push_back(data::Vocabulary::kEos);
                out.push_back({c, std::move(cont), std::move(tokens)});
                ++k;
            } catch (const CommentaryError&) {
            }
        }
    }
    return out;
}

nn::Tensor logits_of(const CommentaryModel& model, const Sample& s) {
    nn::Graph g(false);
    const auto r = generation_loss(g, model, s.category, s.continuations, s.tokens);
    std::vector<double> all;
    for (const auto l : r.logits) {
        const auto& v = g.value(l).values();
        all.insert(all.end(), v.begin(), v.end());
    }
    return nn::Tensor::vector(all);
}

}  // namespace

TEST_CASE("mult mode shares the engine, move encoder, g and W_val") {
    const auto model = tiny_model(Mode::mult);
    const auto all = model->parameters();
    CHECK(all.find("engine/trunk/weight"));
    CHECK(all.find("mce/g"));
    CHECK(all.find("mce/W_val"));
    CHECK(all.find("quality/W_diff"));
    for (const auto c : kAllCategories) {
        const auto p = model->parameters(c);
        CHECK(p.find("engine/trunk/weight") == all.find("engine/trunk/weight"));
        CHECK(bool(p.find("mce/g")) == uses_choices(c));
        CHECK(bool(p.find("quality/W_diff")) == (c == Category::quality));
    }
    // decoders never alias
    std::set<const nn::Parameter*> seen;
    std::size_t decoder_params = 0;
    for (const auto c : kAllCategories) {
        nn::ParameterList d;
        model->decoder(c).collect(d);
        for (const auto& p : d.items()) {
            CHECK(seen.insert(p.get()).second);
            ++decoder_params;
        }
    }
    CHECK(decoder_params > 0);
}

TEST_CASE("single mode keeps every category separate") {
    const auto model = tiny_model(Mode::single);
    std::set<const nn::Parameter*> seen;
    for (const auto c : kAllCategories) {
        const auto params = model->parameters(c);
        for (const auto& p : params.items()) {
            CHECK(seen.insert(p.get()).second);
            if (p->name != "quality/W_diff") CHECK(p->name.rfind(std::string(to_string(c)) + "/", 0) == 0);
        }
        CHECK(bool(params.find(std::string(to_string(c)) + "/mce/g")) == uses_choices(c));
    }
    CHECK(model->parameters().size() == seen.size());
}

TEST_CASE("pretrained engine weights are copied") {
    auto net = std::make_shared<engine::EngineNet>(testing::tiny_engine_config(9));
    const CommentaryModel single(testing::tiny_model_config(kVocab, 2), Mode::single,
                                 {Category::description, Category::planning}, net.get());
    const auto board = chess::Board::start();
    const auto expected = engine::Engine(net).evaluate(board).win_rate;
    for (const auto c : single.categories()) CHECK(single.engine(c).evaluate(board).win_rate == expected);
}

TEST_CASE("uniform output gives ln V") {
    auto config = testing::tiny_model_config(100);
    const CommentaryModel model(config, Mode::mult, {kAllCategories.begin(), kAllCategories.end()});
    for (const auto c : kAllCategories) {
        nn::ParameterList out;
        model.decoder(c).output.collect(out);
        for (const auto& p : out.items()) p->value.fill(0.0);
    }
    const auto samples = [&] {
        nn::Rng rng(1);
        std::vector<Sample> s;
        const auto board = chess::Board::start();
        for (const auto c : kAllCategories) {
            s.push_back({c, plan_continuations(model.engine(c), board, chess::parse_uci(board, "e2e4"), c),
                         {7, 9, 11, data::Vocabulary::kEos}});
        }
        return s;
    }();
    for (const auto& s : samples) {
        nn::Graph g;
        CHECK(std::abs(g.scalar_value(generation_loss(g, model, s.category, s.continuations, s.tokens).loss) -
                       std::log(100.0)) < 1e-12);
    }
}

TEST_CASE("loss is the mean of per-step cross entropies") {
    const auto model = tiny_model(Mode::mult, 4);
    for (const auto& s : random_samples(*model, 4, 2)) {
        nn::Graph g;
        const auto r = generation_loss(g, *model, s.category, s.continuations, s.tokens);
        REQUIRE(r.logits.size() == s.tokens.size());
        double total = 0;
        for (std::size_t t = 0; t < s.tokens.size(); ++t) {
            const auto& z = g.value(r.logits[t]).values();
            double m = z[0];
            for (double v : z) m = std::max(m, v);
            double sum = 0;
            for (double v : z) sum += std::exp(v - m);
            total += m + std::log(sum) - z[s.tokens[t]];
        }
        CHECK(std::abs(g.scalar_value(r.loss) - total / static_cast<double>(s.tokens.size())) < 1e-9);
    }
}

TEST_CASE("bad targets are rejected") {
    const auto model = tiny_model(Mode::mult);
    const auto board = chess::Board::start();
    const auto cont = plan_continuations(model->engine(Category::description), board,
                                         chess::parse_uci(board, "e2e4"), Category::description);
    nn::Graph g;
    CHECK_THROWS_AS(generation_loss(g, *model, Category::description, cont, {5, 6}), CommentaryError);
    CHECK_THROWS_AS(generation_loss(g, *model, Category::description, cont, {5, kVocab, 2}), CommentaryError);
    CHECK_THROWS_AS(generation_loss(g, *model, Category::description, cont, {}), CommentaryError);
}

TEST_CASE("end-to-end gradients for every category") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto model = tiny_model(Mode::mult, seed);
        const auto samples = random_samples(*model, seed + 50);
        for (const auto& s : samples) {
            INFO(to_string(s.category));
            const auto params = model->parameters(s.category);
            nn::GradientCheckOptions opts;
            opts.seed = seed;
            opts.coordinates_per_parameter = 4;
            const auto report = nn::gradient_check(
                [&](nn::Graph& g) { return generation_loss(g, *model, s.category, s.continuations, s.tokens).loss; },
                params.items(), opts);
            INFO(report.summary());
            CHECK(report.passed);
        }
    }
}

TEST_CASE("planning needs a continuation") {
    const auto model = tiny_model(Mode::mult);
    // Qh4# ends the game
    const auto board = chess::Board::from_fen("rnbqkbnr/pppp1ppp/8/4p3/6P1/5P2/PPPPP2P/RNBQKBNR b KQkq - 0 2");
    const auto mate = chess::parse_uci(board, "d8h4");
    try {
        plan_continuations(model->engine(Category::planning), board, mate, Category::planning);
        FAIL("expected no_continuation");
    } catch (const CommentaryError& e) {
        CHECK(e.kind() == CommentaryError::Kind::no_continuation);
    }
    const auto contexts = plan_continuations(model->engine(Category::contexts), board, mate, Category::contexts);
    CHECK(contexts.rollout.empty());
    nn::Graph g;
    CHECK(build_context(g, *model, Category::contexts, contexts).choices.size() == 1);

    const auto illegal = chess::Move{*chess::Square::parse("e1"), *chess::Square::parse("e2"), {}};
    CHECK_THROWS_AS(plan_continuations(model->engine(Category::description), chess::Board::start(), illegal,
                                       Category::description),
                    CommentaryError);
    CHECK_THROWS_AS(plan_continuations(model->engine(Category::planning), chess::Board::start(),
                                       chess::parse_uci(chess::Board::start(), "e2e4"), Category::planning, 17),
                    std::invalid_argument);
}

TEST_CASE("context shapes per category") {
    const auto model = tiny_model(Mode::mult);
    const auto board = chess::Board::start();
    const auto move = chess::parse_uci(board, "g1f3");
    const std::map<Category, std::size_t> rows{{Category::description, 7}, {Category::quality, 3}};
    for (const auto c : kAllCategories) {
        nn::Graph g(false);
        const auto ctx = build_context(g, *model, c, plan_continuations(model->engine(c), board, move, c, 4));
        if (uses_choices(c)) {
            const std::size_t expected = c == Category::comparison ? 2 : c == Category::planning ? 4 : 5;
            CHECK(ctx.choices.size() == expected);
            for (const auto& ch : ctx.choices) CHECK(g.value(ch.rows).shape() == nn::Shape{8, 16});
        } else {
            CHECK(ctx.rows.size() == rows.at(c));
            CHECK(g.value(ctx.stacked).shape() == nn::Shape{rows.at(c), 16});
        }
    }
}

TEST_CASE("mutating g changes exactly the choice categories") {
    const auto model = tiny_model(Mode::mult, 6);
    const auto samples = random_samples(*model, 6);
    std::map<Category, nn::Tensor> before;
    for (const auto& s : samples) before[s.category] = logits_of(*model, s);
    for (auto& v : model->shared(Category::comparison).mce->experience->value.values()) v += 0.5;
    for (const auto& s : samples) {
        INFO(to_string(s.category));
        CHECK((logits_of(*model, s) != before[s.category]) == uses_choices(s.category));
    }
}

TEST_CASE("beam width 1 equals greedy") {
    const auto model = tiny_model(Mode::mult, 8);
    GenerationConfig greedy;
    greedy.method = GenerationConfig::Method::greedy;
    greedy.max_tokens = 12;
    GenerationConfig beam1;
    beam1.beam_width = 1;
    beam1.max_tokens = 12;
    const auto samples = random_samples(*model, 8, 10);
    REQUIRE(samples.size() == 50);
    for (const auto& s : samples) {
        CHECK(generate(*model, s.category, s.continuations, greedy) ==
              generate(*model, s.category, s.continuations, beam1));
    }
}

TEST_CASE("beam search respects the length limit and is deterministic") {
    const auto model = tiny_model(Mode::mult, 10);
    GenerationConfig config;
    config.max_tokens = 6;
    for (const auto& s : random_samples(*model, 10)) {
        const auto a = generate(*model, s.category, s.continuations, config);
        CHECK(a.size() <= 6);
        for (const auto t : a) {
            CHECK(t != data::Vocabulary::kPad);
            CHECK(t != data::Vocabulary::kBos);
            CHECK(t != data::Vocabulary::kEos);
        }
        CHECK(generate(*model, s.category, s.continuations, config) == a);
    }
    GenerationConfig bad;
    bad.beam_width = 0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("checkpoint round trip preserves outputs") {
    for (const auto mode : {Mode::mult, Mode::single}) {
        const auto model = tiny_model(mode, 12);
        const auto copy = CommentaryModel::from_checkpoint(nn::deserialize(nn::serialize(model->to_checkpoint())));
        CHECK(copy->mode() == mode);
        for (const auto& s : random_samples(*model, 12)) CHECK(logits_of(*model, s) == logits_of(*copy, s));
    }
}

TEST_CASE("training with a frozen engine leaves it bit-identical") {
    const auto model = tiny_model(Mode::mult, 13);
    const auto samples = random_samples(*model, 13, 2);
    const auto before = model->engine_parameters();
    std::vector<nn::Tensor> values;
    for (const auto& p : before.items()) values.push_back(p->value);

    CommentaryTrainConfig config;
    config.steps = 5;
    config.batch_size = 2;
    config.freeze_engine = true;
    train_commentary(*model, samples, {}, config);
    for (std::size_t i = 0; i < values.size(); ++i) CHECK(before.items()[i]->value == values[i]);
    for (const auto& p : before.items()) CHECK(p->trainable);

    config.freeze_engine = false;
    config.engine_loss_weight = 0.5;
    train_commentary(*model, samples, {}, config);
    bool changed = false;
    for (std::size_t i = 0; i < values.size(); ++i) changed |= before.items()[i]->value != values[i];
    CHECK(changed);
}

TEST_CASE("training reduces loss, keeps the best validation point and skips empty categories") {
    const auto records = testing::toy_records(8, 21, 4);
    std::vector<std::vector<std::string>> corpus;
    for (const auto& r : records) corpus.push_back(r.tokens);
    const auto vocab = data::Vocabulary::build(corpus, 1);
    CommentaryModel model(testing::tiny_model_config(vocab.size(), 21), Mode::single,
                          {Category::description, Category::quality});
    std::vector<data::CommentaryRecord> description;
    for (const auto& r : records) {
        if (r.category == Category::description) description.push_back(r);
    }
    const auto prepared = prepare_samples(model, description, vocab);
    CHECK(prepared.warnings.empty());
    const auto dropped = prepare_samples(model, records, vocab);
    CHECK(dropped.warnings.size() == 24);  // comparison, planning, contexts

    CommentaryTrainConfig config;
    config.steps = 60;
    config.batch_size = 4;
    config.optimizer.learning_rate = 0.01;
    config.validation_interval = 10;
    const auto report = train_commentary(model, prepared.samples, prepared.samples, config);
    REQUIRE(report.categories.count(Category::quality));
    CHECK(report.categories.at(Category::quality).skipped);
    CHECK(report.warnings.size() == 1);
    const auto& d = report.categories.at(Category::description);
    REQUIRE(d.valid_losses.size() == 6);
    CHECK(d.valid_losses.back().second < d.valid_losses.front().second);
    REQUIRE(d.best_valid);
    std::vector<const Sample*> ptrs;
    for (const auto& s : prepared.samples) ptrs.push_back(&s);
    CHECK(mean_loss(model, Category::description, ptrs) == doctest::Approx(*d.best_valid).epsilon(1e-12));
}

TEST_CASE("bundles and comments") {
    const auto dir = std::filesystem::temp_directory_path() / "scc_test_bundle";
    std::filesystem::remove_all(dir);
    const auto records = testing::toy_records(2, 30, 4);
    std::vector<std::vector<std::string>> corpus;
    for (const auto& r : records) corpus.push_back(r.tokens);
    const auto vocab = data::Vocabulary::build(corpus, 1);
    const CommentaryModel model(testing::tiny_model_config(vocab.size(), 30), Mode::mult,
                                {kAllCategories.begin(), kAllCategories.end()});
    const auto id = save_bundle(dir, model, vocab, {{"note", "test"}});
    const auto bundle = load_bundle(dir);
    CHECK(bundle.model_id == id);
    CHECK(bundle.manifest.at("note") == "test");
    CHECK(bundle.vocab == vocab);

    const auto board = chess::Board::from_fen("rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq - 0 1");
    CommentRequest request{board, chess::parse_uci(board, "e7e5"), {}, 3, {}};
    request.generation.max_tokens = 8;
    const auto result = comment(bundle, request);
    CHECK(result.model_id == id);
    CHECK(result.comments.size() == 5);
    CHECK(result.rollout.size() == 3);
    const auto engine = bundle.model->engine(Category::description);
    CHECK(result.win_rate_before == doctest::Approx(1.0 - engine.evaluate(board).win_rate));
    CHECK(result.best_alternative != request.move);
    for (const auto& c : result.comments) {
        CHECK_FALSE(c.error);
        CHECK(c.tokens.size() <= 8);
    }
    const auto rows = comment_tsv_rows(result);
    REQUIRE(rows.size() == 5);
    CHECK(std::count(rows[0].begin(), rows[0].end(), '\t') == 6);
    CHECK(comment(bundle, request).comments[2].text == result.comments[2].text);

    request.move = chess::Move{*chess::Square::parse("e7"), *chess::Square::parse("e4"), {}};
    CHECK_THROWS_AS(comment(bundle, request), CommentaryError);

    std::filesystem::remove(dir / "vocab.txt");
    CHECK_THROWS_AS(load_bundle(dir), BundleError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("single legal move gives a degenerate comparison") {
    const auto records = testing::toy_records(1, 31, 2);
    std::vector<std::vector<std::string>> corpus;
    for (const auto& r : records) corpus.push_back(r.tokens);
    const auto vocab = data::Vocabulary::build(corpus, 1);
    Bundle bundle{std::make_shared<CommentaryModel>(testing::tiny_model_config(vocab.size(), 31), Mode::mult,
                                                    std::vector<Category>{Category::comparison}),
                  vocab, "x", {}};
    // black king on h8 in check from the rook, only Kg7... is legal
    const auto board = chess::Board::from_fen("7k/8/6K1/8/8/8/8/R7 b - - 0 1");
    const auto moves = chess::legal_moves(board);
    REQUIRE(moves.size() == 1);
    CommentRequest request{board, moves[0], {Category::comparison}, 4, {}};
    request.generation.max_tokens = 4;
    const auto result = comment(bundle, request);
    CHECK(result.degenerate_alternative);
    CHECK(result.best_alternative == moves[0]);
    CHECK(comment_tsv_rows(result)[0].substr(comment_tsv_rows(result)[0].rfind('\t') + 1) == "-");
}
