#include "cli.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "http.hpp"
#include "scc/chess/notation.hpp"
#include "scc/commentary/bundle.hpp"
#include "scc/commentary/training.hpp"
#include "scc/data/commentary_data.hpp"
#include "scc/data/pgn.hpp"
#include "scc/data/shards.hpp"
#include "scc/engine/selfplay.hpp"
#include "scc/engine/training.hpp"
#include "scc/eval/metrics.hpp"
#include "scc/service/api.hpp"

namespace scc::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_file(const fs::path& path, const std::string& what) {
    if (!fs::is_regular_file(path)) throw DataFailure(what + " not found: " + path.string());
}

// Configuration checks throw std::invalid_argument; those are usage errors.
template <class F>
void checked(F&& validate) {
    try {
        validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::vector<std::string> read_lines(const fs::path& path) {
    require_file(path, "file");
    std::ifstream in(path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(line);
    }
    return out;
}

eval::Sentence split_words(const std::string& line) {
    std::istringstream in(line);
    eval::Sentence out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

std::vector<commentary::Category> parse_categories(const std::string& text) {
    if (text == "all") return {commentary::kAllCategories.begin(), commentary::kAllCategories.end()};
    std::vector<commentary::Category> out;
    std::stringstream in(text);
    std::string name;
    while (std::getline(in, name, ',')) {
        const auto c = commentary::parse_category(name);
        if (!c) throw UsageError("unknown category '" + name + "'");
        if (std::find(out.begin(), out.end(), *c) == out.end()) out.push_back(*c);
    }
    if (out.empty()) throw UsageError("no category given");
    return out;
}

void warn_rejections(std::ostream& err, const fs::path& file, const std::vector<data::RowRejection>& rejected) {
    for (const auto& r : rejected) err << "warning: " << file.string() << ":" << r.line << ": " << r.reason << "\n";
}

void warn_some(std::ostream& err, const std::vector<std::string>& warnings, std::size_t limit = 5) {
    for (std::size_t i = 0; i < std::min(limit, warnings.size()); ++i) err << "warning: " << warnings[i] << "\n";
    if (warnings.size() > limit) err << "warning: ... " << warnings.size() - limit << " more\n";
}

std::string smoothed(const std::vector<double>& losses) {
    if (losses.empty()) return "n/a";
    const auto s = engine::smoothed_loss(losses, std::clamp<std::size_t>(losses.size() / 2, 1, 20));
    return fixed4(s.initial) + " -> " + fixed4(s.final);
}

std::shared_ptr<engine::EngineNet> load_engine(const fs::path& path, std::string* hash = nullptr) {
    require_file(path, "checkpoint");
    const auto ckpt = nn::load_checkpoint(path);
    if (hash) *hash = nn::checkpoint_hash(ckpt);
    return engine::EngineNet::from_checkpoint(ckpt);
}

commentary::GenerationConfig generation_config(std::size_t beam, std::size_t max_tokens) {
    commentary::GenerationConfig g;
    g.method = beam <= 1 ? commentary::GenerationConfig::Method::greedy : commentary::GenerationConfig::Method::beam;
    g.beam_width = std::max<std::size_t>(beam, 1);
    g.max_tokens = max_tokens;
    checked([&] { g.validate(); });
    return g;
}

// ---- engine -------------------------------------------------------------

struct EngineTrainOptions {
    std::string pgn, out, init, loss_curve;
    int min_rating = 2000;
    long steps = 0;
    std::size_t batch = 32;
    double lr = 1e-3;
    std::uint64_t seed = 7;
    engine::EngineConfig net{};
    int iterations = 0;
    int gate_games = 20;
    double threshold = 0.55;
};

void engine_train(const EngineTrainOptions& o, std::ostream& out, std::ostream& err) {
    engine::TrainConfig tc;
    tc.steps = o.steps;
    tc.batch_size = o.batch;
    tc.seed = o.seed;
    tc.optimizer.learning_rate = o.lr;
    checked([&] { tc.validate(); });
    auto config = o.net;
    config.seed = o.seed;
    checked([&] { config.validate(); });

    require_file(o.pgn, "PGN file");
    std::ifstream in(o.pgn);
    const auto parsed = data::parse_pgn(in);
    for (const auto& r : parsed.rejected) err << "warning: game " << r.index + 1 << " rejected: " << r.reason << "\n";
    const auto extraction = data::extract_engine_tuples(parsed.games, o.min_rating);
    out << "games " << parsed.games.size() << ", accepted " << extraction.accepted_games << " (below rating "
        << extraction.below_rating << ", unrated " << extraction.missing_rating << ", unfinished "
        << extraction.unfinished << "), tuples " << extraction.tuples.size() << "\n";
    if (extraction.tuples.empty()) throw DataFailure("no training tuples in " + o.pgn);

    const auto net = o.init.empty() ? std::make_shared<engine::EngineNet>(config) : load_engine(o.init);
    std::vector<double> losses;
    if (o.iterations > 0) {
        engine::IterationConfig ic;
        ic.iterations = o.iterations;
        ic.train = tc;
        ic.self_play.seed = o.seed;
        ic.gate_games = o.gate_games;
        ic.gate_threshold = o.threshold;
        const auto report = engine::train_with_self_play(*net, extraction.tuples, ic);
        for (std::size_t i = 0; i < report.training.size(); ++i) {
            const auto& t = report.training[i];
            losses.insert(losses.end(), t.losses.begin(), t.losses.end());
            if (t.aborted) throw NumericFailure("training aborted: " + *t.aborted);
            if (i < report.gates.size()) {
                const auto& g = report.gates[i];
                out << "iteration " << i + 1 << ": loss " << smoothed(t.losses) << ", gate " << fixed4(g.rate())
                    << (g.accepted() ? " accepted" : " rejected") << "\n";
            }
        }
    } else {
        const auto report = engine::train_supervised(*net, extraction.tuples, tc);
        losses = report.losses;
        if (report.aborted) throw NumericFailure("training aborted: " + *report.aborted);
    }
    if (!o.loss_curve.empty()) engine::write_loss_curve(o.loss_curve, losses);
    net->save(o.out);
    out << "loss " << smoothed(losses) << "\n";
    out << "saved " << o.out << " (" << nn::checkpoint_hash(net->to_checkpoint()) << ")\n";
}

struct SelfPlayOptions {
    std::string ckpt, out;
    int games = 1;
    engine::SelfPlayConfig config{};
};

void engine_selfplay(const SelfPlayOptions& o, std::ostream& out) {
    if (!(o.config.temperature > 0)) throw UsageError("temperature must be positive");
    std::string hash;
    const auto net = load_engine(o.ckpt, &hash);
    const auto games = engine::self_play(engine::Engine(net), o.games, o.config);
    std::ofstream file(o.out);
    file << engine::to_pgn(games, hash, o.config.seed);
    if (!file) throw DataFailure("cannot write " + o.out);
    int white = 0, draws = 0, black = 0;
    for (const auto& g : games) {
        white += g.white_score == 1.0;
        draws += g.white_score == 0.5;
        black += g.white_score == 0.0;
    }
    out << "games " << games.size() << ": white " << white << ", draws " << draws << ", black " << black << "\n";
    out << "wrote " << o.out << "\n";
}

struct GateOptions {
    std::string candidate, incumbent;
    int games = 20;
    double threshold = 0.55;
    int max_plies = 300;
};

void engine_gate(const GateOptions& o, std::ostream& out) {
    const auto candidate = load_engine(o.candidate);
    const auto incumbent = load_engine(o.incumbent);
    const auto r = engine::gate(engine::Engine(candidate), engine::Engine(incumbent), o.games, o.threshold, o.max_plies);
    out << "candidate: " << r.wins << " wins, " << r.draws << " draws, " << r.losses << " losses\n";
    out << "score " << r.candidate_score() << "/" << r.games << " = " << fixed4(r.rate()) << " (threshold "
        << o.threshold << "): " << (r.accepted() ? "accepted" : "rejected") << "\n";
}

// ---- data ---------------------------------------------------------------

struct PrepareOptions {
    std::string input, out;
    std::uint64_t seed = 1;
    std::size_t min_frequency = 2;
    std::size_t max_vocab = 20000;
};

void data_prepare(const PrepareOptions& o, std::ostream& out, std::ostream& err) {
    require_file(o.input, "dataset");
    const auto load = data::load_commentary_dataset(fs::path(o.input));
    warn_rejections(err, o.input, load.rejected);
    if (load.records.empty()) throw DataFailure("no usable records in " + o.input);
    const auto split = data::split_by_game(load.records, o.seed);
    std::vector<std::vector<std::string>> corpus;
    for (const auto& r : split.train) corpus.push_back(r.tokens);
    const auto vocab = data::Vocabulary::build(corpus, o.min_frequency, o.max_vocab);
    data::write_prepared_dataset(o.out, split, vocab);
    out << "records " << load.records.size() << " (general skipped " << load.skipped_general << ", rejected "
        << load.rejected.size() << ")\n";
    out << "games " << split.manifest.size() << ": train " << split.train.size() << ", valid " << split.valid.size()
        << ", test " << split.test.size() << " samples\n";
    out << "vocabulary " << vocab.size() << "\n";
}

// ---- commentary ---------------------------------------------------------

struct CommentTrainOptions {
    std::string data, engine, mode = "mult", category = "all", out;
    long steps = 2000;
    std::size_t batch = 8;
    double lr = 1e-3;
    std::uint64_t seed = 11;
    int horizon = 4;
    std::size_t decoder_hidden = 256, word_width = 128, token_width = 32, encoder_hidden = 64;
    bool freeze_engine = false;
    double engine_lr_scale = 0.1;
    double engine_loss_weight = 0.0;
    long validation_interval = 0;
};

std::vector<data::CommentaryRecord> load_split(const fs::path& path, std::ostream& err) {
    require_file(path, "split");
    auto load = data::load_commentary_dataset(path);
    warn_rejections(err, path, load.rejected);
    return std::move(load.records);
}

void comment_train(const CommentTrainOptions& o, std::ostream& out, std::ostream& err) {
    const auto mode = commentary::parse_mode(o.mode);
    if (!mode) throw UsageError("unknown mode '" + o.mode + "'");
    const auto categories = parse_categories(o.category);
    if (o.horizon < 1 || o.horizon > 16) throw UsageError("horizon must be in 1..16");
    commentary::CommentaryTrainConfig tc;
    tc.steps = o.steps;
    tc.batch_size = o.batch;
    tc.seed = o.seed;
    tc.optimizer.learning_rate = o.lr;
    tc.freeze_engine = o.freeze_engine;
    tc.engine_learning_rate_scale = o.engine_lr_scale;
    tc.engine_loss_weight = o.engine_loss_weight;
    tc.validation_interval = o.validation_interval;
    checked([&] { tc.validate(); });

    const fs::path dir(o.data);
    require_file(dir / "vocab.txt", "vocabulary");
    const auto vocab = data::Vocabulary::load(dir / "vocab.txt");
    const auto train_records = load_split(dir / "train.tsv", err);
    const auto valid_records = load_split(dir / "valid.tsv", err);
    std::string engine_hash;
    const auto pretrained = load_engine(o.engine, &engine_hash);

    commentary::ModelConfig mc;
    mc.engine = pretrained->config();
    mc.move_encoder.token_width = o.token_width;
    mc.move_encoder.hidden = o.encoder_hidden;
    mc.decoder_hidden = o.decoder_hidden;
    mc.word_width = o.word_width;
    mc.vocab_size = vocab.size();
    mc.seed = o.seed;
    checked([&] { mc.validate(); });
    commentary::CommentaryModel model(mc, *mode, categories, pretrained.get());

    auto train = commentary::prepare_samples(model, train_records, vocab, o.horizon);
    auto valid = commentary::prepare_samples(model, valid_records, vocab, o.horizon);
    warn_some(err, train.warnings);
    warn_some(err, valid.warnings);
    const auto report = commentary::train_commentary(model, train.samples, valid.samples, tc);
    warn_some(err, report.warnings);
    if (report.aborted) throw NumericFailure("training aborted: " + *report.aborted);

    nlohmann::json summary = nlohmann::json::object();
    bool trained = false;
    for (const auto& [c, r] : report.categories) {
        const std::string name(commentary::to_string(c));
        trained |= !r.skipped;
        out << name << ": train " << r.train_samples << ", valid " << r.valid_samples;
        if (r.skipped) {
            out << ", skipped\n";
            continue;
        }
        out << ", loss " << smoothed(r.train_losses);
        if (r.best_valid) out << ", best valid " << fixed4(*r.best_valid) << " at step " << r.best_step;
        out << "\n";
        summary[name] = {{"train_samples", r.train_samples}, {"valid_samples", r.valid_samples},
                         {"best_step", r.best_step}};
        if (r.best_valid) summary[name]["best_valid"] = *r.best_valid;
    }
    if (!trained) throw DataFailure("no training samples for the requested categories");

    const nlohmann::json extra{{"training",
                                {{"steps", o.steps},
                                 {"batch_size", o.batch},
                                 {"learning_rate", o.lr},
                                 {"seed", o.seed},
                                 {"horizon", o.horizon},
                                 {"freeze_engine", o.freeze_engine},
                                 {"engine_learning_rate_scale", o.engine_lr_scale},
                                 {"engine_loss_weight", o.engine_loss_weight},
                                 {"engine_checkpoint", engine_hash}}},
                               {"report", summary}};
    const auto id = commentary::save_bundle(o.out, model, vocab, extra);
    for (const auto& [c, r] : report.categories) {
        if (!r.train_losses.empty()) {
            engine::write_loss_curve(fs::path(o.out) / ("loss_" + std::string(commentary::to_string(c)) + ".csv"),
                                     r.train_losses);
        }
    }
    out << "bundle " << o.out << " model_id " << id << "\n";
}

struct GenerateOptions {
    std::string bundle, fen, move, category = "all", input, out_prefix;
    std::size_t beam = 4;
    std::size_t max_tokens = 50;
    int horizon = 4;
};

void comment_generate(const GenerateOptions& o, std::ostream& out, std::ostream& err) {
    const bool batch = !o.input.empty();
    if (batch == (!o.fen.empty() || !o.move.empty())) throw UsageError("give either --input or --fen and --move");
    if (batch && o.out_prefix.empty()) throw UsageError("--input needs --out-prefix");
    if (!batch && (o.fen.empty() || o.move.empty())) throw UsageError("--fen and --move go together");
    if (o.horizon < 1 || o.horizon > 16) throw UsageError("horizon must be in 1..16");
    const auto categories = parse_categories(o.category);
    const auto generation = generation_config(o.beam, o.max_tokens);
    const auto bundle = commentary::load_bundle(o.bundle);
    for (const auto c : categories) {
        if (!bundle.model->has(c)) {
            throw DataFailure("bundle has no model for " + std::string(commentary::to_string(c)));
        }
    }

    if (!batch) {
        const auto board = chess::Board::from_fen(o.fen);
        const auto move = chess::parse_move_text(board, o.move);
        const auto result = commentary::comment(bundle, {board, move, categories, o.horizon, generation});
        const auto rows = commentary::comment_tsv_rows(result);
        for (const auto& c : result.comments) {
            if (c.error) err << "warning: " << commentary::to_string(c.category) << ": " << c.error->second << "\n";
        }
        if (rows.empty()) throw DataFailure("no comment could be generated");
        out << commentary::comment_tsv_header() << "\n";
        for (const auto& r : rows) out << r << "\n";
        return;
    }

    const auto records = load_split(o.input, err);
    std::ofstream hyps(o.out_prefix + ".hyp"), refs(o.out_prefix + ".ref"), cats(o.out_prefix + ".cat");
    std::size_t written = 0, skipped = 0;
    for (const auto& r : records) {
        if (std::find(categories.begin(), categories.end(), r.category) == categories.end()) continue;
        const auto result = commentary::comment(bundle, {r.board, r.move, {r.category}, o.horizon, generation});
        const auto& c = result.comments.front();
        if (c.error) {
            ++skipped;
            continue;
        }
        hyps << c.text << "\n";
        refs << commentary::join_tokens(r.tokens) << "\n";
        cats << commentary::to_string(r.category) << "\n";
        ++written;
    }
    if (!hyps || !refs || !cats) throw DataFailure("cannot write " + o.out_prefix + ".*");
    out << "generated " << written << " comments (" << skipped << " skipped) to " << o.out_prefix << ".{hyp,ref,cat}\n";
}

// ---- eval and serve -----------------------------------------------------

struct EvalOptions {
    std::string hyps, refs, metric, by_category;
    bool table = false;
};

double metric_value(const std::string& metric, const std::vector<eval::EvalPair>& pairs) {
    if (metric == "bleu2") return eval::bleu_corpus(pairs, 2);
    if (metric == "bleu4") return eval::bleu_corpus(pairs, 4);
    return eval::meteor_s(pairs);
}

void run_eval(const EvalOptions& o, std::ostream& out) {
    const auto hyps = read_lines(o.hyps);
    const auto refs = read_lines(o.refs);
    if (hyps.size() != refs.size()) {
        throw DataFailure("hypotheses and references differ in length (" + std::to_string(hyps.size()) + " vs " +
                          std::to_string(refs.size()) + ")");
    }
    if (hyps.empty()) throw DataFailure("no sentences to score");
    std::vector<std::string> cats(hyps.size(), "all");
    if (!o.by_category.empty()) {
        cats = read_lines(o.by_category);
        if (cats.size() != hyps.size()) throw DataFailure("category file length differs from the hypotheses");
    }
    std::vector<eval::EvalPair> pairs;
    for (std::size_t i = 0; i < hyps.size(); ++i) pairs.push_back({split_words(hyps[i]), split_words(refs[i]), cats[i]});

    if (o.table) {
        out << eval::report(pairs).table();
        return;
    }
    if (o.by_category.empty()) {
        out << fixed4(metric_value(o.metric, pairs)) << "\n";
        return;
    }
    std::map<std::string, std::vector<eval::EvalPair>> grouped;
    for (const auto& p : pairs) grouped[p.category].push_back(p);
    for (const auto& [c, group] : grouped) {
        out << c << "\t" << group.size() << "\t" << fixed4(metric_value(o.metric, group)) << "\n";
    }
    out << "overall\t" << pairs.size() << "\t" << fixed4(metric_value(o.metric, pairs)) << "\n";
}

struct ServeOptions {
    std::string bundle, host = "127.0.0.1";
    int port = 8080;
    std::size_t beam = 1;
    std::size_t max_tokens = 50;
    int horizon = 4;
};

void serve(const ServeOptions& o, std::ostream& out) {
    if (o.horizon < 1 || o.horizon > 16) throw UsageError("horizon must be in 1..16");
    service::ServiceOptions options;
    options.generation = generation_config(o.beam, o.max_tokens);
    options.default_horizon = o.horizon;
    auto bundle = std::make_shared<const commentary::Bundle>(commentary::load_bundle(o.bundle));
    const auto svc = std::make_shared<const service::CommentService>(bundle, options);
    httplib::Server server;
    install_routes(server, svc);
    int port = o.port;
    if (port == 0) {
        port = server.bind_to_any_port(o.host);
        if (port < 0) throw DataFailure("cannot listen on " + o.host);
    } else if (!server.bind_to_port(o.host, port)) {
        throw DataFailure("cannot listen on " + o.host + ":" + std::to_string(port));
    }
    out << "serving model " << svc->model_id() << " on http://" << o.host << ":" << port << std::endl;
    server.listen_after_bind();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Chess move commentary: engine training, comment generation, evaluation and serving", "scc"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    std::function<void()> action;

    auto* engine_cmd = app.add_subcommand("engine", "Train, play and gate the chess engine");
    engine_cmd->require_subcommand(1);

    EngineTrainOptions et;
    auto* et_cmd = engine_cmd->add_subcommand("train", "Supervised engine training on rated PGN games");
    et_cmd->add_option("--pgn", et.pgn, "PGN file")->required();
    et_cmd->add_option("--min-rating", et.min_rating, "Minimum rating of both players")->capture_default_str();
    et_cmd->add_option("--steps", et.steps, "Optimizer steps")->required()->check(CLI::NonNegativeNumber);
    et_cmd->add_option("--out", et.out, "Output checkpoint")->required();
    et_cmd->add_option("--batch", et.batch, "Batch size")->capture_default_str();
    et_cmd->add_option("--lr", et.lr, "Learning rate")->capture_default_str();
    et_cmd->add_option("--seed", et.seed, "Seed")->capture_default_str();
    et_cmd->add_option("--filters", et.net.filters, "Convolution filters")->capture_default_str();
    et_cmd->add_option("--conv-layers", et.net.conv_layers, "Convolution layers")->capture_default_str();
    et_cmd->add_option("--state-dim", et.net.state_dim, "Board state width")->capture_default_str();
    et_cmd->add_option("--init", et.init, "Start from this checkpoint");
    et_cmd->add_option("--loss-curve", et.loss_curve, "Write step,loss CSV here");
    et_cmd->add_option("--self-play-iterations", et.iterations, "Self-play and gating rounds after each training run")
        ->check(CLI::NonNegativeNumber);
    et_cmd->add_option("--gate-games", et.gate_games, "Games per gate")->check(CLI::PositiveNumber);
    et_cmd->add_option("--threshold", et.threshold, "Gate acceptance threshold")->check(CLI::Range(0.0, 1.0));
    et_cmd->callback([&] { action = [&] { engine_train(et, out, err); }; });

    SelfPlayOptions sp;
    auto* sp_cmd = engine_cmd->add_subcommand("selfplay", "Engine self-play games to PGN");
    sp_cmd->add_option("--ckpt", sp.ckpt, "Engine checkpoint")->required();
    sp_cmd->add_option("--games", sp.games, "Number of games")->required()->check(CLI::PositiveNumber);
    sp_cmd->add_option("--seed", sp.config.seed, "Seed")->required();
    sp_cmd->add_option("--out", sp.out, "Output PGN")->required();
    sp_cmd->add_option("--temperature", sp.config.temperature, "Sampling temperature")->capture_default_str();
    sp_cmd->add_option("--sampled-plies", sp.config.sampled_plies, "Plies sampled before argmax play")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sp_cmd->add_option("--max-plies", sp.config.max_plies, "Draw after this many plies")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sp_cmd->callback([&] { action = [&] { engine_selfplay(sp, out); }; });

    GateOptions gt;
    auto* gt_cmd = engine_cmd->add_subcommand("gate", "Match a candidate against the incumbent");
    gt_cmd->add_option("--candidate", gt.candidate, "Candidate checkpoint")->required();
    gt_cmd->add_option("--incumbent", gt.incumbent, "Incumbent checkpoint")->required();
    gt_cmd->add_option("--games", gt.games, "Number of games")->capture_default_str()->check(CLI::PositiveNumber);
    gt_cmd->add_option("--threshold", gt.threshold, "Acceptance threshold")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    gt_cmd->add_option("--max-plies", gt.max_plies, "Draw after this many plies")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    gt_cmd->callback([&] { action = [&] { engine_gate(gt, out); }; });

    auto* data_cmd = app.add_subcommand("data", "Dataset preparation");
    data_cmd->require_subcommand(1);
    PrepareOptions pr;
    auto* pr_cmd = data_cmd->add_subcommand("prepare", "Split a commentary TSV by game and build the vocabulary");
    pr_cmd->add_option("--input", pr.input, "Commentary TSV")->required();
    pr_cmd->add_option("--out", pr.out, "Output directory")->required();
    pr_cmd->add_option("--seed", pr.seed, "Split seed")->capture_default_str();
    pr_cmd->add_option("--min-frequency", pr.min_frequency, "Minimum token count")->capture_default_str();
    pr_cmd->add_option("--max-vocab", pr.max_vocab, "Vocabulary size cap")->capture_default_str();
    pr_cmd->callback([&] { action = [&] { data_prepare(pr, out, err); }; });

    auto* comment_cmd = app.add_subcommand("comment", "Train and run the commentary models");
    comment_cmd->require_subcommand(1);
    const std::vector<std::string> category_names{"all", "description", "quality", "comparison", "planning", "contexts"};

    CommentTrainOptions ct;
    auto* ct_cmd = comment_cmd->add_subcommand("train", "Train commentary models on a prepared dataset");
    ct_cmd->add_option("--data", ct.data, "Prepared dataset directory")->required();
    ct_cmd->add_option("--engine", ct.engine, "Pretrained engine checkpoint")->required();
    ct_cmd->add_option("--mode", ct.mode, "single or mult")->required()->check(CLI::IsMember({"single", "mult"}));
    ct_cmd->add_option("--category", ct.category, "Category or all")->required()->check(CLI::IsMember(category_names));
    ct_cmd->add_option("--out", ct.out, "Output bundle directory")->required();
    ct_cmd->add_option("--steps", ct.steps, "Steps (per category in single mode)")->capture_default_str();
    ct_cmd->add_option("--batch", ct.batch, "Batch size")->capture_default_str();
    ct_cmd->add_option("--lr", ct.lr, "Learning rate")->capture_default_str();
    ct_cmd->add_option("--seed", ct.seed, "Seed")->capture_default_str();
    ct_cmd->add_option("--horizon", ct.horizon, "Planning continuation length")->capture_default_str();
    ct_cmd->add_option("--decoder-hidden", ct.decoder_hidden, "Decoder LSTM width")->capture_default_str();
    ct_cmd->add_option("--word-width", ct.word_width, "Word embedding width")->capture_default_str();
    ct_cmd->add_option("--token-width", ct.token_width, "Move token embedding width")->capture_default_str();
    ct_cmd->add_option("--encoder-hidden", ct.encoder_hidden, "Move encoder LSTM width")->capture_default_str();
    ct_cmd->add_flag("--freeze-engine", ct.freeze_engine, "Keep engine weights fixed");
    ct_cmd->add_option("--engine-lr-scale", ct.engine_lr_scale, "Engine learning rate factor")->capture_default_str();
    ct_cmd->add_option("--engine-loss-weight", ct.engine_loss_weight, "Weight of the engine policy loss")
        ->capture_default_str();
    ct_cmd->add_option("--validation-interval", ct.validation_interval, "Steps between validations (0: per epoch)")
        ->capture_default_str();
    ct_cmd->callback([&] { action = [&] { comment_train(ct, out, err); }; });

    GenerateOptions gn;
    auto* gn_cmd = comment_cmd->add_subcommand("generate", "Comment on one move, or on every row of a TSV");
    gn_cmd->add_option("--bundle", gn.bundle, "Bundle directory")->required();
    gn_cmd->add_option("--fen", gn.fen, "Position before the move");
    gn_cmd->add_option("--move", gn.move, "Move in UCI (SAN accepted)");
    gn_cmd->add_option("--category", gn.category, "Category or all")->capture_default_str()->check(CLI::IsMember(category_names));
    gn_cmd->add_option("--beam", gn.beam, "Beam width (1: greedy)")->capture_default_str()->check(CLI::Range(1, 64));
    gn_cmd->add_option("--horizon", gn.horizon, "Planning continuation length")->capture_default_str();
    gn_cmd->add_option("--max-tokens", gn.max_tokens, "Longest comment")->capture_default_str()->check(CLI::PositiveNumber);
    gn_cmd->add_option("--input", gn.input, "Commentary TSV to generate for");
    gn_cmd->add_option("--out-prefix", gn.out_prefix, "Writes <prefix>.hyp, .ref and .cat");
    gn_cmd->callback([&] { action = [&] { comment_generate(gn, out, err); }; });

    EvalOptions ev;
    auto* ev_cmd = app.add_subcommand("eval", "Score hypotheses against references (one sentence per line)");
    ev_cmd->add_option("--hyps", ev.hyps, "Hypotheses")->required();
    ev_cmd->add_option("--refs", ev.refs, "References")->required();
    ev_cmd->add_option("--metric", ev.metric, "bleu2, bleu4 or meteor_s")
        ->required()
        ->check(CLI::IsMember({"bleu2", "bleu4", "meteor_s"}));
    ev_cmd->add_option("--by-category", ev.by_category, "Category per line");
    ev_cmd->add_flag("--table", ev.table, "Print every metric per category");
    ev_cmd->callback([&] { action = [&] { run_eval(ev, out); }; });

    ServeOptions sv;
    auto* sv_cmd = app.add_subcommand("serve", "JSON-over-HTTP commentary service");
    sv_cmd->add_option("--bundle", sv.bundle, "Bundle directory")->required();
    sv_cmd->add_option("--port", sv.port, "Port (0: any free port)")->capture_default_str()->check(CLI::Range(0, 65535));
    sv_cmd->add_option("--host", sv.host, "Listen address")->capture_default_str();
    sv_cmd->add_option("--beam", sv.beam, "Beam width (1: greedy)")->capture_default_str()->check(CLI::Range(1, 64));
    sv_cmd->add_option("--horizon", sv.horizon, "Default planning continuation length")->capture_default_str();
    sv_cmd->add_option("--max-tokens", sv.max_tokens, "Longest comment")->capture_default_str()->check(CLI::PositiveNumber);
    sv_cmd->callback([&] { action = [&] { serve(sv, out); }; });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        action();
        return kOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\nRun with --help for more information.\n";
        return kUsage;
    } catch (const NumericFailure& e) {
        err << "error: " << e.what() << "\n";
        return kNumericError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    }
}

}  // namespace scc::cli
