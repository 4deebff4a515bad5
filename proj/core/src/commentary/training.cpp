#include "scc/commentary/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace scc::commentary {

PreparedSamples prepare_samples(const CommentaryModel& model, const std::vector<data::CommentaryRecord>& records,
                                const data::Vocabulary& vocab, int horizon) {
    PreparedSamples out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const std::string where = r.game_id + " record " + std::to_string(i + 1);
        if (!model.has(r.category)) {
            out.warnings.push_back(where + ": model has no " + std::string(to_string(r.category)) + " decoder");
            continue;
        }
        try {
            out.samples.push_back({r.category,
                                   plan_continuations(model.engine(r.category), r.board, r.move, r.category, horizon),
                                   vocab.encode(r.tokens)});
        } catch (const CommentaryError& e) {
            out.warnings.push_back(where + ": " + e.what());
        }
    }
    return out;
}

void CommentaryTrainConfig::validate() const {
    if (steps < 0) throw std::invalid_argument("steps must be non-negative");
    if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
    if (engine_loss_weight < 0) throw std::invalid_argument("engine loss weight must be non-negative");
    if (validation_interval < 0) throw std::invalid_argument("validation interval must be non-negative");
    if (!(engine_learning_rate_scale > 0)) throw std::invalid_argument("engine learning rate scale must be positive");
    optimizer.validate();
}

namespace {

nn::Var sample_loss(nn::Graph& g, const CommentaryModel& model, const Sample& s, double engine_weight) {
    auto loss = generation_loss(g, model, s.category, s.continuations, s.tokens).loss;
    if (engine_weight > 0) {
        const engine::TrainingTuple tuple{s.continuations.before, s.continuations.move, 0.5};
        const auto policy = engine::engine_loss(g, *model.shared(s.category).engine, {&tuple, 1}).policy;
        loss = g.add(loss, g.scale(policy, engine_weight));
    }
    return loss;
}

// Epoch-wise shuffled minibatches over one category's samples.
class Batcher {
public:
    Batcher(std::vector<const Sample*> samples, std::size_t batch_size)
        : samples_(std::move(samples)), batch_size_(std::min(batch_size, samples_.size())) {
        order_.resize(samples_.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        cursor_ = order_.size();
    }

    std::vector<const Sample*> next(nn::Rng& rng) {
        std::vector<const Sample*> batch;
        while (batch.size() < batch_size_) {
            if (cursor_ == order_.size()) {
                for (std::size_t i = order_.size(); i > 1; --i) std::swap(order_[i - 1], order_[rng() % i]);
                cursor_ = 0;
            }
            batch.push_back(samples_[order_[cursor_++]]);
        }
        return batch;
    }

    long steps_per_epoch() const {
        return static_cast<long>((samples_.size() + batch_size_ - 1) / batch_size_);
    }

private:
    std::vector<const Sample*> samples_;
    std::size_t batch_size_;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
};

std::vector<nn::Tensor> snapshot(const nn::ParameterList& params) {
    std::vector<nn::Tensor> out;
    for (const auto& p : params.items()) out.push_back(p->value);
    return out;
}

void restore(const nn::ParameterList& params, const std::vector<nn::Tensor>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) params.items()[i]->value = values[i];
}

std::map<Category, std::vector<const Sample*>> by_category(const std::vector<Sample>& samples) {
    std::map<Category, std::vector<const Sample*>> out;
    for (const auto& s : samples) out[s.category].push_back(&s);
    return out;
}

// Engine parameters and the rest, each with its own optimizer.
struct Groups {
    Groups(const nn::ParameterList& all, const nn::ParameterList& engine_params, const CommentaryTrainConfig& config)
        : all(all), engine_optimizer(scaled(config)), optimizer(config.optimizer) {
        for (const auto& p : all.items()) (engine_params.find(p->name) == p ? engine : rest).add(p);
    }

    static nn::OptimizerConfig scaled(const CommentaryTrainConfig& config) {
        auto c = config.optimizer;
        c.learning_rate *= config.engine_learning_rate_scale;
        return c;
    }

    void step() {
        engine_optimizer.step(engine.items());
        optimizer.step(rest.items());
    }

    nn::ParameterList all;
    nn::ParameterList engine;
    nn::ParameterList rest;
    nn::Optimizer engine_optimizer;
    nn::Optimizer optimizer;
};

// One optimizer update on a batch; returns the batch loss or nullopt after
// recording why training stopped.
std::optional<double> update(const CommentaryModel& model, const std::vector<const Sample*>& batch, Groups& groups,
                             double engine_weight, std::optional<std::string>& aborted, const std::string& where) {
    const auto& params = groups.all;
    nn::Graph g;
    std::vector<nn::Var> losses;
    for (const auto* s : batch) losses.push_back(sample_loss(g, model, *s, engine_weight));
    const auto loss = g.mean(losses);
    const double value = g.scalar_value(loss);
    if (!std::isfinite(value)) {
        aborted = "non-finite loss at " + where;
        params.zero_grad();
        return std::nullopt;
    }
    g.backward(loss);
    try {
        groups.step();
    } catch (const nn::NumericError& e) {
        params.zero_grad();
        aborted = where + ": " + e.what();
        return std::nullopt;
    }
    return value;
}

}  // namespace

double mean_loss(const CommentaryModel& model, Category category, const std::vector<const Sample*>& samples) {
    if (samples.empty()) throw std::invalid_argument("no samples to evaluate");
    double total = 0.0;
    for (const auto* s : samples) {
        nn::Graph g(false);
        total += g.scalar_value(generation_loss(g, model, category, s->continuations, s->tokens).loss);
    }
    return total / static_cast<double>(samples.size());
}

double token_accuracy(const CommentaryModel& model, const std::vector<Sample>& samples) {
    std::size_t correct = 0;
    std::size_t total = 0;
    for (const auto& s : samples) {
        nn::Graph g(false);
        const auto result = generation_loss(g, model, s.category, s.continuations, s.tokens);
        for (std::size_t t = 0; t < s.tokens.size(); ++t) {
            const auto& logits = g.value(result.logits[t]).values();
            const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
            correct += static_cast<std::size_t>(best) == s.tokens[t];
            ++total;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

CommentaryTrainReport train_commentary(CommentaryModel& model, const std::vector<Sample>& train,
                                       const std::vector<Sample>& valid, const CommentaryTrainConfig& config) {
    config.validate();
    CommentaryTrainReport report;
    const auto train_sets = by_category(train);
    const auto valid_sets = by_category(valid);

    std::vector<Category> active;
    for (const auto c : model.categories()) {
        auto& cat = report.categories[c];
        const auto t = train_sets.find(c);
        const auto v = valid_sets.find(c);
        cat.train_samples = t == train_sets.end() ? 0 : t->second.size();
        cat.valid_samples = v == valid_sets.end() ? 0 : v->second.size();
        if (cat.train_samples == 0) {
            cat.skipped = true;
            report.warnings.push_back("no training samples for " + std::string(to_string(c)) + "; skipped");
        } else {
            active.push_back(c);
        }
    }
    if (active.empty()) return report;

    const auto engine_params = model.engine_parameters();
    if (config.freeze_engine) engine_params.set_trainable(false);
    nn::Rng rng(config.seed);

    auto validation = [&](const std::vector<Category>& cats) -> std::optional<double> {
        double total = 0.0;
        bool any = false;
        for (const auto c : cats) {
            const auto v = valid_sets.find(c);
            if (v == valid_sets.end()) continue;
            const double loss = mean_loss(model, c, v->second);
            report.categories[c].valid_losses.emplace_back(0, loss);
            total += loss;
            any = true;
        }
        if (!any) return std::nullopt;
        return total;
    };
    auto stamp = [&](const std::vector<Category>& cats, long step) {
        for (const auto c : cats) {
            auto& losses = report.categories[c].valid_losses;
            if (!losses.empty() && losses.back().first == 0) losses.back().first = step;
        }
    };

    if (model.mode() == Mode::single) {
        for (const auto c : active) {
            auto& cat = report.categories[c];
            const auto params = model.parameters(c);
            params.zero_grad();
            Groups groups(params, engine_params, config);
            Batcher batcher(train_sets.at(c), config.batch_size);
            const long interval = config.validation_interval > 0 ? config.validation_interval : batcher.steps_per_epoch();
            std::optional<std::vector<nn::Tensor>> best;
            for (long step = 1; step <= config.steps; ++step) {
                const auto loss = update(model, batcher.next(rng), groups, config.engine_loss_weight,
                                         report.aborted, std::string(to_string(c)) + " step " + std::to_string(step));
                if (!loss) break;
                cat.train_losses.push_back(*loss);
                if (step % interval == 0 || step == config.steps) {
                    const auto v = validation({c});
                    stamp({c}, step);
                    if (v && (!cat.best_valid || *v < *cat.best_valid)) {
                        cat.best_valid = *v;
                        cat.best_step = step;
                        best = snapshot(params);
                    }
                }
            }
            if (best) restore(params, *best);
            if (report.aborted) break;
        }
    } else {
        const auto params = model.parameters();
        params.zero_grad();
        Groups groups(params, engine_params, config);
        std::map<Category, Batcher> batchers;
        long epoch_steps = 0;
        for (const auto c : active) {
            const auto& b = batchers.emplace(c, Batcher(train_sets.at(c), config.batch_size)).first->second;
            epoch_steps += b.steps_per_epoch();
        }
        const long interval = config.validation_interval > 0 ? config.validation_interval : epoch_steps;
        std::optional<double> best_valid;
        std::optional<std::vector<nn::Tensor>> best;
        for (long step = 1; step <= config.steps; ++step) {
            const auto c = active[static_cast<std::size_t>(step - 1) % active.size()];
            const auto loss = update(model, batchers.at(c).next(rng), groups, config.engine_loss_weight,
                                     report.aborted, "step " + std::to_string(step));
            if (!loss) break;
            report.categories[c].train_losses.push_back(*loss);
            if (step % interval == 0 || step == config.steps) {
                const auto v = validation(active);
                stamp(active, step);
                if (v && (!best_valid || *v < *best_valid)) {
                    best_valid = v;
                    best = snapshot(params);
                    for (const auto cat : active) {
                        auto& r = report.categories[cat];
                        if (!r.valid_losses.empty()) r.best_valid = r.valid_losses.back().second;
                        r.best_step = step;
                    }
                }
            }
        }
        if (best) restore(params, *best);
    }

    if (config.freeze_engine) engine_params.set_trainable(true);
    return report;
}

}  // namespace scc::commentary
