#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scc/commentary/model.hpp"
#include "scc/data/commentary_data.hpp"
#include "scc/nn/optimizer.hpp"

namespace scc::commentary {

/// A training example with its engine continuations resolved.
struct Sample {
    Category category;
    Continuations continuations;
    std::vector<std::size_t> tokens;  // ends with EOS
};

struct PreparedSamples {
    std::vector<Sample> samples;
    std::vector<std::string> warnings;  // one per dropped record
};

/// Encodes each record's text and plans its continuations with the model's
/// current engine for that category. Records of categories the model lacks
/// and planning records whose move ends the game are dropped with a warning.
PreparedSamples prepare_samples(const CommentaryModel& model, const std::vector<data::CommentaryRecord>& records,
                                const data::Vocabulary& vocab, int horizon = 4);

struct CommentaryTrainConfig {
    long steps = 2000;  // per category in single mode, in total in mult mode
    std::size_t batch_size = 8;
    std::uint64_t seed = 11;
    nn::OptimizerConfig optimizer{};
    bool freeze_engine = false;
    /// Engine parameters use learning_rate * engine_learning_rate_scale.
    double engine_learning_rate_scale = 0.1;
    /// Weight of the expert-move policy loss -log p(m0|b0) added to Loss_Gen.
    double engine_loss_weight = 0.0;
    /// Steps between validation passes; 0 means once per epoch.
    long validation_interval = 0;

    void validate() const;
};

struct CategoryReport {
    std::size_t train_samples = 0;
    std::size_t valid_samples = 0;
    std::vector<double> train_losses;                    // one per step on this category
    std::vector<std::pair<long, double>> valid_losses;  // (step, mean loss)
    std::optional<double> best_valid;
    long best_step = 0;
    bool skipped = false;
};

struct CommentaryTrainReport {
    std::map<Category, CategoryReport> categories;
    std::vector<std::string> warnings;
    std::optional<std::string> aborted;
};

/// Trains `model` in place. single mode trains each category on its own with
/// its own optimizer; mult mode cycles through the categories one batch at a
/// time with one optimizer over all parameters. The parameters with the lowest
/// validation loss are restored at the end (per category, or summed over
/// categories in mult mode). Categories without training samples are skipped
/// with a warning.
CommentaryTrainReport train_commentary(CommentaryModel& model, const std::vector<Sample>& train,
                                       const std::vector<Sample>& valid, const CommentaryTrainConfig& config);

/// Mean teacher-forced loss over `samples` of one category.
double mean_loss(const CommentaryModel& model, Category category, const std::vector<const Sample*>& samples);

/// Fraction of target tokens (EOS included) predicted by the argmax of the
/// teacher-forced logits.
double token_accuracy(const CommentaryModel& model, const std::vector<Sample>& samples);

}  // namespace scc::commentary
