#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace scc::eval {

using Sentence = std::vector<std::string>;

/// A generated comment and its single reference.
struct EvalPair {
    Sentence hypothesis;  // may be empty
    Sentence reference;
    std::string category;
};

class EvalError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Corpus BLEU with clipped n-gram counts, uniform weights over orders
/// 1..max_n, brevity penalty exp(1 - r/c) when c < r and no smoothing: an
/// order with zero matches gives 0. Throws EvalError for an empty corpus or
/// max_n outside 1..4.
double bleu_corpus(std::span<const EvalPair> pairs, int max_n);

/// Light suffix stripping (plural -s/-es/-ies, -ed, -ing) for stem matching.
std::string stem(const std::string& word);

/// One unigram alignment between hypothesis and reference.
struct Alignment {
    std::size_t exact = 0;
    std::size_t matches = 0;  // exact + stem
    std::size_t chunks = 0;
};

/// Alignment with the most exact matches, then the most matches overall,
/// then the fewest chunks. Search is exhaustive with pruning (bounded by a
/// node budget that only very long, highly repetitive sentences reach).
Alignment align(const Sentence& hypothesis, const Sentence& reference);

/// F = 10PR / (R + 9P) times (1 - 0.5 (chunks / matches)^3); 0 without matches.
double meteor_score(const Alignment& alignment, std::size_t hypothesis_length, std::size_t reference_length);
double meteor_sentence(const Sentence& hypothesis, const Sentence& reference);
/// Mean sentence score (exact + stem matching, no synonyms).
double meteor_s(std::span<const EvalPair> pairs);

struct Scores {
    double bleu4 = 0;
    double bleu2 = 0;
    double meteor_s = 0;
    std::size_t pairs = 0;
};

Scores score_all(std::span<const EvalPair> pairs);

/// Scores per category and pooled over every pair.
struct MetricReport {
    std::map<std::string, Scores> categories;
    Scores overall;

    /// Aligned table with scores in percent.
    std::string table() const;
    nlohmann::json to_json() const;
};

MetricReport report(std::span<const EvalPair> pairs);

}  // namespace scc::eval
