#include "scc/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace scc::eval {

namespace {

std::unordered_map<std::string, std::size_t> ngram_counts(const Sentence& s, int n) {
    std::unordered_map<std::string, std::size_t> out;
    const auto len = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + len <= s.size(); ++i) {
        std::string key;
        for (std::size_t k = 0; k < len; ++k) {
            key += s[i + k];
            key += '\x1f';
        }
        ++out[key];
    }
    return out;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool has_vowel(const std::string& s) { return std::any_of(s.begin(), s.end(), is_vowel); }

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct Search {
    const Sentence& hyp;
    const Sentence& ref;
    std::vector<std::string> hyp_stems, ref_stems;
    std::vector<bool> used;
    std::vector<long> link;  // ref index per hyp position, -1 unaligned
    std::vector<std::size_t> exact_left, any_left;  // candidates from position i on
    Alignment best;
    bool found = false;
    std::size_t nodes = 0;
    // Visiting stops after this many nodes on pathological inputs (long
    // sentences full of repeated words); the best alignment so far is kept.
    static constexpr std::size_t kNodeBudget = 2'000'000;

    Search(const Sentence& h, const Sentence& r) : hyp(h), ref(r), used(r.size(), false), link(h.size(), -1) {
        for (const auto& w : h) hyp_stems.push_back(stem(w));
        for (const auto& w : r) ref_stems.push_back(stem(w));
        exact_left.assign(h.size() + 1, 0);
        any_left.assign(h.size() + 1, 0);
        for (std::size_t i = h.size(); i-- > 0;) {
            bool exact = false, any = false;
            for (std::size_t j = 0; j < r.size(); ++j) {
                exact |= h[i] == r[j];
                any |= h[i] == r[j] || hyp_stems[i] == ref_stems[j];
            }
            exact_left[i] = exact_left[i + 1] + exact;
            any_left[i] = any_left[i + 1] + any;
        }
    }

    static bool better(const Alignment& a, const Alignment& b) {
        if (a.exact != b.exact) return a.exact > b.exact;
        if (a.matches != b.matches) return a.matches > b.matches;
        return a.chunks < b.chunks;
    }

    void run(std::size_t i, Alignment current) {
        const std::size_t free_refs = ref.size() - current.matches;
        const Alignment bound{current.exact + std::min(exact_left[i], free_refs),
                              current.matches + std::min(any_left[i], free_refs), current.chunks};
        if (found && (!better(bound, best) || ++nodes > kNodeBudget)) return;
        if (i == hyp.size()) {
            best = current;
            found = true;
            return;
        }
        // exact links first, then stem links, then leaving the word unaligned
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < ref.size(); ++j) {
                if (used[j]) continue;
                const bool exact = hyp[i] == ref[j];
                if (pass == 0 ? !exact : exact || hyp_stems[i] != ref_stems[j]) continue;
                const bool continues = i > 0 && link[i - 1] >= 0 && static_cast<std::size_t>(link[i - 1]) + 1 == j;
                Alignment next{current.exact + exact, current.matches + 1, current.chunks + !continues};
                used[j] = true;
                link[i] = static_cast<long>(j);
                run(i + 1, next);
                used[j] = false;
                link[i] = -1;
            }
        }
        run(i + 1, current);
    }
};

}  // namespace

double bleu_corpus(std::span<const EvalPair> pairs, int max_n) {
    if (pairs.empty()) throw EvalError("BLEU needs at least one pair");
    if (max_n < 1 || max_n > 4) throw EvalError("BLEU order must be in 1..4");
    std::vector<std::size_t> matches(static_cast<std::size_t>(max_n), 0);
    std::vector<std::size_t> totals(static_cast<std::size_t>(max_n), 0);
    std::size_t c = 0, r = 0;
    for (const auto& p : pairs) {
        c += p.hypothesis.size();
        r += p.reference.size();
        for (int n = 1; n <= max_n; ++n) {
            const auto h = ngram_counts(p.hypothesis, n);
            const auto ref = ngram_counts(p.reference, n);
            for (const auto& [gram, count] : h) {
                totals[n - 1] += count;
                const auto it = ref.find(gram);
                if (it != ref.end()) matches[n - 1] += std::min(count, it->second);
            }
        }
    }
    if (c == 0) return 0.0;
    double log_precision = 0.0;
    for (int n = 0; n < max_n; ++n) {
        if (matches[n] == 0) return 0.0;
        log_precision += std::log(static_cast<double>(matches[n]) / static_cast<double>(totals[n])) / max_n;
    }
    const double brevity = c < r ? 1.0 - static_cast<double>(r) / static_cast<double>(c) : 0.0;
    return std::exp(brevity + log_precision);
}

std::string stem(const std::string& word) {
    std::string w = word;
    if (ends_with(w, "sses")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ies") && w.size() > 4) {
        w.resize(w.size() - 3);
        w += 'y';
    } else if (ends_with(w, "es") && w.size() > 4 && (ends_with(w, "ches") || ends_with(w, "shes") || ends_with(w, "xes"))) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is") && w.size() > 3) {
        w.pop_back();
    }
    for (std::string_view suffix : {"ing", "ed"}) {
        if (ends_with(w, suffix) && w.size() > suffix.size() + 2) {
            const std::string base = w.substr(0, w.size() - suffix.size());
            if (!has_vowel(base)) continue;
            w = base;
            const char last = w.back();
            if (w.size() > 2 && last == w[w.size() - 2] && !is_vowel(last) && last != 'l' && last != 's' && last != 'z') {
                w.pop_back();
            }
            break;
        }
    }
    return w;
}

Alignment align(const Sentence& hypothesis, const Sentence& reference) {
    Search search(hypothesis, reference);
    search.run(0, {});
    return search.best;
}

double meteor_score(const Alignment& a, std::size_t hypothesis_length, std::size_t reference_length) {
    if (a.matches == 0) return 0.0;
    const double m = static_cast<double>(a.matches);
    const double p = m / static_cast<double>(hypothesis_length);
    const double r = m / static_cast<double>(reference_length);
    const double f = 10.0 * p * r / (r + 9.0 * p);
    const double frag = static_cast<double>(a.chunks) / m;
    return f * (1.0 - 0.5 * frag * frag * frag);
}

double meteor_sentence(const Sentence& hypothesis, const Sentence& reference) {
    return meteor_score(align(hypothesis, reference), hypothesis.size(), reference.size());
}

double meteor_s(std::span<const EvalPair> pairs) {
    if (pairs.empty()) throw EvalError("METEOR needs at least one pair");
    double total = 0.0;
    for (const auto& p : pairs) total += meteor_sentence(p.hypothesis, p.reference);
    return total / static_cast<double>(pairs.size());
}

Scores score_all(std::span<const EvalPair> pairs) {
    return {bleu_corpus(pairs, 4), bleu_corpus(pairs, 2), meteor_s(pairs), pairs.size()};
}

MetricReport report(std::span<const EvalPair> pairs) {
    if (pairs.empty()) throw EvalError("nothing to report");
    std::map<std::string, std::vector<EvalPair>> grouped;
    for (const auto& p : pairs) grouped[p.category].push_back(p);
    MetricReport out;
    for (const auto& [category, group] : grouped) out.categories[category] = score_all(group);
    out.overall = score_all(pairs);
    return out;
}

std::string MetricReport::table() const {
    std::size_t width = 8;
    for (const auto& [c, s] : categories) width = std::max(width, c.size());
    std::string out;
    char line[256];
    auto row = [&](const std::string& name, const Scores& s) {
        std::snprintf(line, sizeof line, "%-*s %7zu %8.2f %8.2f %9.2f\n", static_cast<int>(width), name.c_str(),
                      s.pairs, 100 * s.bleu4, 100 * s.bleu2, 100 * s.meteor_s);
        out += line;
    };
    std::snprintf(line, sizeof line, "%-*s %7s %8s %8s %9s\n", static_cast<int>(width), "category", "pairs", "BLEU-4",
                  "BLEU-2", "METEOR-s");
    out += line;
    for (const auto& [c, s] : categories) row(c, s);
    row("overall", overall);
    return out;
}

nlohmann::json MetricReport::to_json() const {
    auto scores = [](const Scores& s) {
        return nlohmann::json{{"pairs", s.pairs}, {"bleu4", s.bleu4}, {"bleu2", s.bleu2}, {"meteor_s", s.meteor_s}};
    };
    nlohmann::json out{{"overall", scores(overall)}, {"categories", nlohmann::json::object()}};
    for (const auto& [c, s] : categories) out["categories"][c] = scores(s);
    return out;
}

}  // namespace scc::eval
