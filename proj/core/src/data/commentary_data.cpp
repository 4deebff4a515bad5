#include "scc/data/commentary_data.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "scc/chess/notation.hpp"

namespace scc::data {

namespace {

bool word_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    return fields;
}

std::string trim(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

constexpr const char* kVocabHeader =
    "# scc vocabulary v1: token id = line index + 4, counting the first line after this header as index 0; "
    "ids 0-3 are <pad> <bos> <eos> <unk>";

}  // namespace

std::vector<std::string> normalize_text(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) out.push_back(std::move(current));
        current.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            flush();
        } else if (word_char(c)) {
            current += static_cast<char>(std::tolower(c));
        } else if ((c == '\'' || c == '-') && !current.empty() && i + 1 < text.size() &&
                   word_char(static_cast<unsigned char>(text[i + 1]))) {
            current += static_cast<char>(c);
        } else {
            flush();
            out.emplace_back(1, static_cast<char>(c));
        }
    }
    flush();
    return out;
}

CommentaryLoad load_commentary_dataset(std::istream& in) {
    CommentaryLoad out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line.front() == '#') continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 5) {
            out.rejected.push_back({number, "expected 5 tab-separated fields, got " + std::to_string(fields.size())});
            continue;
        }
        const auto label = trim(fields[3]);
        const auto category = commentary::parse_category(label);
        if (!category) {
            std::string lower = label;
            std::transform(lower.begin(), lower.end(), lower.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (lower == "general") {
                ++out.skipped_general;
            } else {
                out.rejected.push_back({number, "unknown category '" + label + "'"});
            }
            continue;
        }
        CommentaryRecord record;
        record.game_id = trim(fields[0]);
        record.category = *category;
        if (record.game_id.empty()) {
            out.rejected.push_back({number, "empty game id"});
            continue;
        }
        try {
            record.board = chess::Board::from_fen(trim(fields[1]));
            record.move = chess::parse_uci(record.board, trim(fields[2]));
        } catch (const chess::ChessError& e) {
            out.rejected.push_back({number, e.what()});
            continue;
        }
        record.tokens = normalize_text(fields[4]);
        if (record.tokens.empty()) {
            out.rejected.push_back({number, "empty comment"});
            continue;
        }
        out.records.push_back(std::move(record));
    }
    return out;
}

CommentaryLoad load_commentary_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read " + path.string());
    return load_commentary_dataset(in);
}

Vocabulary::Vocabulary() {
    for (const char* s : {"<pad>", "<bos>", "<eos>", "<unk>"}) add(s);
}

void Vocabulary::add(const std::string& token) {
    if (!ids_.emplace(token, tokens_.size()).second) throw DataError("duplicate vocabulary token '" + token + "'");
    tokens_.push_back(token);
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& corpus, std::size_t min_frequency,
                             std::size_t max_size) {
    std::map<std::string, std::size_t> counts;
    for (const auto& sentence : corpus) {
        for (const auto& t : sentence) ++counts[t];
    }
    std::vector<std::pair<std::string, std::size_t>> ranked;
    Vocabulary vocab;
    for (const auto& [token, count] : counts) {
        if (count >= std::max<std::size_t>(min_frequency, 1) && !vocab.ids_.count(token)) {
            ranked.emplace_back(token, count);
        }
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > max_size) ranked.resize(max_size);
    for (const auto& [token, count] : ranked) vocab.add(token);
    return vocab;
}

std::size_t Vocabulary::id(const std::string& token) const {
    const auto it = ids_.find(token);
    return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(std::size_t id) const {
    if (id >= tokens_.size()) throw std::out_of_range("token id " + std::to_string(id) + " outside vocabulary");
    return tokens_[id];
}

std::vector<std::size_t> Vocabulary::encode(const std::vector<std::string>& tokens) const {
    std::vector<std::size_t> out;
    out.reserve(tokens.size() + 1);
    for (const auto& t : tokens) out.push_back(id(t));
    out.push_back(kEos);
    return out;
}

std::vector<std::string> Vocabulary::decode(const std::vector<std::size_t>& ids) const {
    std::vector<std::string> out;
    for (const auto id : ids) {
        if (id == kEos) break;
        if (id == kPad || id == kBos) continue;
        out.push_back(token(id));
    }
    return out;
}

std::string Vocabulary::serialize() const {
    std::string out = kVocabHeader;
    out += '\n';
    for (std::size_t i = kSpecials; i < tokens_.size(); ++i) {
        out += tokens_[i];
        out += '\n';
    }
    return out;
}

Vocabulary Vocabulary::parse(std::string_view text) {
    Vocabulary vocab;
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line.rfind("# scc vocabulary v1", 0) != 0) {
        throw DataError("vocabulary file is missing its header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) throw DataError("empty line in vocabulary file");
        vocab.add(line);
    }
    return vocab;
}

void Vocabulary::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << serialize();
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

std::string_view to_string(Split s) noexcept {
    switch (s) {
        case Split::train: return "train";
        case Split::valid: return "valid";
        case Split::test: return "test";
    }
    return "?";
}

SplitCounts split_counts(std::size_t n) {
    const std::size_t train = (7 * n + 5) / 10;
    const std::size_t valid = (n + 5) / 10;
    return {train, valid, n - train - valid};
}

DatasetSplit split_by_game(const std::vector<CommentaryRecord>& records, std::uint64_t seed) {
    std::vector<std::string> games;
    std::set<std::string> seen;
    for (const auto& r : records) {
        if (seen.insert(r.game_id).second) games.push_back(r.game_id);
    }
    std::sort(games.begin(), games.end());
    std::mt19937_64 rng(seed);
    for (std::size_t i = games.size(); i > 1; --i) std::swap(games[i - 1], games[rng() % i]);

    const auto counts = split_counts(games.size());
    DatasetSplit out;
    for (std::size_t i = 0; i < games.size(); ++i) {
        out.manifest[games[i]] = i < counts.train ? Split::train
                                 : i < counts.train + counts.valid ? Split::valid
                                                                   : Split::test;
    }
    for (const auto& r : records) {
        switch (out.manifest.at(r.game_id)) {
            case Split::train: out.train.push_back(r); break;
            case Split::valid: out.valid.push_back(r); break;
            case Split::test: out.test.push_back(r); break;
        }
    }
    return out;
}

std::string DatasetSplit::manifest_text() const {
    std::string out;
    for (const auto& [game, split] : manifest) {
        out += game;
        out += '\t';
        out += to_string(split);
        out += '\n';
    }
    return out;
}

std::string format_record(const CommentaryRecord& record) {
    std::string text;
    for (const auto& t : record.tokens) {
        if (!text.empty()) text += ' ';
        text += t;
    }
    return record.game_id + '\t' + record.board.fen() + '\t' + record.move.uci() + '\t' +
           std::string(commentary::to_string(record.category)) + '\t' + text;
}

void write_prepared_dataset(const std::filesystem::path& dir, const DatasetSplit& split, const Vocabulary& vocab) {
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw DataError("cannot write " + (dir / name).string());
        out << content;
    };
    auto rows = [](const std::vector<CommentaryRecord>& records) {
        std::string out;
        for (const auto& r : records) out += format_record(r) + '\n';
        return out;
    };
    write("train.tsv", rows(split.train));
    write("valid.tsv", rows(split.valid));
    write("test.tsv", rows(split.test));
    write("splits.tsv", split.manifest_text());
    write("vocab.txt", vocab.serialize());
}

}  // namespace scc::data
