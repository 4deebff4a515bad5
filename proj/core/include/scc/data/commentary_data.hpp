#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scc/chess/board.hpp"
#include "scc/commentary/category.hpp"

namespace scc::data {

/// Lowercases and splits on whitespace; every punctuation character becomes
/// its own token except apostrophes and hyphens joining two word characters
/// ("don't", "well-known").
std::vector<std::string> normalize_text(std::string_view text);

struct CommentaryRecord {
    std::string game_id;
    chess::Board board;
    chess::Move move;
    commentary::Category category = commentary::Category::description;
    std::vector<std::string> tokens;
};

struct RowRejection {
    std::size_t line = 0;  // 1-based
    std::string reason;
};

struct CommentaryLoad {
    std::vector<CommentaryRecord> records;
    std::size_t skipped_general = 0;
    std::vector<RowRejection> rejected;
};

/// Tab-separated rows: game-id, FEN before the move, UCI move, category, text.
/// Blank lines and lines starting with '#' are ignored.
CommentaryLoad load_commentary_dataset(std::istream& in);
CommentaryLoad load_commentary_dataset(const std::filesystem::path& path);

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Word vocabulary with fixed specials PAD=0, BOS=1, EOS=2, UNK=3.
class Vocabulary {
public:
    static constexpr std::size_t kPad = 0;
    static constexpr std::size_t kBos = 1;
    static constexpr std::size_t kEos = 2;
    static constexpr std::size_t kUnk = 3;
    static constexpr std::size_t kSpecials = 4;

    Vocabulary();

    /// Tokens seen at least `min_frequency` times, most frequent first with ties
    /// in byte order, truncated to `max_size` (specials not counted).
    static Vocabulary build(const std::vector<std::vector<std::string>>& corpus, std::size_t min_frequency = 2,
                            std::size_t max_size = 20000);

    std::size_t size() const noexcept { return tokens_.size(); }
    std::size_t id(const std::string& token) const;
    const std::string& token(std::size_t id) const;
    /// Word ids followed by EOS.
    std::vector<std::size_t> encode(const std::vector<std::string>& tokens) const;
    /// Tokens up to (excluding) the first EOS; PAD and BOS are dropped.
    std::vector<std::string> decode(const std::vector<std::size_t>& ids) const;

    std::string serialize() const;
    static Vocabulary parse(std::string_view text);
    void save(const std::filesystem::path& path) const;
    static Vocabulary load(const std::filesystem::path& path);

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

private:
    void add(const std::string& token);

    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> ids_;
};

enum class Split { train, valid, test };
std::string_view to_string(Split s) noexcept;

struct DatasetSplit {
    std::vector<CommentaryRecord> train;
    std::vector<CommentaryRecord> valid;
    std::vector<CommentaryRecord> test;
    std::map<std::string, Split> manifest;  // game id -> split

    /// "game_id\tsplit" lines in game id order.
    std::string manifest_text() const;
};

/// Shuffles the distinct game ids with `seed` and assigns 70% / 10% / 20% of
/// the games (rounded, remainder to test); samples follow their game and keep
/// input order within each split.
DatasetSplit split_by_game(const std::vector<CommentaryRecord>& records, std::uint64_t seed);

/// Split sizes in games for `n` distinct games.
struct SplitCounts {
    std::size_t train, valid, test;
};
SplitCounts split_counts(std::size_t n);

/// Writes train.tsv, valid.tsv, test.tsv (same 5-column format), vocab.txt
/// (built from train) and splits.tsv into `dir`.
void write_prepared_dataset(const std::filesystem::path& dir, const DatasetSplit& split, const Vocabulary& vocab);

/// One TSV row in the loader's format; the text column is the space-joined tokens.
std::string format_record(const CommentaryRecord& record);

}  // namespace scc::data
