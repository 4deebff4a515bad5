#include "scc/data/shards.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

namespace scc::data {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'C', 'T', 'U', 'P', 'L', '\n'};

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T value = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(static_cast<T>(bytes_[pos_ + i]) << (8 * i));
        pos_ += sizeof(T);
        return value;
    }

    std::string string(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw ShardError("truncated tuple shard");
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_shard(std::span<const engine::TrainingTuple> tuples) {
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put<std::uint32_t>(out, kShardVersion);
    put<std::uint64_t>(out, tuples.size());
    for (const auto& t : tuples) {
        const auto fen = t.board.fen();
        put<std::uint16_t>(out, static_cast<std::uint16_t>(fen.size()));
        out.insert(out.end(), fen.begin(), fen.end());
        put<std::uint8_t>(out, static_cast<std::uint8_t>(std::min(t.board.repetition_count(), 255)));
        put<std::uint8_t>(out, static_cast<std::uint8_t>(std::min(t.board.previous_repetition_count(), 255)));
        put<std::uint8_t>(out, static_cast<std::uint8_t>(t.move.from.index()));
        put<std::uint8_t>(out, static_cast<std::uint8_t>(t.move.to.index()));
        put<std::uint8_t>(out, static_cast<std::uint8_t>(chess::promotion_slot(t.move.promotion)));
        put<std::uint8_t>(out, static_cast<std::uint8_t>(t.outcome * 2));
    }
    return out;
}

std::vector<engine::TrainingTuple> decode_shard(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw ShardError("not a tuple shard (bad magic)");
    }
    Reader in(bytes.subspan(sizeof(kMagic)));
    if (const auto version = in.get<std::uint32_t>(); version != kShardVersion) {
        throw ShardError("unsupported tuple shard version " + std::to_string(version));
    }
    const auto count = in.get<std::uint64_t>();
    std::vector<engine::TrainingTuple> out;
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto fen = in.string(in.get<std::uint16_t>());
        const int rep = in.get<std::uint8_t>();
        const int prev = in.get<std::uint8_t>();
        const int from = in.get<std::uint8_t>();
        const int to = in.get<std::uint8_t>();
        const int promo = in.get<std::uint8_t>();
        const int outcome = in.get<std::uint8_t>();
        if (from > 63 || to > 63 || promo > 4 || outcome > 2) throw ShardError("corrupt tuple record");
        try {
            const auto board = chess::Board::from_fen(fen).with_repetition_counts(rep, prev);
            const auto move = chess::find_legal(
                board, chess::Move{chess::Square::from_index(from), chess::Square::from_index(to),
                                   chess::promotion_from_slot(promo), chess::MoveFlag::none});
            if (!move) throw ShardError("tuple move is illegal on its board");
            out.push_back({board, *move, outcome / 2.0});
        } catch (const chess::ChessError& e) {
            throw ShardError(std::string("corrupt tuple record: ") + e.what());
        }
    }
    if (!in.done()) throw ShardError("trailing bytes after tuple records");
    return out;
}

void write_shard(const std::filesystem::path& path, std::span<const engine::TrainingTuple> tuples) {
    const auto bytes = encode_shard(tuples);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ShardError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ShardError("failed writing " + path.string());
}

std::vector<engine::TrainingTuple> read_shard(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ShardError("cannot read " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_shard(bytes);
}

}  // namespace scc::data
