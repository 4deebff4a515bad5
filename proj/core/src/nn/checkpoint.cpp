#include "scc/nn/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

namespace scc::nn {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'C', 'C', 'K', 'P', 'T', '\n'};

class Writer {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        out.insert(out.end(), p, p + n);
    }
    template <typename T>
    void integer(T v) {
        for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
    }
    void string(const std::string& s, bool wide) {
        if (wide) integer<std::uint64_t>(s.size());
        else integer<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }

    std::vector<std::uint8_t> out;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    void need(std::size_t n) const {
        if (pos_ + n > in_.size()) throw CheckpointError("checkpoint truncated at byte " + std::to_string(pos_));
    }
    template <typename T>
    T integer() {
        need(sizeof(T));
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
        pos_ += sizeof(T);
        return static_cast<T>(v);
    }
    std::string string(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    bool done() const noexcept { return pos_ == in_.size(); }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

}  // namespace

const Tensor* Checkpoint::find(const std::string& name) const {
    for (const auto& [n, t] : tensors) {
        if (n == name) return &t;
    }
    return nullptr;
}

Checkpoint make_checkpoint(nlohmann::json header, std::span<const ParameterPtr> params) {
    Checkpoint c;
    c.header = std::move(header);
    c.tensors.reserve(params.size());
    for (const auto& p : params) c.tensors.emplace_back(p->name, p->value);
    return c;
}

std::vector<std::uint8_t> serialize(const Checkpoint& ckpt) {
    Writer w;
    w.bytes(kMagic, sizeof(kMagic));
    w.integer<std::uint32_t>(kCheckpointVersion);
    w.string(ckpt.header.dump(), true);
    w.integer<std::uint64_t>(ckpt.tensors.size());
    for (const auto& [name, t] : ckpt.tensors) {
        w.string(name, false);
        w.integer<std::uint32_t>(static_cast<std::uint32_t>(t.rank()));
        for (auto d : t.shape()) w.integer<std::uint64_t>(d);
        for (double v : t.values()) w.integer<std::uint64_t>(std::bit_cast<std::uint64_t>(v));
    }
    return std::move(w.out);
}

Checkpoint deserialize(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const auto magic = r.string(sizeof(kMagic));
    if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) throw CheckpointError("not a checkpoint (bad magic)");
    const auto version = r.integer<std::uint32_t>();
    if (version != kCheckpointVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint c;
    const auto header_len = r.integer<std::uint64_t>();
    try {
        c.header = nlohmann::json::parse(r.string(header_len));
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("checkpoint header is not JSON: ") + e.what());
    }
    const auto count = r.integer<std::uint64_t>();
    for (std::uint64_t i = 0; i < count; ++i) {
        auto name = r.string(r.integer<std::uint32_t>());
        const auto rank = r.integer<std::uint32_t>();
        Shape shape(rank);
        for (auto& d : shape) d = r.integer<std::uint64_t>();
        Tensor t(shape);
        for (auto& v : t.values()) v = std::bit_cast<double>(r.integer<std::uint64_t>());
        c.tensors.emplace_back(std::move(name), std::move(t));
    }
    if (!r.done()) throw CheckpointError("trailing bytes after checkpoint tensors");
    return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    const auto bytes = serialize(ckpt);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CheckpointError("cannot write " + tmp);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw CheckpointError("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

void restore_parameters(const Checkpoint& ckpt, std::span<const ParameterPtr> params) {
    for (const auto& p : params) {
        const Tensor* t = ckpt.find(p->name);
        if (!t) throw CheckpointError("checkpoint lacks parameter '" + p->name + "'");
        if (t->shape() != p->value.shape()) {
            throw CheckpointError("parameter '" + p->name + "': checkpoint shape " + shape_string(t->shape()) +
                                  " vs model shape " + shape_string(p->value.shape()));
        }
        p->value = *t;
        p->zero_grad();
    }
}

std::string content_hash(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string checkpoint_hash(const Checkpoint& ckpt) { return content_hash(serialize(ckpt)); }

}  // namespace scc::nn
