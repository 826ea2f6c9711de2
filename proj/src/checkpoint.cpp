#include "neglectnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>

namespace neglectnet::inline NEGLECTNET_PRECISION {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr double kMaxExactCount = 16777216.0;  // 2^24, exact in float32

void put_u32(std::vector<uint8_t>& out, uint32_t v)
{
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

class Reader {
public:
    explicit Reader(const std::vector<uint8_t>& bytes) : bytes_(bytes) {}

    uint32_t u32()
    {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    void raw(void* dst, size_t n)
    {
        need(n);
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(size_t n) const
    {
        if (bytes_.size() - pos_ < n) throw IoError("checkpoint is truncated");
    }
    const std::vector<uint8_t>& bytes_;
    size_t pos_ = 0;
};

void add_store(std::vector<NamedTensor>& out, const std::string& prefix, const ParamStore& store)
{
    for (const auto& [name, t] : store.items())
        out.push_back({prefix + name, t.shape(), std::vector<float>(t.data().begin(), t.data().end())});
}

void add_adam(std::vector<NamedTensor>& out, const std::string& prefix, const AdamState& adam, const ParamStore& store)
{
    if (static_cast<double>(adam.step) >= kMaxExactCount) throw ArgumentError("step count too large to checkpoint");
    out.push_back({prefix + "step", {1}, {static_cast<float>(adam.step)}});
    const auto& items = store.items();
    for (size_t i = 0; i < items.size(); ++i) {
        out.push_back({prefix + "m/" + items[i].first, items[i].second.shape(),
                       std::vector<float>(adam.m[i].begin(), adam.m[i].end())});
        out.push_back({prefix + "v/" + items[i].first, items[i].second.shape(),
                       std::vector<float>(adam.v[i].begin(), adam.v[i].end())});
    }
}

using TensorIndex = std::map<std::string, const NamedTensor*>;

const NamedTensor& take(TensorIndex& index, const std::string& name, const Shape& shape)
{
    auto it = index.find(name);
    if (it == index.end()) throw ConfigError("checkpoint lacks tensor " + name);
    if (it->second->shape != shape)
        throw ConfigError("checkpoint tensor " + name + " has shape " + shape_to_string(it->second->shape) +
                          ", configuration expects " + shape_to_string(shape));
    const NamedTensor& t = *it->second;
    index.erase(it);
    return t;
}

void restore_store(TensorIndex& index, const std::string& prefix, ParamStore& store)
{
    for (auto& [name, t] : store.items()) {
        const auto& src = take(index, prefix + name, t.shape());
        Tensor handle = t;
        auto dst = handle.mutable_data();
        for (size_t k = 0; k < dst.size(); ++k) dst[k] = static_cast<Real>(src.data[k]);
    }
}

void restore_adam(TensorIndex& index, const std::string& prefix, AdamState& adam, const ParamStore& store)
{
    adam.step = static_cast<int64_t>(take(index, prefix + "step", {1}).data[0]);
    const auto& items = store.items();
    for (size_t i = 0; i < items.size(); ++i) {
        const auto& m = take(index, prefix + "m/" + items[i].first, items[i].second.shape());
        const auto& v = take(index, prefix + "v/" + items[i].first, items[i].second.shape());
        adam.m[i].assign(m.data.begin(), m.data.end());
        adam.v[i].assign(v.data.begin(), v.data.end());
    }
}

TensorIndex index_of(const std::vector<NamedTensor>& tensors)
{
    TensorIndex index;
    for (const auto& t : tensors)
        if (!index.emplace(t.name, &t).second) throw IoError("checkpoint repeats tensor " + t.name);
    return index;
}

}  // namespace

std::vector<uint8_t> encode_checkpoint(const std::vector<NamedTensor>& tensors)
{
    std::vector<uint8_t> out(kCheckpointMagic, kCheckpointMagic + 4);
    put_u32(out, kCheckpointVersion);
    put_u32(out, static_cast<uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
        if (static_cast<int64_t>(t.data.size()) != shape_numel(t.shape))
            throw DimensionError("tensor " + t.name + " payload does not match its shape");
        put_u32(out, static_cast<uint32_t>(t.name.size()));
        out.insert(out.end(), t.name.begin(), t.name.end());
        put_u32(out, static_cast<uint32_t>(t.shape.size()));
        for (auto e : t.shape) put_u32(out, static_cast<uint32_t>(e));
        const auto* p = reinterpret_cast<const uint8_t*>(t.data.data());
        out.insert(out.end(), p, p + t.data.size() * sizeof(float));
    }
    return out;
}

std::vector<NamedTensor> decode_checkpoint(const std::vector<uint8_t>& bytes)
{
    Reader r(bytes);
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kCheckpointMagic, 4) != 0) throw IoError("not a checkpoint (bad magic)");
    const uint32_t version = r.u32();
    if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
    const uint32_t count = r.u32();
    std::vector<NamedTensor> tensors;
    for (uint32_t i = 0; i < count; ++i) {
        NamedTensor t;
        t.name.resize(r.u32());
        r.raw(t.name.data(), t.name.size());
        const uint32_t rank = r.u32();
        if (rank > 8) throw IoError("implausible rank in checkpoint tensor " + t.name);
        for (uint32_t k = 0; k < rank; ++k) t.shape.push_back(r.u32());
        t.data.resize(static_cast<size_t>(shape_numel(t.shape)));
        r.raw(t.data.data(), t.data.size() * sizeof(float));
        tensors.push_back(std::move(t));
    }
    if (!r.done()) throw IoError("trailing bytes after checkpoint payload");
    return tensors;
}

void write_checkpoint_file(const std::string& path, const std::vector<NamedTensor>& tensors)
{
    const auto bytes = encode_checkpoint(tensors);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write " + tmp);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("failed writing " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move checkpoint into place at " + path + ": " + ec.message());
}

std::vector<NamedTensor> read_checkpoint_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

std::vector<NamedTensor> checkpoint_tensors(const TrainState& state)
{
    if (static_cast<double>(state.step) >= kMaxExactCount) throw ArgumentError("step count too large to checkpoint");
    std::vector<NamedTensor> out;
    out.push_back({"train/step", {1}, {static_cast<float>(state.step)}});
    add_store(out, "g/", state.g.params);
    add_store(out, "d/", state.d.params);
    add_adam(out, "adam_g/", state.adam_g, state.g.params);
    add_adam(out, "adam_d/", state.adam_d, state.d.params);
    return out;
}

void restore_checkpoint(TrainState& state, const std::vector<NamedTensor>& tensors)
{
    auto index = index_of(tensors);
    state.step = static_cast<int64_t>(take(index, "train/step", {1}).data[0]);
    restore_store(index, "g/", state.g.params);
    restore_store(index, "d/", state.d.params);
    restore_adam(index, "adam_g/", state.adam_g, state.g.params);
    restore_adam(index, "adam_d/", state.adam_d, state.d.params);
    if (!index.empty()) throw ConfigError("checkpoint holds tensor " + index.begin()->first + " unknown to this configuration");
}

void save_checkpoint(const std::string& path, const TrainState& state)
{
    write_checkpoint_file(path, checkpoint_tensors(state));
}

void load_checkpoint(const std::string& path, TrainState& state)
{
    restore_checkpoint(state, read_checkpoint_file(path));
}

GeneratorParams load_generator(const std::string& path, const NetConfig& config)
{
    const auto tensors = read_checkpoint_file(path);
    auto index = index_of(tensors);
    GeneratorParams g = build_generator(config, 0);
    restore_store(index, "g/", g.params);
    for (const auto& [name, t] : index)
        if (name.rfind("g/", 0) == 0) throw ConfigError("checkpoint holds generator tensor " + name + " unknown to this configuration");
    return g;
}

}  // namespace neglectnet
