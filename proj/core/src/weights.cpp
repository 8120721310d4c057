// SPDX-License-Identifier: Apache-2.0
#include "ppms/weights.hpp"

#include <cstring>
#include <fstream>

namespace ppms {

namespace {

constexpr char kMagic[4] = {'P', 'P', 'M', 'S'};
constexpr std::uint32_t kVersion = 1;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

class ByteReader {
  public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        }
        pos_ += 4;
        return v;
    }
    float f32() {
        std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    std::string str(std::size_t len) {
        need(len);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
        pos_ += len;
        return s;
    }
    bool at_end() const { return pos_ == bytes_.size(); }

  private:
    void need(std::size_t count) const {
        if (pos_ + count > bytes_.size()) {
            throw IoError("weight container truncated");
        }
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

void WeightStore::put(const std::string& name, WeightEntry entry) {
    if (index_.count(name)) {
        throw FormatError("duplicate tensor name: " + name);
    }
    if (entry.dims.empty() || entry.dims.size() > 4) {
        throw FormatError("tensor rank must be 1..4: " + name);
    }
    if (entry.numel() != entry.data.size()) {
        throw FormatError("tensor data length does not match dims: " + name);
    }
    index_.emplace(name, entries_.size());
    entries_.emplace_back(name, std::move(entry));
}

const WeightEntry& WeightStore::get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) {
        throw ShapeError("missing weight tensor: " + name);
    }
    return entries_[it->second].second;
}

WeightEntry& WeightStore::get_mutable(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) {
        throw ShapeError("missing weight tensor: " + name);
    }
    return entries_[it->second].second;
}

std::uint64_t WeightStore::total_scalars() const {
    std::uint64_t total = 0;
    for (const auto& [name, entry] : entries_) {
        total += entry.numel();
    }
    return total;
}

std::vector<std::uint8_t> serialize_weights(const WeightStore& store) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(store.size()));
    for (const auto& [name, entry] : store) {
        if (name.size() > 0xffff) {
            throw FormatError("tensor name too long: " + name);
        }
        put_u16(out, static_cast<std::uint16_t>(name.size()));
        out.insert(out.end(), name.begin(), name.end());
        out.push_back(0);  // dtype float32
        out.push_back(static_cast<std::uint8_t>(entry.dims.size()));
        for (std::uint32_t d : entry.dims) {
            put_u32(out, d);
        }
        for (float v : entry.data) {
            put_f32(out, v);
        }
    }
    return out;
}

WeightStore deserialize_weights(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    const std::string magic = r.str(4);
    if (std::memcmp(magic.data(), kMagic, 4) != 0) {
        throw FormatError("bad magic, not a PPMS weight container");
    }
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw FormatError("unsupported container version " + std::to_string(version));
    }
    const std::uint32_t count = r.u32();
    WeightStore store;
    for (std::uint32_t t = 0; t < count; ++t) {
        const std::uint16_t name_len = r.u16();
        std::string name = r.str(name_len);
        const std::uint8_t dtype = r.u8();
        if (dtype != 0) {
            throw FormatError("unsupported dtype " + std::to_string(dtype) + " for " + name);
        }
        const std::uint8_t rank = r.u8();
        if (rank < 1 || rank > 4) {
            throw FormatError("bad rank " + std::to_string(rank) + " for " + name);
        }
        WeightEntry entry;
        std::uint64_t numel = 1;
        for (int i = 0; i < rank; ++i) {
            const std::uint32_t d = r.u32();
            if (d == 0) {
                throw FormatError("zero dim in " + name);
            }
            entry.dims.push_back(d);
            numel *= d;
        }
        entry.data.reserve(numel);
        for (std::uint64_t i = 0; i < numel; ++i) {
            entry.data.push_back(r.f32());
        }
        store.put(name, std::move(entry));
    }
    if (!r.at_end()) {
        throw FormatError("trailing bytes after last tensor");
    }
    return store;
}

WeightStore load_weights(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open weight file: " + path);
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (f.bad()) {
        throw IoError("read error on weight file: " + path);
    }
    return deserialize_weights(bytes);
}

void save_weights(const WeightStore& store, const std::string& path) {
    const std::vector<std::uint8_t> bytes = serialize_weights(store);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open for writing: " + path);
    }
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) {
        throw IoError("write error on weight file: " + path);
    }
}

Tensor weight_as_tensor(const WeightStore& ws, const std::string& name, int n, int c, int h, int w) {
    const WeightEntry& e = ws.get(name);
    const std::vector<std::uint32_t> want = {static_cast<std::uint32_t>(n),
                                             static_cast<std::uint32_t>(c),
                                             static_cast<std::uint32_t>(h),
                                             static_cast<std::uint32_t>(w)};
    if (e.dims != want) {
        throw ShapeError("weight " + name + " has unexpected dims");
    }
    return Tensor(n, c, h, w, e.data);
}

std::span<const float> weight_as_vector(const WeightStore& ws, const std::string& name, int len) {
    const WeightEntry& e = ws.get(name);
    if (e.dims.size() != 1 || e.dims[0] != static_cast<std::uint32_t>(len)) {
        throw ShapeError("weight " + name + " has unexpected dims");
    }
    return std::span<const float>(e.data.data(), e.data.size());
}

}  // namespace ppms
