// SPDX-License-Identifier: Apache-2.0
#include "ppms/segmap_io.hpp"

#include <cstring>
#include <fstream>
#include <vector>

namespace ppms {

namespace {

constexpr char kMagic[4] = {'P', 'P', 'S', 'M'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

}  // namespace

void save_segmap(const IndexMap& map, const std::string& path) {
    if (map.n != 1) {
        throw ShapeError("segmap container holds a single map");
    }
    std::vector<std::uint8_t> bytes;
    bytes.insert(bytes.end(), kMagic, kMagic + 4);
    put_u32(bytes, static_cast<std::uint32_t>(map.h));
    put_u32(bytes, static_cast<std::uint32_t>(map.w));
    for (std::int32_t v : map.data) {
        if (v < 0 || v > 0xffff) {
            throw FormatError("class id " + std::to_string(v) + " does not fit in u16");
        }
        bytes.push_back(static_cast<std::uint8_t>(v & 0xff));
        bytes.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open for writing: " + path);
    }
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) {
        throw IoError("write error on segmap file: " + path);
    }
}

IndexMap load_segmap(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open segmap file: " + path);
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError("bad magic, not a PPSM segmap container");
    }
    auto u32 = [&bytes](std::size_t at) {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[at + i]) << (8 * i);
        return v;
    };
    const std::uint32_t h = u32(4);
    const std::uint32_t w = u32(8);
    const std::uint64_t expect = 12 + 2ull * h * w;
    if (h == 0 || w == 0 || bytes.size() != expect) {
        throw FormatError("segmap container has wrong payload length");
    }
    IndexMap map(1, static_cast<int>(h), static_cast<int>(w));
    for (std::size_t i = 0; i < map.data.size(); ++i) {
        map.data[i] = static_cast<std::int32_t>(bytes[12 + 2 * i] | (bytes[12 + 2 * i + 1] << 8));
    }
    return map;
}

void save_input_tensor(const Tensor& t, const std::string& path) {
    WeightStore ws;
    WeightEntry entry;
    entry.dims = {static_cast<std::uint32_t>(t.n), static_cast<std::uint32_t>(t.c),
                  static_cast<std::uint32_t>(t.h), static_cast<std::uint32_t>(t.w)};
    entry.data = t.data;
    ws.put("input", std::move(entry));
    save_weights(ws, path);
}

Tensor load_input_tensor(const std::string& path) {
    const WeightStore ws = load_weights(path);
    const WeightEntry& e = ws.get("input");
    if (e.dims.size() != 4) {
        throw FormatError("input tensor must be rank 4");
    }
    return Tensor(static_cast<int>(e.dims[0]), static_cast<int>(e.dims[1]),
                  static_cast<int>(e.dims[2]), static_cast<int>(e.dims[3]), e.data);
}

}  // namespace ppms
