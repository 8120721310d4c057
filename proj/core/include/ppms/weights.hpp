// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ppms/tensor.hpp"

namespace ppms {

/// One named tensor in a store: rank 1..4 dims plus a flat float payload.
struct WeightEntry {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    std::uint64_t numel() const {
        std::uint64_t p = 1;
        for (std::uint32_t d : dims) p *= d;
        return p;
    }
};

/// Insertion-ordered map from tensor name to entry; names are unique.
class WeightStore {
  public:
    void put(const std::string& name, WeightEntry entry);
    bool contains(const std::string& name) const { return index_.count(name) != 0; }
    const WeightEntry& get(const std::string& name) const;

    /// In-place access, for building doctored fixtures. Stores handed to a
    /// running forward pass must no longer be mutated.
    WeightEntry& get_mutable(const std::string& name);

    std::size_t size() const { return entries_.size(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    /// Total scalar count across all entries.
    std::uint64_t total_scalars() const;

  private:
    std::vector<std::pair<std::string, WeightEntry>> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Binary container: magic "PPMS", u32 version=1, u32 tensor count; per tensor
// u16 name length, name bytes, u8 dtype (0 = float32), u8 rank, rank u32 dims,
// raw payload. All integers and floats little-endian.
WeightStore load_weights(const std::string& path);
void save_weights(const WeightStore& store, const std::string& path);

/// Serialized container bytes (same layout as the file), for hashing and tests.
std::vector<std::uint8_t> serialize_weights(const WeightStore& store);
WeightStore deserialize_weights(std::span<const std::uint8_t> bytes);

/// Fetch a rank-4 entry as a Tensor, checking the exact expected dims.
Tensor weight_as_tensor(const WeightStore& ws, const std::string& name, int n, int c, int h, int w);

/// Fetch a rank-1 entry, checking the exact expected length.
std::span<const float> weight_as_vector(const WeightStore& ws, const std::string& name, int len);

}  // namespace ppms
