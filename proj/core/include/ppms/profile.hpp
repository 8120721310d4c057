// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

namespace ppms {

/// Wall time per pipeline phase, in seconds. The five phases partition one
/// forward pass; scopes never overlap, so the parts sum to the whole.
struct PhaseTimes {
    double backbone = 0.0;
    double attention = 0.0;
    double fusion = 0.0;
    double head = 0.0;
    double upsample = 0.0;

    double total() const { return backbone + attention + fusion + head + upsample; }
};

/// Accumulates elapsed wall time into *acc on destruction; null acc is a no-op.
class ScopedPhase {
  public:
    explicit ScopedPhase(double* acc)
        : acc_(acc), start_(acc ? std::chrono::steady_clock::now()
                                : std::chrono::steady_clock::time_point{}) {}
    ~ScopedPhase() {
        if (acc_) {
            const auto end = std::chrono::steady_clock::now();
            *acc_ += std::chrono::duration<double>(end - start_).count();
        }
    }
    ScopedPhase(const ScopedPhase&) = delete;
    ScopedPhase& operator=(const ScopedPhase&) = delete;

  private:
    double* acc_;
    std::chrono::steady_clock::time_point start_;
};

/// Instrumentation for the strided attention path: one record per attention
/// stack invocation, with the incoming feature's pixel count and the pixel
/// count the attention blocks actually process.
struct AttentionStats {
    struct Record {
        std::uint64_t input_pixels = 0;
        std::uint64_t attended_pixels = 0;
        std::uint64_t blocks = 0;
    };
    std::vector<Record> records;

    std::uint64_t total_attended() const {
        std::uint64_t t = 0;
        for (const auto& r : records) t += r.attended_pixels * r.blocks;
        return t;
    }
};

}  // namespace ppms
