// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppms/config.hpp"
#include "ppms/model.hpp"

namespace ppms {

// ---------------------------------------------------------------------------
// Latency profile over the five pipeline phases.

struct BenchOptions {
    int height = 512;
    int width = 512;
    bool use_vim = true;
    int warmup = 3;
    int repeat = 10;
    std::uint64_t seed = 42;
};

struct PhaseEntry {
    std::string phase;
    double ms = 0.0;      // median over repeats
    double percent = 0.0; // of the phase-median sum
};

struct ProfileReport {
    // run metadata
    std::string variant;
    int height = 0, width = 0;
    int classes = 0;
    bool vim = true;
    std::string interp;
    int vim_threshold = 30;
    int warmup = 0, repeat = 0;
    std::uint64_t seed = 0;
    int threads = 1;
    // results
    int present_classes = 0;
    int total_classes = 0;
    double total_ms = 0.0;  // median end-to-end
    std::vector<PhaseEntry> phases;
};

/// Seeded weights and input, unmeasured warmup runs, then `repeat` measured
/// runs on a single thread; phase times are medians.
ProfileReport run_bench(const VariantConfig& cfg, const BenchOptions& opt);

std::string bench_report_json(const ProfileReport& r);
std::string bench_report_csv(const ProfileReport& r);

// ---------------------------------------------------------------------------
// Slim-vs-naive upsample equivalence measurement.

struct VerifyOptions {
    int classes = 150;
    int trials = 200;
    int height = 512;   // output resolution; logits are generated at /8
    int width = 512;
    Interp interp = Interp::nearest;
    bool smooth = false;  // pass logits through a 5x5 average filter
    std::uint64_t seed = 7;
    int vim_threshold = 30;
    double mismatch_bound = 0.01;  // bilinear acceptance bound
};

struct VerifyTrial {
    int trial = 0;
    int present_classes = 0;
    std::uint64_t mismatching_pixels = 0;
    double mismatch_fraction = 0.0;
};

struct VerifyReport {
    std::string mode;
    int classes = 0;
    int height = 0, width = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    bool smooth = false;
    int vim_threshold = 30;
    double mismatch_bound = 0.01;
    std::uint64_t total_pixels = 0;
    std::uint64_t mismatching_pixels = 0;
    double mismatch_fraction = 0.0;
    double present_classes_mean = 0.0;
    std::uint64_t soundness_violations = 0;  // vim output ids outside the present set
    bool passed = false;
    std::vector<VerifyTrial> trials_detail;
};

/// Per trial: random logits (optionally smoothed), both upsample pipelines,
/// mismatch statistics. Passes when nearest shows zero mismatches, or bilinear
/// stays under the bound; any id outside the present set fails.
VerifyReport run_verify(const VerifyOptions& opt);

std::string verify_report_json(const VerifyReport& r);
std::string verify_report_csv(const VerifyReport& r);

// ---------------------------------------------------------------------------
// Latency curve of the upsample stage against the number of present classes.

struct SweepOptions {
    int classes = 150;
    int height = 512;
    int width = 512;
    Interp interp = Interp::bilinear;
    int repeat = 5;
    std::uint64_t seed = 42;
    std::vector<int> targets = {1, 5, 10, 20, 50};
};

struct SweepEntry {
    int target_classes = 0;
    int present_classes = 0;
    double naive_ms = 0.0;
    double vim_ms = 0.0;
    double speedup = 0.0;
};

struct SweepReport {
    int classes = 0;
    int height = 0, width = 0;
    std::string interp;
    int repeat = 0;
    std::uint64_t seed = 0;
    std::vector<SweepEntry> entries;
};

/// Logits built so exactly `target` classes win spatial strips; medians of
/// `repeat` timed runs of each pipeline.
SweepReport run_vim_sweep(const SweepOptions& opt);

std::string sweep_report_json(const SweepReport& r);
std::string sweep_report_csv(const SweepReport& r);

/// Fixture helpers shared by the sweep, tests and the CLI.
Tensor random_image(int height, int width, std::uint64_t seed);
Tensor random_logits(int classes, int h, int w, std::uint64_t seed);
Tensor strip_logits(int classes, int present, int h, int w, std::uint64_t seed);

double median(std::vector<double> values);

}  // namespace ppms
