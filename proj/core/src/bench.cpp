// SPDX-License-Identifier: Apache-2.0
#include "ppms/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "json.hpp"

#include "ppms/rng.hpp"

namespace ppms {

using json = nlohmann::ordered_json;

double median(std::vector<double> values) {
    if (values.empty()) {
        return 0.0;
    }
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) {
        return values[mid];
    }
    return 0.5 * (values[mid - 1] + values[mid]);
}

Tensor random_image(int height, int width, std::uint64_t seed) {
    Tensor t(1, 3, height, width);
    Rng rng(seed);
    for (float& v : t.data) {
        v = rng.uniform(-1.0f, 1.0f);
    }
    return t;
}

Tensor random_logits(int classes, int h, int w, std::uint64_t seed) {
    Tensor t(1, classes, h, w);
    Rng rng(seed);
    for (float& v : t.data) {
        v = rng.uniform(-1.0f, 1.0f);
    }
    return t;
}

Tensor strip_logits(int classes, int present, int h, int w, std::uint64_t seed) {
    const std::int64_t pixels = static_cast<std::int64_t>(h) * w;
    if (present < 1 || present > classes || present > pixels) {
        throw ConfigError("strip_logits: present must be in [1, min(classes, pixels)]");
    }
    Tensor t(1, classes, h, w);
    Rng rng(seed);
    for (float& v : t.data) {
        v = rng.uniform(-0.5f, 0.5f);
    }
    // Contiguous pixel ranges; range j is won outright by class floor(j*C/present).
    for (int j = 0; j < present; ++j) {
        const int cls = static_cast<int>(static_cast<std::int64_t>(j) * classes / present);
        const std::int64_t p0 = static_cast<std::int64_t>(j) * pixels / present;
        const std::int64_t p1 = static_cast<std::int64_t>(j + 1) * pixels / present;
        float* p = t.plane(0, cls);
        for (std::int64_t i = p0; i < p1; ++i) {
            p[i] += 3.0f;
        }
    }
    return t;
}

ProfileReport run_bench(const VariantConfig& cfg, const BenchOptions& opt) {
    validate(cfg);
    if (opt.repeat < 1) {
        throw ConfigError("repeat must be >= 1");
    }
    if (opt.warmup < 0) {
        throw ConfigError("warmup must be >= 0");
    }
    if (opt.height % 32 != 0 || opt.width % 32 != 0 || opt.height < 32 || opt.width < 32) {
        throw ConfigError("bench input dims must be positive multiples of 32");
    }

    const WeightStore ws = random_init(cfg, opt.seed);
    const Tensor image = random_image(opt.height, opt.width, opt.seed * 0x9e3779b97f4a7c15ull + 1);

    for (int i = 0; i < opt.warmup; ++i) {
        forward(image, cfg, ws, opt.use_vim);
    }

    std::vector<double> backbone, attention, fusion, head, upsample, totals;
    VimStats vim_stats;
    for (int i = 0; i < opt.repeat; ++i) {
        PhaseTimes times;
        forward(image, cfg, ws, opt.use_vim, &times, &vim_stats);
        backbone.push_back(times.backbone);
        attention.push_back(times.attention);
        fusion.push_back(times.fusion);
        head.push_back(times.head);
        upsample.push_back(times.upsample);
        totals.push_back(times.total());
    }

    ProfileReport report;
    report.variant = cfg.name;
    report.height = opt.height;
    report.width = opt.width;
    report.classes = cfg.fusion.num_classes;
    report.vim = opt.use_vim;
    report.interp = interp_to_string(cfg.vim.interp);
    report.vim_threshold = cfg.vim.class_threshold;
    report.warmup = opt.warmup;
    report.repeat = opt.repeat;
    report.seed = opt.seed;
    report.threads = 1;
    if (opt.use_vim && !vim_stats.fallback) {
        report.present_classes = vim_stats.present_classes;
    } else {
        // Fallback and naive runs never compute the present set while timing;
        // take it from an untimed pass over the logits.
        const Tensor logits = forward_logits(image, cfg, ws);
        report.present_classes = vim_channel_stats(logits).first;
    }
    report.total_classes = cfg.fusion.num_classes;
    report.total_ms = median(totals) * 1e3;

    const std::vector<std::pair<std::string, std::vector<double>*>> named = {
        {"backbone", &backbone}, {"attention", &attention}, {"fusion", &fusion},
        {"head", &head},         {"upsample+argmax", &upsample},
    };
    double sum = 0.0;
    for (const auto& [name, samples] : named) {
        PhaseEntry e;
        e.phase = name;
        e.ms = median(*samples) * 1e3;
        sum += e.ms;
        report.phases.push_back(e);
    }
    for (PhaseEntry& e : report.phases) {
        e.percent = sum > 0.0 ? 100.0 * e.ms / sum : 0.0;
    }
    return report;
}

std::string bench_report_json(const ProfileReport& r) {
    json j;
    j["command"] = "bench";
    j["variant"] = r.variant;
    j["height"] = r.height;
    j["width"] = r.width;
    j["classes"] = r.classes;
    j["vim"] = r.vim;
    j["interp"] = r.interp;
    j["vim_threshold"] = r.vim_threshold;
    j["warmup"] = r.warmup;
    j["repeat"] = r.repeat;
    j["seed"] = r.seed;
    j["threads"] = r.threads;
    j["present_classes"] = r.present_classes;
    j["total_classes"] = r.total_classes;
    j["total_ms"] = r.total_ms;
    j["phases"] = json::array();
    for (const PhaseEntry& e : r.phases) {
        j["phases"].push_back({{"phase", e.phase}, {"ms", e.ms}, {"percent", e.percent}});
    }
    return j.dump(2) + "\n";
}

std::string bench_report_csv(const ProfileReport& r) {
    std::string out = "phase,ms,percent\n";
    for (const PhaseEntry& e : r.phases) {
        out += e.phase + "," + std::to_string(e.ms) + "," + std::to_string(e.percent) + "\n";
    }
    return out;
}

namespace {

Tensor box_filter_5x5(const Tensor& x) {
    Tensor kernel(x.c, 1, 5, 5);
    std::fill(kernel.data.begin(), kernel.data.end(), 1.0f / 25.0f);
    ConvSpec spec;
    spec.in_channels = x.c;
    spec.out_channels = x.c;
    spec.kh = spec.kw = 5;
    spec.ph = spec.pw = 2;
    spec.groups = x.c;
    return depthwise_conv2d(x, kernel, {}, spec);
}

bool id_in_set(const ClassIndexSet& s, std::int32_t id) {
    return std::binary_search(s.begin(), s.end(), id);
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& opt) {
    if (opt.trials < 1) {
        throw ConfigError("trials must be >= 1");
    }
    if (opt.classes < 1) {
        throw ConfigError("classes must be >= 1");
    }
    if (opt.height % 8 != 0 || opt.width % 8 != 0 || opt.height < 8 || opt.width < 8) {
        throw ConfigError("verify dims must be positive multiples of 8");
    }

    VerifyReport report;
    report.mode = interp_to_string(opt.interp);
    report.classes = opt.classes;
    report.height = opt.height;
    report.width = opt.width;
    report.trials = opt.trials;
    report.seed = opt.seed;
    report.smooth = opt.smooth;
    report.vim_threshold = opt.vim_threshold;
    report.mismatch_bound = opt.mismatch_bound;

    VimConfig vim_cfg;
    vim_cfg.class_threshold = opt.vim_threshold;
    vim_cfg.interp = opt.interp;

    const int lh = opt.height / 8;
    const int lw = opt.width / 8;
    std::uint64_t present_sum = 0;

    for (int t = 0; t < opt.trials; ++t) {
        Tensor logits = random_logits(opt.classes, lh, lw,
                                      opt.seed * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(t));
        if (opt.smooth) {
            logits = box_filter_5x5(logits);
        }
        const IndexMap naive = naive_upsample_argmax(logits, opt.height, opt.width, opt.interp);
        VimStats stats;
        const IndexMap slim = vim_upsample_argmax(logits, opt.height, opt.width, vim_cfg, &stats);

        const ClassIndexSet present = unique_sorted(argmax_channel(logits));
        present_sum += present.size();

        VerifyTrial trial;
        trial.trial = t;
        trial.present_classes = static_cast<int>(present.size());
        for (std::size_t i = 0; i < naive.data.size(); ++i) {
            if (naive.data[i] != slim.data[i]) {
                ++trial.mismatching_pixels;
            }
            if (!id_in_set(present, slim.data[i])) {
                ++report.soundness_violations;
            }
        }
        trial.mismatch_fraction =
            static_cast<double>(trial.mismatching_pixels) / static_cast<double>(naive.data.size());
        report.total_pixels += naive.data.size();
        report.mismatching_pixels += trial.mismatching_pixels;
        report.trials_detail.push_back(trial);
    }

    report.mismatch_fraction =
        static_cast<double>(report.mismatching_pixels) / static_cast<double>(report.total_pixels);
    report.present_classes_mean = static_cast<double>(present_sum) / opt.trials;
    const bool equivalence_ok = opt.interp == Interp::nearest
                                    ? report.mismatching_pixels == 0
                                    : report.mismatch_fraction < opt.mismatch_bound;
    report.passed = equivalence_ok && report.soundness_violations == 0;
    return report;
}

std::string verify_report_json(const VerifyReport& r) {
    json j;
    j["command"] = "verify";
    j["mode"] = r.mode;
    j["classes"] = r.classes;
    j["height"] = r.height;
    j["width"] = r.width;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["smooth"] = r.smooth;
    j["vim_threshold"] = r.vim_threshold;
    j["mismatch_bound"] = r.mismatch_bound;
    j["total_pixels"] = r.total_pixels;
    j["mismatching_pixels"] = r.mismatching_pixels;
    j["mismatch_fraction"] = r.mismatch_fraction;
    j["present_classes_mean"] = r.present_classes_mean;
    j["soundness_violations"] = r.soundness_violations;
    j["passed"] = r.passed;
    j["trials_detail"] = json::array();
    for (const VerifyTrial& t : r.trials_detail) {
        j["trials_detail"].push_back({{"trial", t.trial},
                                      {"present_classes", t.present_classes},
                                      {"mismatching_pixels", t.mismatching_pixels},
                                      {"mismatch_fraction", t.mismatch_fraction}});
    }
    return j.dump(2) + "\n";
}

std::string verify_report_csv(const VerifyReport& r) {
    std::string out = "trial,present_classes,mismatching_pixels,total_pixels,mismatch_fraction\n";
    const std::uint64_t per_trial = static_cast<std::uint64_t>(r.height) * r.width;
    for (const VerifyTrial& t : r.trials_detail) {
        out += std::to_string(t.trial) + "," + std::to_string(t.present_classes) + "," +
               std::to_string(t.mismatching_pixels) + "," + std::to_string(per_trial) + "," +
               std::to_string(t.mismatch_fraction) + "\n";
    }
    return out;
}

SweepReport run_vim_sweep(const SweepOptions& opt) {
    if (opt.height % 8 != 0 || opt.width % 8 != 0) {
        throw ConfigError("sweep dims must be multiples of 8");
    }
    if (opt.repeat < 1) {
        throw ConfigError("repeat must be >= 1");
    }
    SweepReport report;
    report.classes = opt.classes;
    report.height = opt.height;
    report.width = opt.width;
    report.interp = interp_to_string(opt.interp);
    report.repeat = opt.repeat;
    report.seed = opt.seed;

    VimConfig vim_cfg;
    vim_cfg.interp = opt.interp;

    const int lh = opt.height / 8;
    const int lw = opt.width / 8;
    for (int target : opt.targets) {
        const Tensor logits =
            strip_logits(opt.classes, target, lh, lw, opt.seed + static_cast<std::uint64_t>(target));
        SweepEntry entry;
        entry.target_classes = target;
        entry.present_classes = vim_channel_stats(logits).first;

        std::vector<double> naive_s, vim_s;
        for (int i = 0; i < opt.repeat; ++i) {
            const auto t0 = std::chrono::steady_clock::now();
            const IndexMap naive = naive_upsample_argmax(logits, opt.height, opt.width, opt.interp);
            const auto t1 = std::chrono::steady_clock::now();
            const IndexMap slim = vim_upsample_argmax(logits, opt.height, opt.width, vim_cfg);
            const auto t2 = std::chrono::steady_clock::now();
            naive_s.push_back(std::chrono::duration<double>(t1 - t0).count());
            vim_s.push_back(std::chrono::duration<double>(t2 - t1).count());
        }
        entry.naive_ms = median(naive_s) * 1e3;
        entry.vim_ms = median(vim_s) * 1e3;
        entry.speedup = entry.vim_ms > 0.0 ? entry.naive_ms / entry.vim_ms : 0.0;
        report.entries.push_back(entry);
    }
    return report;
}

std::string sweep_report_json(const SweepReport& r) {
    json j;
    j["command"] = "vim_sweep";
    j["classes"] = r.classes;
    j["height"] = r.height;
    j["width"] = r.width;
    j["interp"] = r.interp;
    j["repeat"] = r.repeat;
    j["seed"] = r.seed;
    j["entries"] = json::array();
    for (const SweepEntry& e : r.entries) {
        j["entries"].push_back({{"target_classes", e.target_classes},
                                {"present_classes", e.present_classes},
                                {"naive_ms", e.naive_ms},
                                {"vim_ms", e.vim_ms},
                                {"speedup", e.speedup}});
    }
    return j.dump(2) + "\n";
}

std::string sweep_report_csv(const SweepReport& r) {
    std::string out = "target_classes,present_classes,naive_ms,vim_ms,speedup\n";
    for (const SweepEntry& e : r.entries) {
        out += std::to_string(e.target_classes) + "," + std::to_string(e.present_classes) + "," +
               std::to_string(e.naive_ms) + "," + std::to_string(e.vim_ms) + "," +
               std::to_string(e.speedup) + "\n";
    }
    return out;
}

}  // namespace ppms
