// SPDX-License-Identifier: Apache-2.0
//
// ppms: run PP-MobileSeg-family inference on the CPU, check the sparse-class
// upsampler against the dense baseline, count parameters, and produce
// per-phase latency profiles. Subcommands: infer, bench, verify, params,
// fixture.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ppms/bench.hpp"
#include "ppms/config.hpp"
#include "ppms/model.hpp"
#include "ppms/segmap_io.hpp"

namespace {

struct CommonOpts {
    std::string variant = "tiny";
    std::string config_path;
    int classes = 150;
    int vim_threshold = 30;
    std::string interp = "bilinear";
    bool classes_set = false;
    bool threshold_set = false;
    bool interp_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--variant", o.variant, "Model variant")
        ->check(CLI::IsMember({"tiny", "base"}))
        ->capture_default_str();
    cmd->add_option("--config", o.config_path, "Variant config file (overrides --variant)");
    cmd->add_option("--classes", o.classes, "Number of classes")
        ->check(CLI::PositiveNumber)
        ->capture_default_str()
        ->trigger_on_parse()
        ->each([&o](const std::string&) { o.classes_set = true; });
    cmd->add_option("--vim-threshold", o.vim_threshold,
                    "Class count below which the slim upsampler falls back")
        ->check(CLI::PositiveNumber)
        ->capture_default_str()
        ->each([&o](const std::string&) { o.threshold_set = true; });
    cmd->add_option("--interp", o.interp, "Interpolation mode")
        ->check(CLI::IsMember({"bilinear", "nearest"}))
        ->capture_default_str()
        ->each([&o](const std::string&) { o.interp_set = true; });
}

ppms::VariantConfig resolve_config(const CommonOpts& o) {
    ppms::VariantConfig cfg = o.config_path.empty()
                                  ? ppms::variant_by_name(o.variant, o.classes)
                                  : ppms::load_variant_config(o.config_path);
    if (o.config_path.empty() || o.classes_set) {
        cfg.fusion.num_classes = o.classes;
    }
    if (o.config_path.empty() || o.threshold_set) {
        cfg.vim.class_threshold = o.vim_threshold;
    }
    if (o.interp_set) {
        cfg.vim.interp = ppms::interp_from_string(o.interp);
    }
    ppms::validate(cfg);
    return cfg;
}

void emit_report(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(output_path, std::ios::trunc);
    if (!f) {
        throw ppms::IoError("cannot open for writing: " + output_path);
    }
    f << text;
}

int cmd_infer(const CommonOpts& common, const std::string& weights_path,
              const std::string& input_path, const std::string& output_path, bool use_vim) {
    const ppms::VariantConfig cfg = resolve_config(common);
    const ppms::WeightStore ws = ppms::load_weights(weights_path);
    ppms::validate_weights(cfg, ws);
    const ppms::Tensor image = ppms::load_input_tensor(input_path);

    ppms::VimStats stats;
    const ppms::IndexMap map = ppms::forward(image, cfg, ws, use_vim, nullptr, &stats);
    ppms::save_segmap(map, output_path);

    std::cerr << "wrote " << output_path << " (" << map.h << "x" << map.w << ")\n";
    if (use_vim && stats.fallback) {
        std::cerr << "note: slim upsample fallback engaged (classes " << cfg.fusion.num_classes
                  << " < threshold " << cfg.vim.class_threshold << "); naive path used\n";
    } else if (use_vim) {
        std::cerr << "slim upsample interpolated " << stats.channels_interpolated << " of "
                  << cfg.fusion.num_classes << " channels\n";
    }
    return 0;
}

int cmd_bench(const CommonOpts& common, const ppms::BenchOptions& opts, bool sweep,
              const std::string& format, const std::string& output_path) {
    if (sweep) {
        ppms::SweepOptions so;
        so.classes = common.classes;
        so.height = opts.height;
        so.width = opts.width;
        so.interp = ppms::interp_from_string(common.interp);
        so.repeat = opts.repeat;
        so.seed = opts.seed;
        const ppms::SweepReport report = ppms::run_vim_sweep(so);
        emit_report(format == "csv" ? ppms::sweep_report_csv(report)
                                    : ppms::sweep_report_json(report),
                    output_path);
        return 0;
    }
    const ppms::VariantConfig cfg = resolve_config(common);
    const ppms::ProfileReport report = ppms::run_bench(cfg, opts);
    emit_report(format == "csv" ? ppms::bench_report_csv(report) : ppms::bench_report_json(report),
                output_path);
    return 0;
}

int cmd_verify(const ppms::VerifyOptions& opts, const std::string& format,
               const std::string& output_path) {
    const ppms::VerifyReport report = ppms::run_verify(opts);
    emit_report(format == "csv" ? ppms::verify_report_csv(report)
                                : ppms::verify_report_json(report),
                output_path);
    return report.passed ? 0 : 1;
}

int cmd_params(const CommonOpts& common) {
    const ppms::VariantConfig cfg = resolve_config(common);
    const ppms::ParamReport report = ppms::count_params(cfg);
    std::printf("%-10s %12s\n", "module", "params");
    for (const auto& [name, count] : report.modules) {
        std::printf("%-10s %12llu\n", name.c_str(), static_cast<unsigned long long>(count));
    }
    std::printf("%-10s %12llu  (%.3fM)\n", "total",
                static_cast<unsigned long long>(report.total), report.total / 1e6);
    const double target = cfg.name == "tiny" ? 1.44e6 : 5.71e6;
    const double delta = 100.0 * (static_cast<double>(report.total) - target) / target;
    std::printf("target %.2fM, delta %+.1f%%\n", target / 1e6, delta);
    return 0;
}

int cmd_fixture(const CommonOpts& common, std::uint64_t seed, const std::string& weights_path,
                const std::string& input_path, int height, int width) {
    const ppms::VariantConfig cfg = resolve_config(common);
    if (!weights_path.empty()) {
        ppms::save_weights(ppms::random_init(cfg, seed), weights_path);
        std::cerr << "wrote " << weights_path << "\n";
    }
    if (!input_path.empty()) {
        const ppms::Tensor image =
            ppms::random_image(height, width, seed * 0x9e3779b97f4a7c15ull + 1);
        ppms::save_input_tensor(image, input_path);
        std::cerr << "wrote " << input_path << " (1x3x" << height << "x" << width << ")\n";
    }
    if (weights_path.empty() && input_path.empty()) {
        throw ppms::ConfigError("fixture: nothing to do, pass --weights and/or --input");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PP-MobileSeg CPU inference engine and benchmark harness"};
    app.require_subcommand(1);

    // infer
    CommonOpts infer_common;
    std::string infer_weights, infer_input, infer_output;
    bool infer_vim = true;
    CLI::App* infer = app.add_subcommand("infer", "Run inference on a stored input tensor");
    add_common(infer, infer_common);
    infer->add_option("--weights", infer_weights, "Weight container path")->required();
    infer->add_option("--input", infer_input, "Input tensor container path")->required();
    infer->add_option("--output", infer_output, "Output segmentation map path")->required();
    infer->add_flag("--vim,!--no-vim", infer_vim, "Use the slim upsampler")->capture_default_str();

    // bench
    CommonOpts bench_common;
    ppms::BenchOptions bench_opts;
    bool bench_vim = true;
    bool bench_sweep = false;
    std::string bench_format = "json", bench_output;
    CLI::App* bench = app.add_subcommand("bench", "Per-phase latency profile");
    add_common(bench, bench_common);
    bench->add_option("--height", bench_opts.height, "Input height")->capture_default_str();
    bench->add_option("--width", bench_opts.width, "Input width")->capture_default_str();
    bench->add_flag("--vim,!--no-vim", bench_vim, "Use the slim upsampler")->capture_default_str();
    bench->add_option("--warmup", bench_opts.warmup, "Unmeasured warmup runs")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    bench->add_option("--repeat", bench_opts.repeat, "Measured runs (medians reported)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench->add_option("--seed", bench_opts.seed, "Weight/input seed")->capture_default_str();
    bench->add_option("--report", bench_format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    bench->add_option("--output", bench_output, "Write the report here instead of stdout");
    bench->add_flag("--sweep-vim", bench_sweep,
                    "Time the upsample stage alone across present-class counts");

    // verify
    ppms::VerifyOptions verify_opts;
    CommonOpts verify_common;
    std::string verify_format = "json", verify_output;
    CLI::App* verify = app.add_subcommand("verify", "Check slim upsampling against the baseline");
    add_common(verify, verify_common);
    verify->add_option("--trials", verify_opts.trials, "Random trials")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    verify->add_option("--height", verify_opts.height, "Output height")->capture_default_str();
    verify->add_option("--width", verify_opts.width, "Output width")->capture_default_str();
    verify->add_option("--seed", verify_opts.seed, "Trial seed")->capture_default_str();
    verify->add_flag("--smooth", verify_opts.smooth, "5x5 box-filter the logits first");
    verify->add_option("--mismatch-bound", verify_opts.mismatch_bound,
                       "Acceptance bound on the bilinear mismatch fraction")
        ->capture_default_str();
    verify->add_option("--report", verify_format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    verify->add_option("--output", verify_output, "Write the report here instead of stdout");

    // params
    CommonOpts params_common;
    CLI::App* params = app.add_subcommand("params", "Per-module parameter counts");
    add_common(params, params_common);

    // fixture
    CommonOpts fixture_common;
    std::uint64_t fixture_seed = 42;
    std::string fixture_weights, fixture_input;
    int fixture_h = 512, fixture_w = 512;
    CLI::App* fixture =
        app.add_subcommand("fixture", "Write seeded random weight/input containers");
    add_common(fixture, fixture_common);
    fixture->add_option("--seed", fixture_seed, "Generator seed")->capture_default_str();
    fixture->add_option("--weights", fixture_weights, "Weight container to write");
    fixture->add_option("--input", fixture_input, "Input tensor container to write");
    fixture->add_option("--height", fixture_h, "Input height")->capture_default_str();
    fixture->add_option("--width", fixture_w, "Input width")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (infer->parsed()) {
            return cmd_infer(infer_common, infer_weights, infer_input, infer_output, infer_vim);
        }
        if (bench->parsed()) {
            bench_opts.use_vim = bench_vim;
            return cmd_bench(bench_common, bench_opts, bench_sweep, bench_format, bench_output);
        }
        if (verify->parsed()) {
            verify_opts.classes = verify_common.classes;
            verify_opts.interp = ppms::interp_from_string(verify_common.interp);
            verify_opts.vim_threshold = verify_common.vim_threshold;
            return cmd_verify(verify_opts, verify_format, verify_output);
        }
        if (params->parsed()) {
            return cmd_params(params_common);
        }
        if (fixture->parsed()) {
            return cmd_fixture(fixture_common, fixture_seed, fixture_weights, fixture_input,
                               fixture_h, fixture_w);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
