// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot kernels and the two upsample pipelines.
// Run: ./ppms_benchmarks [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include "ppms/backbone.hpp"
#include "ppms/bench.hpp"
#include "ppms/kernels.hpp"
#include "ppms/rng.hpp"
#include "ppms/vim.hpp"

using namespace ppms;

namespace {

Tensor rand_tensor(int n, int c, int h, int w, std::uint64_t seed) {
    Tensor t(n, c, h, w);
    Rng rng(seed);
    for (float& v : t.data) v = rng.uniform(-1.0f, 1.0f);
    return t;
}

ConvSpec spec(int in_c, int out_c, int k, int stride, int groups = 1) {
    ConvSpec s;
    s.in_channels = in_c;
    s.out_channels = out_c;
    s.kh = s.kw = k;
    s.sh = s.sw = stride;
    s.ph = s.pw = k / 2;
    s.groups = groups;
    return s;
}

void BM_Conv3x3(benchmark::State& state) {
    const int c = static_cast<int>(state.range(0));
    const Tensor x = rand_tensor(1, c, 56, 56, 1);
    const Tensor w = rand_tensor(c, c, 3, 3, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(conv2d(x, w, {}, spec(c, c, 3, 1)));
    }
}
BENCHMARK(BM_Conv3x3)->Arg(16)->Arg(64);

void BM_Conv1x1(benchmark::State& state) {
    const int c = static_cast<int>(state.range(0));
    const Tensor x = rand_tensor(1, c, 64, 64, 3);
    const Tensor w = rand_tensor(c, c, 1, 1, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(conv2d(x, w, {}, spec(c, c, 1, 1)));
    }
}
BENCHMARK(BM_Conv1x1)->Arg(64)->Arg(256);

void BM_DepthwiseConv(benchmark::State& state) {
    const int c = static_cast<int>(state.range(0));
    const Tensor x = rand_tensor(1, c, 56, 56, 5);
    const Tensor w = rand_tensor(c, 1, 3, 3, 6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(depthwise_conv2d(x, w, {}, spec(c, c, 3, 1, c)));
    }
}
BENCHMARK(BM_DepthwiseConv)->Arg(64)->Arg(256);

void BM_ResizeBilinear(benchmark::State& state) {
    const Tensor x = rand_tensor(1, static_cast<int>(state.range(0)), 64, 64, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(resize(x, 512, 512, Interp::bilinear));
    }
}
BENCHMARK(BM_ResizeBilinear)->Arg(10)->Arg(150);

void BM_ArgmaxChannel(benchmark::State& state) {
    const Tensor x = rand_tensor(1, static_cast<int>(state.range(0)), 512, 512, 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(argmax_channel(x));
    }
}
BENCHMARK(BM_ArgmaxChannel)->Arg(10)->Arg(150);

void BM_UpsampleArgmaxNaive(benchmark::State& state) {
    const Tensor logits = strip_logits(150, static_cast<int>(state.range(0)), 64, 64, 9);
    for (auto _ : state) {
        benchmark::DoNotOptimize(naive_upsample_argmax(logits, 512, 512, Interp::bilinear));
    }
}
BENCHMARK(BM_UpsampleArgmaxNaive)->Arg(10);

void BM_UpsampleArgmaxSlim(benchmark::State& state) {
    const Tensor logits = strip_logits(150, static_cast<int>(state.range(0)), 64, 64, 9);
    const VimConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(vim_upsample_argmax(logits, 512, 512, cfg));
    }
}
BENCHMARK(BM_UpsampleArgmaxSlim)->Arg(1)->Arg(10)->Arg(50);

void BM_SeaAttention(benchmark::State& state) {
    AttentionConfig cfg{4, 16, 1, 64};
    WeightStore ws;
    auto put_conv = [&ws](const std::string& base, int out_c, int in_cpg, int k,
                          std::uint64_t seed) {
        WeightEntry w;
        w.dims = {static_cast<std::uint32_t>(out_c), static_cast<std::uint32_t>(in_cpg),
                  static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k)};
        Rng rng(seed);
        for (std::uint64_t i = 0; i < w.numel(); ++i) w.data.push_back(rng.uniform(-0.1f, 0.1f));
        ws.put(base + ".weight", std::move(w));
        WeightEntry scale, shift;
        scale.dims = shift.dims = {static_cast<std::uint32_t>(out_c)};
        scale.data.assign(out_c, 1.0f);
        shift.data.assign(out_c, 0.0f);
        ws.put(base + "_bn.scale", std::move(scale));
        ws.put(base + "_bn.shift", std::move(shift));
    };
    const int hk = cfg.heads * cfg.key_dim;
    put_conv("a.q", hk, 64, 1, 1);
    put_conv("a.k", hk, 64, 1, 2);
    put_conv("a.v", hk, 64, 1, 3);
    put_conv("a.proj", 64, hk, 1, 4);
    put_conv("a.detail_dw", 3 * hk, 1, 3, 5);
    put_conv("a.detail_pw", 64, 3 * hk, 1, 6);
    const Tensor x = rand_tensor(1, 64, 16, 16, 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sea_attention_block(x, cfg, ws, "a"));
    }
}
BENCHMARK(BM_SeaAttention);

}  // namespace

BENCHMARK_MAIN();
