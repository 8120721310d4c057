// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "ppms/segmap_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kBin = PPMS_CLI_BIN;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("ppms_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    const int status = std::system((kBin + " " + args).c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("fixture + infer: identical seeds give identical segmaps") {
    TempDir tmp;
    const std::string weights = tmp.file("w.ppms");
    const std::string input = tmp.file("in.ppms");
    REQUIRE(run("fixture --variant tiny --classes 40 --seed 42 --weights " + weights + " --input " +
                input + " --height 160 --width 160 2>/dev/null") == 0);

    const std::string out1 = tmp.file("a.ppsm");
    const std::string out2 = tmp.file("b.ppsm");
    const std::string base = "infer --variant tiny --classes 40 --weights " + weights +
                             " --input " + input + " --vim --output ";
    REQUIRE(run(base + out1 + " 2>/dev/null") == 0);
    REQUIRE(run(base + out2 + " 2>/dev/null") == 0);
    CHECK(slurp(out1) == slurp(out2));

    const ppms::IndexMap map = ppms::load_segmap(out1);
    CHECK(map.h == 160);
    CHECK(map.w == 160);
    for (std::int32_t v : map.data) {
        CHECK(v >= 0);
        CHECK(v < 40);
    }
}

TEST_CASE("missing weight file exits 2 and writes nothing") {
    TempDir tmp;
    const std::string out = tmp.file("never.ppsm");
    const int code = run("infer --variant tiny --weights " + tmp.file("absent.ppms") + " --input " +
                         tmp.file("absent_in.ppms") + " --output " + out + " 2>/dev/null");
    CHECK(code == 2);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("unknown variant exits 2") {
    CHECK(run("params --variant huge 2>/dev/null >/dev/null") == 2);
}

TEST_CASE("below-threshold class count reports the fallback on infer") {
    TempDir tmp;
    const std::string weights = tmp.file("w19.ppms");
    const std::string input = tmp.file("in19.ppms");
    REQUIRE(run("fixture --variant tiny --classes 19 --seed 7 --weights " + weights + " --input " +
                input + " --height 64 --width 64 2>/dev/null") == 0);
    const std::string log = tmp.file("stderr.txt");
    REQUIRE(run("infer --variant tiny --classes 19 --weights " + weights + " --input " + input +
                " --vim --output " + tmp.file("o.ppsm") + " 2>" + log) == 0);
    CHECK(slurp(log).find("fallback engaged") != std::string::npos);
}

TEST_CASE("verify subcommand emits a parseable report and a pass exit code") {
    TempDir tmp;
    const std::string report = tmp.file("verify.json");
    REQUIRE(run("verify --interp nearest --classes 150 --trials 3 --height 64 --width 64 "
                "--seed 5 --report json --output " +
                report + " 2>/dev/null") == 0);
    const json j = json::parse(slurp(report));
    CHECK(j["mode"] == "nearest");
    CHECK(j["mismatching_pixels"] == 0);
    CHECK(j["passed"] == true);

    // csv form: header plus one row per trial
    const std::string csv_path = tmp.file("verify.csv");
    REQUIRE(run("verify --interp nearest --classes 150 --trials 3 --height 64 --width 64 "
                "--report csv --output " +
                csv_path + " 2>/dev/null") == 0);
    const std::string csv = slurp(csv_path);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("bench subcommand reports five phases in both formats") {
    TempDir tmp;
    const std::string report = tmp.file("bench.json");
    REQUIRE(run("bench --variant tiny --classes 40 --height 64 --width 64 --warmup 0 --repeat 1 "
                "--seed 3 --report json --output " +
                report + " 2>/dev/null") == 0);
    const json j = json::parse(slurp(report));
    CHECK(j["phases"].size() == 5);
    double percent_sum = 0.0;
    for (const auto& p : j["phases"]) percent_sum += p["percent"].get<double>();
    CHECK(percent_sum > 99.9);
    CHECK(percent_sum < 100.1);

    const std::string csv_path = tmp.file("bench.csv");
    REQUIRE(run("bench --variant tiny --classes 40 --height 64 --width 64 --warmup 0 --repeat 1 "
                "--report csv --output " +
                csv_path + " 2>/dev/null") == 0);
    const std::string csv = slurp(csv_path);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("params prints totals against the published sizes") {
    TempDir tmp;
    const std::string out = tmp.file("params.txt");
    REQUIRE(run("params --variant tiny >" + out + " 2>/dev/null") == 0);
    const std::string text = slurp(out);
    CHECK(text.find("total") != std::string::npos);
    CHECK(text.find("target 1.44M") != std::string::npos);
    CHECK(text.find("delta") != std::string::npos);

    REQUIRE(run("params --variant base >" + out + " 2>/dev/null") == 0);
    CHECK(slurp(out).find("target 5.71M") != std::string::npos);
}

TEST_CASE("vim sweep mode emits the latency curve") {
    TempDir tmp;
    const std::string report = tmp.file("sweep.json");
    REQUIRE(run("bench --sweep-vim --classes 150 --height 128 --width 128 --repeat 1 "
                "--report json --output " +
                report + " 2>/dev/null") == 0);
    const json j = json::parse(slurp(report));
    CHECK(j["command"] == "vim_sweep");
    CHECK(j["entries"].size() == 5);
    CHECK(j["entries"][0]["target_classes"] == 1);
    CHECK(j["entries"][4]["target_classes"] == 50);
}
