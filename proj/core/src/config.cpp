// SPDX-License-Identifier: Apache-2.0
#include "ppms/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace ppms {

namespace {

MV3BlockConfig mv3(int in, int expand, int out, int kernel, int stride, bool se, Act act) {
    return MV3BlockConfig{in, expand, out, kernel, stride, se, act};
}

}  // namespace

VariantConfig VariantConfig::tiny(int num_classes) {
    VariantConfig cfg;
    cfg.name = "tiny";
    cfg.stem = StemConfig{16, 3, 2, Act::hardswish};
    cfg.stages[0] = {
        mv3(16, 64, 24, 3, 2, false, Act::relu),
        mv3(24, 72, 24, 3, 1, false, Act::relu),
        mv3(24, 72, 24, 3, 1, false, Act::relu),
    };
    cfg.stages[1] = {
        mv3(24, 72, 32, 5, 2, true, Act::relu),
        mv3(32, 96, 32, 5, 1, true, Act::relu),
        mv3(32, 96, 32, 5, 1, true, Act::relu),
    };
    cfg.stages[2] = {
        mv3(32, 128, 64, 3, 2, false, Act::hardswish),
        mv3(64, 192, 64, 3, 1, true, Act::hardswish),
        mv3(64, 192, 64, 3, 1, true, Act::hardswish),
        mv3(64, 192, 64, 3, 1, true, Act::hardswish),
    };
    cfg.stages[3] = {
        mv3(64, 256, 128, 5, 2, true, Act::hardswish),
        mv3(128, 384, 128, 5, 1, true, Act::hardswish),
        mv3(128, 384, 128, 5, 1, true, Act::hardswish),
        mv3(128, 384, 128, 5, 1, true, Act::hardswish),
        mv3(128, 384, 128, 5, 1, true, Act::hardswish),
    };
    cfg.attn3 = AttentionConfig{4, 16, 2, 64};
    cfg.attn4 = AttentionConfig{4, 16, 2, 128};
    cfg.fusion = FusionConfig{};
    cfg.fusion.num_classes = num_classes;
    cfg.vim = VimConfig{};
    return cfg;
}

VariantConfig VariantConfig::base(int num_classes) {
    VariantConfig cfg;
    cfg.name = "base";
    cfg.stem = StemConfig{24, 3, 2, Act::hardswish};
    cfg.stages[0] = {
        mv3(24, 96, 32, 3, 2, false, Act::relu),
        mv3(32, 112, 32, 3, 1, false, Act::relu),
        mv3(32, 112, 32, 3, 1, false, Act::relu),
    };
    cfg.stages[1] = {
        mv3(32, 112, 64, 5, 2, true, Act::relu),
        mv3(64, 160, 64, 5, 1, true, Act::relu),
        mv3(64, 160, 64, 5, 1, true, Act::relu),
    };
    cfg.stages[2] = {
        mv3(64, 256, 128, 3, 2, false, Act::hardswish),
        mv3(128, 512, 128, 3, 1, true, Act::hardswish),
        mv3(128, 512, 128, 3, 1, true, Act::hardswish),
        mv3(128, 512, 128, 3, 1, true, Act::hardswish),
    };
    cfg.stages[3] = {
        mv3(128, 640, 192, 5, 2, true, Act::hardswish),
        mv3(192, 800, 192, 5, 1, true, Act::hardswish),
        mv3(192, 800, 192, 5, 1, true, Act::hardswish),
        mv3(192, 800, 192, 5, 1, true, Act::hardswish),
        mv3(192, 800, 192, 5, 1, true, Act::hardswish),
    };
    cfg.attn3 = AttentionConfig{8, 24, 3, 128};
    cfg.attn4 = AttentionConfig{8, 24, 3, 192};
    cfg.fusion = FusionConfig{};
    cfg.fusion.num_classes = num_classes;
    cfg.vim = VimConfig{};
    return cfg;
}

VariantConfig variant_by_name(const std::string& name, int num_classes) {
    if (name == "tiny") return VariantConfig::tiny(num_classes);
    if (name == "base") return VariantConfig::base(num_classes);
    throw ConfigError("unknown variant: " + name + " (expected tiny or base)");
}

void validate(const VariantConfig& cfg) {
    if (cfg.name != "tiny" && cfg.name != "base") {
        throw ConfigError("variant name must be tiny or base, got '" + cfg.name + "'");
    }
    if (cfg.stem.out_channels < 1 || cfg.stem.stride != 2 || cfg.stem.kernel % 2 == 0) {
        throw ConfigError("stem must be an odd-kernel stride-2 conv with >= 1 output channel");
    }
    int prev = cfg.stem.out_channels;
    for (std::size_t s = 0; s < cfg.stages.size(); ++s) {
        const auto& blocks = cfg.stages[s];
        if (blocks.empty()) {
            throw ConfigError("stage " + std::to_string(s + 1) + " has no blocks");
        }
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const MV3BlockConfig& blk = blocks[b];
            const std::string where =
                "stage " + std::to_string(s + 1) + " block " + std::to_string(b + 1);
            if (blk.stride != 1 && blk.stride != 2) {
                throw ConfigError(where + ": stride must be 1 or 2");
            }
            if (b == 0 && blk.stride != 2) {
                throw ConfigError(where + ": each stage must open with a stride-2 block");
            }
            if (b > 0 && blk.stride != 1) {
                throw ConfigError(where + ": only the first block of a stage may stride");
            }
            if (blk.in_channels != prev) {
                throw ConfigError(where + ": in_channels " + std::to_string(blk.in_channels) +
                                  " does not chain from previous " + std::to_string(prev));
            }
            if (blk.expand_channels < blk.in_channels || blk.out_channels < 1) {
                throw ConfigError(where + ": bad expand/out channels");
            }
            if (blk.kernel % 2 == 0 || blk.kernel < 1) {
                throw ConfigError(where + ": kernel must be odd");
            }
            prev = blk.out_channels;
        }
    }
    const int c3 = cfg.stages[2].back().out_channels;
    const int c4 = cfg.stages[3].back().out_channels;
    const bool tiny = cfg.name == "tiny";
    const int want_heads = tiny ? 4 : 8;
    const int want_blocks = tiny ? 2 : 3;
    const int want_c3 = tiny ? 64 : 128;
    const int want_c4 = tiny ? 128 : 192;
    if (c3 != want_c3 || c4 != want_c4) {
        throw ConfigError(cfg.name + " variant requires last-two-stage channels {" +
                          std::to_string(want_c3) + ", " + std::to_string(want_c4) + "}, got {" +
                          std::to_string(c3) + ", " + std::to_string(c4) + "}");
    }
    for (const auto* attn : {&cfg.attn3, &cfg.attn4}) {
        if (attn->heads != want_heads) {
            throw ConfigError(cfg.name + " variant requires " + std::to_string(want_heads) +
                              " attention heads");
        }
        if (attn->blocks != want_blocks) {
            throw ConfigError(cfg.name + " variant requires " + std::to_string(want_blocks) +
                              "/" + std::to_string(want_blocks) + " attention blocks");
        }
        if (attn->key_dim < 1) {
            throw ConfigError("attention key_dim must be >= 1");
        }
        if (attn->channels % attn->heads != 0) {
            throw ConfigError("attention channels must be divisible by heads");
        }
    }
    if (cfg.attn3.channels != c3 || cfg.attn4.channels != c4) {
        throw ConfigError("attention channels must match the owning stage's output channels");
    }
    if (cfg.fusion.embed_channels != 256) {
        throw ConfigError("fusion embed_channels is fixed to 256 for shipped variants");
    }
    if (cfg.fusion.num_classes < 2) {
        throw ConfigError("num_classes must be >= 2");
    }
    if (cfg.vim.class_threshold < 1) {
        throw ConfigError("vim class_threshold must be >= 1");
    }
}

namespace {

std::string bool_str(bool b) { return b ? "true" : "false"; }

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("bad boolean for " + key + ": " + v);
}

int parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const int n = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("bad integer for " + key + ": " + v);
    }
}

float parse_float(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const float f = std::stof(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return f;
    } catch (const std::exception&) {
        throw ConfigError("bad number for " + key + ": " + v);
    }
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

using Section = std::map<std::string, std::string>;

}  // namespace

std::string format_variant_config(const VariantConfig& cfg) {
    std::ostringstream out;
    out << "# PP-MobileSeg variant configuration\n";
    out << "[variant]\n";
    out << "name = " << cfg.name << "\n\n";
    out << "[stem]\n";
    out << "out_channels = " << cfg.stem.out_channels << "\n";
    out << "kernel = " << cfg.stem.kernel << "\n";
    out << "stride = " << cfg.stem.stride << "\n";
    out << "activation = " << act_to_string(cfg.stem.act) << "\n";
    for (std::size_t s = 0; s < cfg.stages.size(); ++s) {
        for (std::size_t b = 0; b < cfg.stages[s].size(); ++b) {
            const MV3BlockConfig& blk = cfg.stages[s][b];
            out << "\n[stage" << (s + 1) << ".block" << (b + 1) << "]\n";
            out << "in_channels = " << blk.in_channels << "\n";
            out << "expand_channels = " << blk.expand_channels << "\n";
            out << "out_channels = " << blk.out_channels << "\n";
            out << "kernel = " << blk.kernel << "\n";
            out << "stride = " << blk.stride << "\n";
            out << "se = " << bool_str(blk.use_se) << "\n";
            out << "activation = " << act_to_string(blk.act) << "\n";
        }
    }
    const auto put_attn = [&out](const char* section, const AttentionConfig& a) {
        out << "\n[" << section << "]\n";
        out << "heads = " << a.heads << "\n";
        out << "key_dim = " << a.key_dim << "\n";
        out << "blocks = " << a.blocks << "\n";
        out << "channels = " << a.channels << "\n";
    };
    put_attn("attention.stage3", cfg.attn3);
    put_attn("attention.stage4", cfg.attn4);
    out << "\n[fusion]\n";
    out << "embed_channels = " << cfg.fusion.embed_channels << "\n";
    out << "num_classes = " << cfg.fusion.num_classes << "\n";
    out << "dropout_rate = " << cfg.fusion.dropout_rate << "\n";
    out << "ensemble_vote = " << bool_str(cfg.fusion.ensemble_vote) << "\n";
    out << "final_semantics = " << bool_str(cfg.fusion.final_semantics) << "\n";
    out << "\n[vim]\n";
    out << "class_threshold = " << cfg.vim.class_threshold << "\n";
    out << "interp = " << interp_to_string(cfg.vim.interp) << "\n";
    return out.str();
}

VariantConfig parse_variant_config(const std::string& text) {
    std::map<std::string, Section> sections;
    std::vector<std::string> order;
    std::string current;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            }
            current = trim(line.substr(1, line.size() - 2));
            if (current.empty()) {
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            }
            if (!sections.count(current)) order.push_back(current);
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        if (current.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        }
        if (sections[current].count(key)) {
            throw ConfigError("duplicate key " + key + " in [" + current + "]");
        }
        sections[current][key] = value;
    }

    auto take = [&sections](const std::string& section, const std::string& key) {
        auto sit = sections.find(section);
        if (sit == sections.end()) {
            throw ConfigError("missing section [" + section + "]");
        }
        auto kit = sit->second.find(key);
        if (kit == sit->second.end()) {
            throw ConfigError("missing key " + key + " in [" + section + "]");
        }
        const std::string v = kit->second;
        sit->second.erase(kit);
        return v;
    };

    VariantConfig cfg;
    cfg.name = take("variant", "name");
    cfg.stem.out_channels = parse_int(take("stem", "out_channels"), "stem.out_channels");
    cfg.stem.kernel = parse_int(take("stem", "kernel"), "stem.kernel");
    cfg.stem.stride = parse_int(take("stem", "stride"), "stem.stride");
    cfg.stem.act = act_from_string(take("stem", "activation"));

    for (int s = 1; s <= 4; ++s) {
        for (int b = 1;; ++b) {
            const std::string section =
                "stage" + std::to_string(s) + ".block" + std::to_string(b);
            if (!sections.count(section)) break;
            MV3BlockConfig blk;
            blk.in_channels = parse_int(take(section, "in_channels"), section);
            blk.expand_channels = parse_int(take(section, "expand_channels"), section);
            blk.out_channels = parse_int(take(section, "out_channels"), section);
            blk.kernel = parse_int(take(section, "kernel"), section);
            blk.stride = parse_int(take(section, "stride"), section);
            blk.use_se = parse_bool(take(section, "se"), section);
            blk.act = act_from_string(take(section, "activation"));
            cfg.stages[static_cast<std::size_t>(s - 1)].push_back(blk);
        }
    }

    const auto take_attn = [&](const std::string& section) {
        AttentionConfig a;
        a.heads = parse_int(take(section, "heads"), section);
        a.key_dim = parse_int(take(section, "key_dim"), section);
        a.blocks = parse_int(take(section, "blocks"), section);
        a.channels = parse_int(take(section, "channels"), section);
        return a;
    };
    cfg.attn3 = take_attn("attention.stage3");
    cfg.attn4 = take_attn("attention.stage4");

    cfg.fusion.embed_channels = parse_int(take("fusion", "embed_channels"), "fusion.embed_channels");
    cfg.fusion.num_classes = parse_int(take("fusion", "num_classes"), "fusion.num_classes");
    cfg.fusion.dropout_rate = parse_float(take("fusion", "dropout_rate"), "fusion.dropout_rate");
    cfg.fusion.ensemble_vote = parse_bool(take("fusion", "ensemble_vote"), "fusion.ensemble_vote");
    cfg.fusion.final_semantics =
        parse_bool(take("fusion", "final_semantics"), "fusion.final_semantics");
    cfg.vim.class_threshold = parse_int(take("vim", "class_threshold"), "vim.class_threshold");
    cfg.vim.interp = interp_from_string(take("vim", "interp"));

    for (const std::string& name : order) {
        if (!sections[name].empty()) {
            throw ConfigError("unknown key '" + sections[name].begin()->first + "' in [" + name +
                              "]");
        }
    }
    return cfg;
}

VariantConfig load_variant_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw IoError("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_variant_config(buf.str());
}

void save_variant_config(const VariantConfig& cfg, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) {
        throw IoError("cannot open for writing: " + path);
    }
    f << format_variant_config(cfg);
    if (!f) {
        throw IoError("write error on config file: " + path);
    }
}

}  // namespace ppms
