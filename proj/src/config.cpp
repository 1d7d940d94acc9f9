#include "quadcorr/config.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace quadcorr {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

bool ConfigFile::has(const std::string& key) const {
    return values.count(key) != 0;
}

const std::string& ConfigFile::get(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw InvalidConfig("missing config key: " + key);
    return it->second;
}

double ConfigFile::get_double(const std::string& key) const {
    const std::string& raw = get(key);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(raw, &used);
    } catch (const std::exception&) {
        throw InvalidConfig("key " + key + ": not a number: " + raw);
    }
    if (used != raw.size()) {
        throw InvalidConfig("key " + key + ": trailing junk in: " + raw);
    }
    return v;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t ConfigFile::get_u64(const std::string& key) const {
    const std::string& raw = get(key);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(raw, &used);
    } catch (const std::exception&) {
        throw InvalidConfig("key " + key + ": not an unsigned integer: " + raw);
    }
    if (used != raw.size()) {
        throw InvalidConfig("key " + key + ": trailing junk in: " + raw);
    }
    return static_cast<std::uint64_t>(v);
}

std::uint64_t ConfigFile::get_u64(const std::string& key,
                                  std::uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
}

ConfigFile parse_config(std::istream& in) {
    ConfigFile out;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw InvalidConfig("line " + std::to_string(lineno) +
                                    ": unterminated section header");
            }
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) {
                throw InvalidConfig("line " + std::to_string(lineno) +
                                    ": empty section name");
            }
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw InvalidConfig("line " + std::to_string(lineno) +
                                ": expected key = value");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw InvalidConfig("line " + std::to_string(lineno) +
                                ": empty key");
        }
        const std::string full = section.empty() ? key : section + "." + key;
        if (out.values.count(full)) {
            throw InvalidConfig("line " + std::to_string(lineno) +
                                ": duplicate key " + full);
        }
        out.values[full] = value;
    }
    return out;
}

ConfigFile parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    return parse_config(in);
}

SimConfig sim_config_from(const ConfigFile& file) {
    static const std::array<const char*, 19> kKnown{
        "source.g_p",          "source.g_q",
        "waveform.tau_c_ns",   "waveform.tau_0_ns",
        "waveform.tau_b_ns",   "background.bg_s",
        "background.bg_a",     "background.dark_1",
        "background.dark_2",   "background.dark_3",
        "background.dark_4",   "detector.eta_1",
        "detector.eta_2",      "detector.eta_3",
        "detector.eta_4",      "detector.dead_time_ticks",
        "run.duration_s",      "run.seed",
        "run.tick_ps",
    };
    for (const auto& [key, value] : file.values) {
        bool known = false;
        for (const char* k : kKnown) {
            if (key == k) {
                known = true;
                break;
            }
        }
        if (!known) throw InvalidConfig("unknown config key: " + key);
    }

    SimConfig cfg;
    cfg.g_p = file.get_double("source.g_p", cfg.g_p);
    cfg.g_q = file.get_double("source.g_q", cfg.g_q);
    cfg.tau_c_ns = file.get_double("waveform.tau_c_ns", cfg.tau_c_ns);
    cfg.tau_0_ns = file.get_double("waveform.tau_0_ns", cfg.tau_0_ns);
    cfg.tau_b_ns = file.get_double("waveform.tau_b_ns", cfg.tau_b_ns);
    cfg.bg_s = file.get_double("background.bg_s", cfg.bg_s);
    cfg.bg_a = file.get_double("background.bg_a", cfg.bg_a);
    for (int k = 0; k < 4; ++k) {
        cfg.dark[k] = file.get_double(
            "background.dark_" + std::to_string(k + 1), cfg.dark[k]);
        cfg.eta[k] = file.get_double("detector.eta_" + std::to_string(k + 1),
                                     cfg.eta[k]);
    }
    cfg.dead_time_ticks =
        file.get_u64("detector.dead_time_ticks", cfg.dead_time_ticks);
    cfg.duration_s = file.get_double("run.duration_s", cfg.duration_s);
    cfg.seed = file.get_u64("run.seed", cfg.seed);
    cfg.tick_ps = file.get_u64("run.tick_ps", cfg.tick_ps);
    return cfg;
}

void write_sim_config(std::ostream& os, const SimConfig& cfg) {
    os << std::setprecision(17);
    os << "[source]\n";
    os << "g_p = " << cfg.g_p << "\n";
    os << "g_q = " << cfg.g_q << "\n";
    os << "\n[waveform]\n";
    os << "tau_c_ns = " << cfg.tau_c_ns << "\n";
    os << "tau_0_ns = " << cfg.tau_0_ns << "\n";
    os << "tau_b_ns = " << cfg.tau_b_ns << "\n";
    os << "\n[background]\n";
    os << "bg_s = " << cfg.bg_s << "\n";
    os << "bg_a = " << cfg.bg_a << "\n";
    for (int k = 0; k < 4; ++k) {
        os << "dark_" << (k + 1) << " = " << cfg.dark[k] << "\n";
    }
    os << "\n[detector]\n";
    for (int k = 0; k < 4; ++k) {
        os << "eta_" << (k + 1) << " = " << cfg.eta[k] << "\n";
    }
    os << "dead_time_ticks = " << cfg.dead_time_ticks << "\n";
    os << "\n[run]\n";
    os << "duration_s = " << cfg.duration_s << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "tick_ps = " << cfg.tick_ps << "\n";
}

}  // namespace quadcorr
