#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "quadcorr/errors.hpp"
#include "quadcorr/simulator.hpp"

namespace quadcorr {

// Flat key=value text with optional [section] headers; a section prefixes
// the keys below it as "section.key".  '#' and ';' start comments.  The same
// grammar covers run configs and the key=value analysis reports.
struct ConfigFile {
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;  // InvalidConfig
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
};

ConfigFile parse_config(std::istream& in);
ConfigFile parse_config_file(const std::string& path);

// Builds a simulator config from the [source]/[waveform]/[background]/
// [detector]/[run] sections; unknown keys are rejected so typos cannot
// silently fall back to defaults.
SimConfig sim_config_from(const ConfigFile& file);

void write_sim_config(std::ostream& os, const SimConfig& cfg);

}  // namespace quadcorr
