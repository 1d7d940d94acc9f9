#include "quadcorr/report.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <vector>

#include "quadcorr/errors.hpp"

namespace quadcorr {

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open: " + path);
    std::vector<unsigned char> buf(std::size_t{8} << 20);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (;;) {
        const std::size_t got = std::fread(buf.data(), 1, buf.size(), f);
        if (got > 0) h = fnv1a64(buf.data(), got, h);
        if (got < buf.size()) {
            if (std::ferror(f)) {
                std::fclose(f);
                throw IoError("read failed: " + path);
            }
            break;
        }
    }
    std::fclose(f);
    return h;
}

std::string hex_digest(std::uint64_t digest) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << digest;
    return os.str();
}

void RunManifest::add(const std::string& key, const std::string& value) {
    entries.emplace_back(key, value);
}

void RunManifest::add(const std::string& key, double value) {
    std::ostringstream os;
    os << std::setprecision(17) << value;
    entries.emplace_back(key, os.str());
}

void RunManifest::add_u64(const std::string& key, std::uint64_t value) {
    entries.emplace_back(key, std::to_string(value));
}

void RunManifest::write(std::ostream& os) const {
    os << "subcommand = " << subcommand << "\n";
    os << "tool_version = " << kToolVersion << "\n";
    for (const auto& [key, value] : entries) {
        os << key << " = " << value << "\n";
    }
}

void RunManifest::write_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    write(os);
    os.flush();
    if (!os) throw IoError("write failed: " + path);
}

}  // namespace quadcorr
