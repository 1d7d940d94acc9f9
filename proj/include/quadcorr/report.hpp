#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace quadcorr {

inline constexpr const char* kToolVersion = "1.0.0";

// FNV-1a 64-bit content digest; streamed variant for large files.
std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64_file(const std::string& path);

std::string hex_digest(std::uint64_t digest);

// Run provenance record written next to every output: the subcommand, the
// resolved parameters, seeds, and input digests — enough to re-run the
// pipeline bit-identically.  Entries keep insertion order so two identical
// runs produce identical manifests.
struct RunManifest {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add_u64(const std::string& key, std::uint64_t value);

    void write(std::ostream& os) const;
    void write_file(const std::string& path) const;
};

}  // namespace quadcorr
