#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace liureg {

inline constexpr const char* kToolVersion = "0.1.0";

// Reproducibility metadata written alongside every output CSV: the
// exact resolved parameter set plus the master seed is enough to
// regenerate the file byte for byte.
struct RunManifest {
    std::string subcommand;
    std::uint64_t master_seed = 0;
    std::map<std::string, std::string> parameters;  // fully resolved config
    std::map<std::string, std::string> outputs;     // logical name -> path

    // Serializes to JSON and writes <path> atomically.
    void write(const std::string& path) const;
};

}  // namespace liureg
