#include "liureg/manifest.hpp"

#include <chrono>
#include <json.hpp>

#include "liureg/csvio.hpp"

namespace liureg {

void RunManifest::write(const std::string& path) const {
    nlohmann::json j;
    j["tool"] = "liureg";
    j["version"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["master_seed"] = master_seed;
    j["parameters"] = parameters;
    j["outputs"] = outputs;
    j["wall_clock_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace liureg
