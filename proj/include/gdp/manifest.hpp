#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gdp/errors.hpp"
#include "gdp/rng.hpp"

namespace gdp {

inline constexpr const char* kToolVersion = "1.0.0";

inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("digest: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(ss.str())));
    return buf;
}

// Provenance record emitted alongside every output directory: re-running the
// recorded argv reproduces the outputs byte for byte.
struct RunManifest {
    std::string subcommand;
    std::vector<std::string> argv;
    std::uint64_t seed = 0;
    std::string input_digest;  // empty when the run reads no input file
    std::string version = kToolVersion;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["tool"] = "gdpshrink";
        j["version"] = version;
        j["subcommand"] = subcommand;
        j["argv"] = argv;
        j["seed"] = seed;
        j["input_digest"] = input_digest;
        return j;
    }

    static RunManifest from_json(const nlohmann::json& j) {
        RunManifest m;
        m.subcommand = j.at("subcommand").get<std::string>();
        m.argv = j.at("argv").get<std::vector<std::string>>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.input_digest = j.value("input_digest", "");
        m.version = j.value("version", "");
        return m;
    }

    void write(const std::filesystem::path& dir) const {
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        if (!out) throw DataError("manifest: cannot write to '" + dir.string() + "'");
        out << to_json().dump(2) << "\n";
    }

    static RunManifest load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("manifest: cannot open '" + path + "'");
        nlohmann::json j;
        in >> j;
        return from_json(j);
    }
};

}  // namespace gdp
