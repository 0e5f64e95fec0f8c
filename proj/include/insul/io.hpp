#pragma once

// Run manifests and report serialization. Every CLI command freezes its
// resolved configuration, input hashes, and seed into a manifest so a run can
// be replayed bit-for-bit.

#include <chrono>
#include <fstream>
#include <map>

#include <json.hpp>

#include "insul/common.hpp"

namespace insul {

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string file_hash_hex(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot hash missing file: " + path);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char buf[1 << 16];
    while (f) {
        f.read(buf, sizeof(buf));
        h = fnv1a(buf, static_cast<std::size_t>(f.gcount()), h);
    }
    return hash_hex(h);
}

struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config;
    std::map<std::string, std::string> input_hashes;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
    std::map<std::string, double> timings;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["config"] = config;
        j["input_hashes"] = input_hashes;
        j["seed"] = seed;
        j["outputs"] = outputs;
        j["timings"] = timings;
        return j;
    }

    void write(const std::string& path) const {
        std::ofstream f(path);
        if (!f) throw Error("cannot write manifest: " + path);
        f << to_json().dump(2) << "\n";
    }
};

class PhaseTimer {
public:
    explicit PhaseTimer(RunManifest& m, std::string phase)
        : manifest_(m), phase_(std::move(phase)), start_(std::chrono::steady_clock::now()) {}

    ~PhaseTimer() {
        const auto end = std::chrono::steady_clock::now();
        manifest_.timings[phase_] = std::chrono::duration<double>(end - start_).count();
    }

private:
    RunManifest& manifest_;
    std::string phase_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace insul
