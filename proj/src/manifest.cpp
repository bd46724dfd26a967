#include "modal_stream/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "modal_stream/errors.hpp"

namespace modal_stream {

using ordered_json = nlohmann::ordered_json;

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string RunManifest::to_json() const {
    ordered_json j;
    j["run_id"] = run_id;
    j["fixture"] = fixture;
    j["seed"] = seed;
    j["content_hash"] = content_hash;
    j["status"] = status;
    j["config"] = ordered_json::object();
    for (const auto& [k, v] : config) j["config"][k] = v;
    j["files"] = files;
    j["timings_ms"] = ordered_json::object();
    for (const auto& [k, v] : timings_ms) j["timings_ms"][k] = v;
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(std::string("manifest parse failure: ") + e.what());
    }
    RunManifest m;
    m.run_id = j.value("run_id", "");
    m.fixture = j.value("fixture", "");
    m.seed = j.value("seed", 0ull);
    m.content_hash = j.value("content_hash", "");
    m.status = j.value("status", "");
    if (j.contains("config")) {
        for (const auto& [k, v] : j["config"].items()) m.config[k] = v.get<std::string>();
    }
    if (j.contains("files")) m.files = j["files"].get<std::vector<std::string>>();
    if (j.contains("timings_ms")) {
        for (const auto& [k, v] : j["timings_ms"].items()) m.timings_ms[k] = v.get<double>();
    }
    return m;
}

void RunManifest::write(const std::string& path) const {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write " + tmp);
        out << to_json();
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace modal_stream
