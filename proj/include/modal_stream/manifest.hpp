#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace modal_stream {

/// Run metadata: written (status "running") before the pipeline starts and
/// finalized afterwards. Everything except the timing block is
/// deterministic for a fixed (fixture, config, seed).
struct RunManifest {
    std::string run_id;
    std::string fixture;
    unsigned long long seed = 0;
    std::map<std::string, std::string> config;
    std::string content_hash;  // fnv1a-64 over fixture + canonical config
    std::vector<std::string> files;
    std::map<std::string, double> timings_ms;
    std::string status = "running";

    std::string to_json() const;
    static RunManifest from_json_file(const std::string& path);

    /// Atomic write (tmp + rename).
    void write(const std::string& path) const;
};

/// FNV-1a 64-bit over a byte string, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace modal_stream
