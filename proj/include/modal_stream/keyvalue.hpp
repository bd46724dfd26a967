#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace modal_stream {

/// Flat key-value configuration: one `key = value` per line, '#' comments,
/// dotted keys, list values as whitespace- or comma-separated numbers.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key, const std::string& fallback = "") const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key) const;

    /// Later values win (CLI overrides file).
    void merge_from(const KeyValueConfig& overrides);

    /// Deterministic (sorted) rendering, reparseable by from_string.
    std::string to_string() const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace modal_stream
