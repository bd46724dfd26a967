#include "modal_stream/keyvalue.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "modal_stream/errors.hpp"

namespace modal_stream {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error("config line " + std::to_string(lineno) + " lacks '='");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw Error("config line " + std::to_string(lineno) + " has an empty key");
        cfg.entries_[key] = value;
    }
    return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    entries_[key] = value;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw Error("config key '" + key + "' is not a number: " + it->second);
    }
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        throw Error("config key '" + key + "' is not an integer: " + it->second);
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw Error("config key '" + key + "' is not a boolean: " + it->second);
}

std::vector<double> KeyValueConfig::get_list(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return {};
    std::string body = it->second;
    std::replace(body.begin(), body.end(), ',', ' ');
    std::istringstream in(body);
    std::vector<double> out;
    double v;
    while (in >> v) out.push_back(v);
    return out;
}

void KeyValueConfig::merge_from(const KeyValueConfig& overrides) {
    for (const auto& [k, v] : overrides.entries_) entries_[k] = v;
}

std::string KeyValueConfig::to_string() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

}  // namespace modal_stream
