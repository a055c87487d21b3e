#include "playlab/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "playlab/error.hpp"

namespace playlab {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

void ConfigMap::parse_into(ConfigMap& map, const std::string& text, const std::string& path,
                           int depth) {
    if (depth > 16) throw ConfigError(path + ": include depth limit exceeded");
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string origin = path + ":" + std::to_string(line_no);
        const size_t comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(origin + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(origin + ": empty section name");
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(origin + ": empty key");

        if (key == "include" && section.empty()) {
            const std::filesystem::path base = std::filesystem::path(path).parent_path();
            const std::string target = (base / value).string();
            parse_into(map, read_file(target), target, depth + 1);
            continue;
        }
        map.sections_[section][key] = Entry{value, origin};
    }
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
    ConfigMap map;
    parse_into(map, read_file(path), path, 0);
    return map;
}

ConfigMap ConfigMap::parse_string(const std::string& text, const std::string& virtual_path) {
    ConfigMap map;
    parse_into(map, text, virtual_path, 0);
    return map;
}

bool ConfigMap::has(const std::string& section, const std::string& key) const {
    const auto sec = sections_.find(section);
    return sec != sections_.end() && sec->second.count(key) > 0;
}

void ConfigMap::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = Entry{value, "<override>"};
}

const ConfigMap::Entry* ConfigMap::find(const std::string& section, const std::string& key) const {
    const auto sec = sections_.find(section);
    if (sec == sections_.end()) return nullptr;
    const auto it = sec->second.find(key);
    if (it == sec->second.end()) return nullptr;
    consumed_[section + "." + key] = true;
    return &it->second;
}

void ConfigMap::type_error(const Entry& entry, const std::string& section, const std::string& key,
                           const std::string& wanted) {
    throw ConfigError(entry.origin + ": value '" + entry.value + "' for [" + section + "] " + key +
                      " is not a valid " + wanted);
}

std::string ConfigMap::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
}

double ConfigMap::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    try {
        size_t pos = 0;
        const double v = std::stod(e->value, &pos);
        if (pos != e->value.size()) type_error(*e, section, key, "number");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        type_error(*e, section, key, "number");
    }
}

int64_t ConfigMap::get_int(const std::string& section, const std::string& key,
                           int64_t fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    int64_t v = 0;
    const auto res = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
    if (res.ec != std::errc{} || res.ptr != e->value.data() + e->value.size())
        type_error(*e, section, key, "integer");
    return v;
}

uint64_t ConfigMap::get_u64(const std::string& section, const std::string& key,
                            uint64_t fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    uint64_t v = 0;
    const auto res = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
    if (res.ec != std::errc{} || res.ptr != e->value.data() + e->value.size())
        type_error(*e, section, key, "unsigned integer");
    return v;
}

bool ConfigMap::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
    if (e->value == "false" || e->value == "0" || e->value == "no") return false;
    type_error(*e, section, key, "boolean (true/false)");
}

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& raw, Parse parse_one, bool* ok) {
    std::vector<T> out;
    std::istringstream ss(raw);
    std::string item;
    *ok = true;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        T v{};
        if (!parse_one(item, &v)) {
            *ok = false;
            return out;
        }
        out.push_back(v);
    }
    return out;
}

} // namespace

std::vector<int> ConfigMap::get_int_list(const std::string& section, const std::string& key,
                                         const std::vector<int>& fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    bool ok = false;
    auto out = parse_list<int>(
        e->value,
        [](const std::string& s, int* v) {
            const auto res = std::from_chars(s.data(), s.data() + s.size(), *v);
            return res.ec == std::errc{} && res.ptr == s.data() + s.size();
        },
        &ok);
    if (!ok || out.empty()) type_error(*e, section, key, "comma-separated integer list");
    return out;
}

std::vector<uint64_t> ConfigMap::get_u64_list(const std::string& section, const std::string& key,
                                              const std::vector<uint64_t>& fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    bool ok = false;
    auto out = parse_list<uint64_t>(
        e->value,
        [](const std::string& s, uint64_t* v) {
            const auto res = std::from_chars(s.data(), s.data() + s.size(), *v);
            return res.ec == std::errc{} && res.ptr == s.data() + s.size();
        },
        &ok);
    if (!ok || out.empty()) type_error(*e, section, key, "comma-separated integer list");
    return out;
}

std::string ConfigMap::dump() const {
    std::ostringstream out;
    for (const auto& [section, entries] : sections_) {
        out << "[" << section << "]\n";
        for (const auto& [key, entry] : entries) out << key << " = " << entry.value << "\n";
        out << "\n";
    }
    return out.str();
}

std::vector<std::string> ConfigMap::unconsumed() const {
    std::vector<std::string> out;
    for (const auto& [section, entries] : sections_)
        for (const auto& [key, entry] : entries) {
            const std::string id = section + "." + key;
            if (!consumed_.count(id)) out.push_back(entry.origin + ": unknown key [" + section +
                                                    "] " + key);
        }
    return out;
}

} // namespace playlab
