#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace playlab {

// Sectioned key = value configuration text.
//
//   # comment
//   include = relative/other.cfg
//   [section]
//   key = value
//
// Includes are processed in place (relative to the including file); later
// assignments override earlier ones. Parse and type errors carry file:line.
class ConfigMap {
public:
    static ConfigMap parse_file(const std::string& path);
    static ConfigMap parse_string(const std::string& text, const std::string& virtual_path);

    bool has(const std::string& section, const std::string& key) const;
    void set(const std::string& section, const std::string& key, const std::string& value);

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int64_t get_int(const std::string& section, const std::string& key, int64_t fallback) const;
    uint64_t get_u64(const std::string& section, const std::string& key, uint64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<int> get_int_list(const std::string& section, const std::string& key,
                                  const std::vector<int>& fallback) const;
    std::vector<uint64_t> get_u64_list(const std::string& section, const std::string& key,
                                       const std::vector<uint64_t>& fallback) const;

    // Sorted canonical form, stable across runs.
    std::string dump() const;

    struct Entry {
        std::string value;
        std::string origin; // "file:line" for error messages
    };
    const std::map<std::string, std::map<std::string, Entry>>& sections() const {
        return sections_;
    }

    // Every key that was never consumed by a typed getter; used to reject
    // unknown keys with their origin line.
    std::vector<std::string> unconsumed() const;

private:
    const Entry* find(const std::string& section, const std::string& key) const;
    [[noreturn]] static void type_error(const Entry& entry, const std::string& section,
                                        const std::string& key, const std::string& wanted);

    std::map<std::string, std::map<std::string, Entry>> sections_;
    mutable std::map<std::string, bool> consumed_;

    static void parse_into(ConfigMap& map, const std::string& text, const std::string& path,
                           int depth);
};

} // namespace playlab
