#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace sigflow {

// Flat "key = value" file with '#' comments; no sections, no nesting.
class Config {
public:
    static Config load(const std::filesystem::path& file);
    static Config from_string(const std::string& text, const std::string& name = "<string>");

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;

    // Keys present in the file but never read; surfaced as typo warnings.
    std::vector<std::string> unused_keys() const;

private:
    std::string name_;
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

}  // namespace sigflow
