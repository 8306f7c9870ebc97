#include "sigflow/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sigflow {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& name, const std::string& key, const std::string& what) {
    throw std::runtime_error(name + ": key '" + key + "' " + what);
}

}  // namespace

Config Config::from_string(const std::string& text, const std::string& name) {
    Config cfg;
    cfg.name_ = name;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(name + ":" + std::to_string(line_no) +
                                     ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(name + ":" + std::to_string(line_no) + ": empty key");
        if (!cfg.values_.emplace(key, value).second)
            throw std::runtime_error(name + ":" + std::to_string(line_no) + ": duplicate key '" +
                                     key + "'");
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open config file " + file.string());
    std::ostringstream text;
    text << in.rdbuf();
    return from_string(text.str(), file.string());
}

bool Config::has(const std::string& key) const {
    used_.insert(key);
    return values_.count(key) > 0;
}

std::string Config::get_string(const std::string& key) const {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) fail(name_, key, "is required but missing");
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    used_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string text = get_string(key);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        fail(name_, key, "is not a number: '" + text + "'");
    return value;
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const {
    const std::string text = get_string(key);
    int value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        fail(name_, key, "is not an integer: '" + text + "'");
    return value;
}

int Config::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string text = get_string(key);
    std::uint64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        fail(name_, key, "is not an unsigned integer: '" + text + "'");
    return value;
}

std::vector<int> Config::get_int_list(const std::string& key,
                                      const std::vector<int>& fallback) const {
    if (!has(key)) return fallback;
    const std::string text = get_string(key);
    std::vector<int> values;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        int value = 0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), value);
        if (item.empty() || res.ec != std::errc{} || res.ptr != item.data() + item.size())
            fail(name_, key, "is not a comma-separated integer list: '" + text + "'");
        values.push_back(value);
    }
    if (values.empty()) fail(name_, key, "is empty");
    return values;
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> unused;
    for (const auto& [key, value] : values_)
        if (!used_.count(key)) unused.push_back(key);
    return unused;
}

}  // namespace sigflow
