#include "cavcool/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace cavcool {

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) return std::to_string(v);
    return std::string(buf, ptr);
}

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
    KeyValueFile kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        kv.set(key, trim(line.substr(eq + 1)));
    }
    return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
    if (!values_.count(key)) order_.push_back(key);
    values_[key] = value;
}

const std::string& KeyValueFile::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(origin_ + ": missing key '" + key + "'");
    return it->second;
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

std::pair<double, std::optional<std::string>> split_quantity(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    std::size_t consumed = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &consumed);
    } catch (const std::exception&) {
        throw ConfigError(where + ": '" + text + "' is not a number");
    }
    std::string rest = trim(t.substr(consumed));
    if (rest.empty()) return {v, std::nullopt};
    return {v, rest};
}

double KeyValueFile::number(const std::string& key) const {
    auto [v, unit] = split_quantity(raw(key), origin_ + ": " + key);
    if (unit) throw ConfigError(origin_ + ": " + key + ": unexpected trailing text '" + *unit + "'");
    return v;
}

double KeyValueFile::number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

int KeyValueFile::integer(const std::string& key) const {
    const double v = number(key);
    if (v != static_cast<double>(static_cast<long long>(v)))
        throw ConfigError(origin_ + ": " + key + ": expected an integer");
    return static_cast<int>(v);
}

int KeyValueFile::integer_or(const std::string& key, int fallback) const {
    return has(key) ? integer(key) : fallback;
}

bool KeyValueFile::flag_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = raw(key);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
    if (v == "off" || v == "false" || v == "no" || v == "0") return false;
    throw ConfigError(origin_ + ": " + key + ": expected on/off");
}

double KeyValueFile::quantity(const std::string& key, Unit unit) const {
    auto [v, sym] = split_quantity(raw(key), origin_ + ": " + key);
    if (!sym) return v;
    try {
        return convert(v, parse_unit(*sym), unit);
    } catch (const UnknownUnitPair& e) {
        throw ConfigError(origin_ + ": " + key + ": " + e.what());
    }
}

double KeyValueFile::quantity_or(const std::string& key, Unit unit, double fallback) const {
    return has(key) ? quantity(key, unit) : fallback;
}

std::filesystem::path KeyValueFile::directory() const {
    return std::filesystem::path(origin_).parent_path();
}

}  // namespace cavcool
