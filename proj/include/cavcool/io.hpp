#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cavcool/units.hpp"

namespace cavcool {

class ConfigError : public Error {
public:
    using Error::Error;
};

// "key = value" text documents with '#' comments. Keys keep their order of
// first appearance; a repeated key overrides the earlier value.
class KeyValueFile {
public:
    static KeyValueFile parse(const std::string& text, const std::string& origin = "<string>");
    static KeyValueFile load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& raw(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;

    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    int integer(const std::string& key) const;
    int integer_or(const std::string& key, int fallback) const;
    bool flag_or(const std::string& key, bool fallback) const;

    // Value of the form "<number> [unit]" converted to `unit`; a bare number
    // is taken to be in `unit` already.
    double quantity(const std::string& key, Unit unit) const;
    double quantity_or(const std::string& key, Unit unit, double fallback) const;

    void set(const std::string& key, const std::string& value);
    const std::vector<std::string>& keys() const { return order_; }
    const std::string& origin() const { return origin_; }
    std::filesystem::path directory() const;

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
    std::string origin_;
};

// Splits "<number> <unit...>" into its parts; throws ConfigError on a bad number.
std::pair<double, std::optional<std::string>> split_quantity(const std::string& text, const std::string& where);

std::string trim(std::string s);
std::vector<std::string> split(const std::string& s, char sep);

// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace cavcool
