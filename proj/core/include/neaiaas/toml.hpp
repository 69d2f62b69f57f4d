#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace neaiaas {

// Minimal TOML-subset reader covering what experiment configs need:
// [section] headers, key = value lines, '#' comments, strings in double
// quotes, booleans, numbers and single-line arrays of numbers. Anything
// fancier is rejected with a line-numbered message.

struct TomlError {
    int line = 0;
    std::string message;
};

class TomlTable {
public:
    using Value = std::variant<std::string, double, bool, std::vector<double>>;

    static std::variant<TomlTable, TomlError> parse_file(const std::string& path);
    static std::variant<TomlTable, TomlError> parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;

    std::optional<std::string> get_string(const std::string& section, const std::string& key) const;
    std::optional<double> get_number(const std::string& section, const std::string& key) const;
    std::optional<bool> get_bool(const std::string& section, const std::string& key) const;
    std::optional<std::vector<double>> get_array(const std::string& section,
                                                 const std::string& key) const;

    // All "section.key" paths present, sorted; used to reject unknown keys.
    std::vector<std::string> paths() const;

private:
    std::map<std::string, std::map<std::string, Value>> sections_;
};

}  // namespace neaiaas
