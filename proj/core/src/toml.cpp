#include "neaiaas/toml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace neaiaas {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Cuts a trailing comment, honoring '#' inside quoted strings.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        else if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    }
    return true;
}

bool parse_number(const std::string& text, double& out) {
    const char* begin = text.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + text.size() && !text.empty();
}

}  // namespace

std::variant<TomlTable, TomlError> TomlTable::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return TomlError{0, "cannot open file: " + path};
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

std::variant<TomlTable, TomlError> TomlTable::parse_string(const std::string& text) {
    TomlTable t;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') return TomlError{lineno, "unterminated section header"};
            section = trim(line.substr(1, line.size() - 2));
            if (!valid_key(section)) return TomlError{lineno, "invalid section name"};
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos) return TomlError{lineno, "expected key = value"};
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!valid_key(key)) return TomlError{lineno, "invalid key '" + key + "'"};
        if (section.empty()) return TomlError{lineno, "key outside any [section]"};
        if (t.sections_[section].count(key)) {
            return TomlError{lineno, "duplicate key '" + section + "." + key + "'"};
        }
        if (val.empty()) return TomlError{lineno, "missing value for '" + key + "'"};

        if (val.front() == '"') {
            if (val.size() < 2 || val.back() != '"') {
                return TomlError{lineno, "unterminated string value"};
            }
            std::string inner = val.substr(1, val.size() - 2);
            if (inner.find('"') != std::string::npos) {
                return TomlError{lineno, "embedded quotes are not supported"};
            }
            t.sections_[section][key] = inner;
        } else if (val == "true" || val == "false") {
            t.sections_[section][key] = (val == "true");
        } else if (val.front() == '[') {
            if (val.back() != ']') {
                return TomlError{lineno, "arrays must close on the same line"};
            }
            std::vector<double> arr;
            std::string body = trim(val.substr(1, val.size() - 2));
            if (!body.empty()) {
                std::size_t pos = 0;
                while (pos != std::string::npos) {
                    std::size_t comma = body.find(',', pos);
                    std::string item = trim(comma == std::string::npos
                                                ? body.substr(pos)
                                                : body.substr(pos, comma - pos));
                    double num = 0;
                    if (!parse_number(item, num)) {
                        return TomlError{lineno, "array element '" + item + "' is not a number"};
                    }
                    arr.push_back(num);
                    pos = comma == std::string::npos ? std::string::npos : comma + 1;
                }
            }
            t.sections_[section][key] = std::move(arr);
        } else {
            double num = 0;
            if (!parse_number(val, num)) {
                return TomlError{lineno, "value '" + val + "' is not a number, bool or string"};
            }
            t.sections_[section][key] = num;
        }
    }
    return t;
}

bool TomlTable::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::optional<std::string> TomlTable::get_string(const std::string& section,
                                                 const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    if (const auto* v = std::get_if<std::string>(&k->second)) return *v;
    return std::nullopt;
}

std::optional<double> TomlTable::get_number(const std::string& section,
                                            const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    if (const auto* v = std::get_if<double>(&k->second)) return *v;
    return std::nullopt;
}

std::optional<bool> TomlTable::get_bool(const std::string& section,
                                        const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    if (const auto* v = std::get_if<bool>(&k->second)) return *v;
    return std::nullopt;
}

std::optional<std::vector<double>> TomlTable::get_array(const std::string& section,
                                                        const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    if (const auto* v = std::get_if<std::vector<double>>(&k->second)) return *v;
    return std::nullopt;
}

std::vector<std::string> TomlTable::paths() const {
    std::vector<std::string> out;
    for (const auto& [sec, keys] : sections_) {
        for (const auto& [key, value] : keys) out.push_back(sec + "." + key);
    }
    return out;
}

}  // namespace neaiaas
