#ifndef MARTINI_TOML_HPP
#define MARTINI_TOML_HPP

#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "martini/common.hpp"

namespace martini::toml {

// Minimal TOML reader covering what run configs and synth specs need:
// [table] / [[array-of-tables]] headers, bare keys, strings, integers,
// floats, booleans, homogeneous arrays, comments. Bare date tokens
// (2019-08-23) are read as strings.

class Value;
using Array = std::vector<Value>;

class Table {
public:
    std::map<std::string, Value> entries;

    bool has(const std::string& key) const { return entries.count(key) > 0; }
    const Value& at(const std::string& key) const;
    const Value* find(const std::string& key) const;
};

class Value {
public:
    std::variant<std::string, std::int64_t, double, bool, Array, Table> v;

    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
    bool is_float() const { return std::holds_alternative<double>(v); }
    bool is_bool() const { return std::holds_alternative<bool>(v); }
    bool is_array() const { return std::holds_alternative<Array>(v); }
    bool is_table() const { return std::holds_alternative<Table>(v); }

    const std::string& as_string() const {
        if (!is_string()) throw ConfigError("TOML value is not a string");
        return std::get<std::string>(v);
    }
    std::int64_t as_int() const {
        if (!is_int()) throw ConfigError("TOML value is not an integer");
        return std::get<std::int64_t>(v);
    }
    double as_double() const {
        if (is_int()) return static_cast<double>(std::get<std::int64_t>(v));
        if (!is_float()) throw ConfigError("TOML value is not a number");
        return std::get<double>(v);
    }
    bool as_bool() const {
        if (!is_bool()) throw ConfigError("TOML value is not a boolean");
        return std::get<bool>(v);
    }
    const Array& as_array() const {
        if (!is_array()) throw ConfigError("TOML value is not an array");
        return std::get<Array>(v);
    }
    const Table& as_table() const {
        if (!is_table()) throw ConfigError("TOML value is not a table");
        return std::get<Table>(v);
    }
};

inline const Value& Table::at(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError("missing TOML key: " + key);
    return it->second;
}

inline const Value* Table::find(const std::string& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
}

namespace detail {

inline void fail(int line_no, const std::string& msg) {
    throw ConfigError("TOML line " + std::to_string(line_no) + ": " + msg);
}

inline std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_path(const std::string& dotted, int line_no) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : dotted) {
        if (c == '.') {
            if (cur.empty()) fail(line_no, "empty key segment");
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (trim(cur).empty()) fail(line_no, "empty key segment");
    parts.push_back(trim(cur));
    return parts;
}

inline bool looks_like_date(const std::string& s) {
    if (s.size() < 10) return false;
    auto digit = [&](std::size_t i) { return std::isdigit(static_cast<unsigned char>(s[i])); };
    return digit(0) && digit(1) && digit(2) && digit(3) && s[4] == '-' && digit(5) && digit(6) &&
           s[7] == '-' && digit(8) && digit(9);
}

inline Value parse_value(const std::string& raw, int line_no);

inline Value parse_array(const std::string& raw, int line_no) {
    Array arr;
    std::string body = trim(raw.substr(1, raw.size() - 2));
    std::string cur;
    int depth = 0;
    bool in_str = false;
    auto flush = [&] {
        std::string item = trim(cur);
        if (!item.empty()) arr.push_back(parse_value(item, line_no));
        cur.clear();
    };
    for (char c : body) {
        if (c == '"') in_str = !in_str;
        if (!in_str) {
            if (c == '[') ++depth;
            if (c == ']') --depth;
            if (c == ',' && depth == 0) {
                flush();
                continue;
            }
        }
        cur += c;
    }
    flush();
    return Value{arr};
}

inline Value parse_value(const std::string& raw, int line_no) {
    const std::string s = trim(raw);
    if (s.empty()) fail(line_no, "empty value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') fail(line_no, "unterminated string");
        std::string out;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            if (s[i] == '\\' && i + 2 < s.size()) {
                const char n = s[++i];
                if (n == 'n') out += '\n';
                else if (n == 't') out += '\t';
                else out += n;
            } else {
                out += s[i];
            }
        }
        return Value{out};
    }
    if (s.front() == '[') {
        if (s.back() != ']') fail(line_no, "unterminated array");
        return parse_array(s, line_no);
    }
    if (s == "true") return Value{true};
    if (s == "false") return Value{false};
    if (looks_like_date(s)) return Value{s};
    {
        char* end = nullptr;
        errno = 0;
        const long long iv = std::strtoll(s.c_str(), &end, 10);
        if (end && *end == '\0' && errno == 0) return Value{static_cast<std::int64_t>(iv)};
    }
    {
        char* end = nullptr;
        const double dv = std::strtod(s.c_str(), &end);
        if (end && *end == '\0') return Value{dv};
    }
    fail(line_no, "cannot parse value: " + s);
    return Value{};  // unreachable
}

inline Table* descend(Table* root, const std::vector<std::string>& path, int line_no) {
    Table* cur = root;
    for (const auto& part : path) {
        auto it = cur->entries.find(part);
        if (it == cur->entries.end()) {
            cur->entries[part] = Value{Table{}};
            it = cur->entries.find(part);
        }
        Value& v = it->second;
        if (v.is_array()) {
            Array& arr = std::get<Array>(v.v);
            if (arr.empty() || !arr.back().is_table()) fail(line_no, "key conflict at " + part);
            cur = &std::get<Table>(arr.back().v);
        } else if (v.is_table()) {
            cur = &std::get<Table>(v.v);
        } else {
            fail(line_no, "key conflict at " + part);
        }
    }
    return cur;
}

}  // namespace detail

inline Table parse(const std::string& text) {
    using namespace detail;
    Table root;
    Table* current = &root;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        line = trim(strip_comment(line));
        if (line.empty()) continue;

        if (line.size() >= 4 && line.substr(0, 2) == "[[") {
            if (line.substr(line.size() - 2) != "]]") fail(line_no, "malformed table-array header");
            const auto path = split_path(trim(line.substr(2, line.size() - 4)), line_no);
            Table* parent = descend(&root, {path.begin(), path.end() - 1}, line_no);
            auto it = parent->entries.find(path.back());
            if (it == parent->entries.end())
                it = parent->entries.emplace(path.back(), Value{Array{}}).first;
            if (!it->second.is_array()) fail(line_no, "key conflict at " + path.back());
            std::get<Array>(it->second.v).push_back(Value{Table{}});
            current = &std::get<Table>(std::get<Array>(it->second.v).back().v);
        } else if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "malformed table header");
            const auto path = split_path(trim(line.substr(1, line.size() - 2)), line_no);
            current = descend(&root, path, line_no);
        } else {
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos) fail(line_no, "expected key = value");
            const std::string key = trim(line.substr(0, eq));
            if (key.empty()) fail(line_no, "empty key");
            current->entries[key] = parse_value(line.substr(eq + 1), line_no);
        }
    }
    return root;
}

inline Table parse_file(const std::string& path) {
    try {
        return parse(read_file(path));
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace martini::toml

#endif  // MARTINI_TOML_HPP
