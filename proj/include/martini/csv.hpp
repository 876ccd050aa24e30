#ifndef MARTINI_CSV_HPP
#define MARTINI_CSV_HPP

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "martini/common.hpp"

namespace martini::csv {

/// Split one CSV record. Handles double-quoted fields with "" escapes;
/// embedded newlines are not supported (the canonical schemas never need them).
inline std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    out.push_back(std::move(field));
    return out;
}

inline std::string escape_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += '"';
    return out;
}

inline std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += escape_field(fields[i]);
    }
    return out;
}

class Reader {
public:
    explicit Reader(const std::string& path) : path_(path), in_(path) {
        if (!in_) throw DataError("cannot open file: " + path);
        std::string header;
        if (!std::getline(in_, header)) throw DataError("empty file: " + path);
        if (!header.empty() && header.back() == '\r') header.pop_back();
        columns_ = split_row(header);
        for (std::size_t i = 0; i < columns_.size(); ++i) index_[columns_[i]] = i;
    }

    const std::vector<std::string>& columns() const { return columns_; }

    /// Index of a named column; throws if absent.
    std::size_t column(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end())
            throw DataError("missing required column '" + name + "' in " + path_);
        return it->second;
    }

    bool has_column(const std::string& name) const { return index_.count(name) > 0; }

    bool next(std::vector<std::string>& row) {
        std::string line;
        while (std::getline(in_, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            row = split_row(line);
            return true;
        }
        return false;
    }

private:
    std::string path_;
    std::ifstream in_;
    std::vector<std::string> columns_;
    std::map<std::string, std::size_t> index_;
};

class Writer {
public:
    Writer(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw DataError("cannot open file for writing: " + path);
        out_ << join_row(header) << '\n';
    }

    void row(const std::vector<std::string>& fields) { out_ << join_row(fields) << '\n'; }

private:
    std::ofstream out_;
};

}  // namespace martini::csv

#endif  // MARTINI_CSV_HPP
