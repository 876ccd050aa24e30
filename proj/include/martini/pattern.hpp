#ifndef MARTINI_PATTERN_HPP
#define MARTINI_PATTERN_HPP

#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "martini/common.hpp"

namespace martini {

/// Regex wrapper accepting named capture groups in (?P<name>...) or
/// (?<name>...) form. std::regex has no named-group support, so names are
/// stripped to positional groups and the name->position map kept here.
class NamedPattern {
public:
    explicit NamedPattern(const std::string& pattern) : source_(pattern) {
        std::string translated;
        translated.reserve(pattern.size());
        int group = 0;
        for (std::size_t i = 0; i < pattern.size(); ++i) {
            if (pattern[i] == '\\' && i + 1 < pattern.size()) {
                translated += pattern[i];
                translated += pattern[i + 1];
                ++i;
                continue;
            }
            if (pattern[i] != '(') {
                translated += pattern[i];
                continue;
            }
            // '(' — classify the group kind.
            std::size_t j = i + 1;
            std::string name;
            if (j < pattern.size() && pattern[j] == '?') {
                ++j;
                if (j < pattern.size() && pattern[j] == 'P') ++j;
                if (j < pattern.size() && pattern[j] == '<') {
                    ++j;
                    while (j < pattern.size() && pattern[j] != '>') name += pattern[j++];
                    if (j >= pattern.size()) throw ConfigError("unterminated group name in pattern: " + pattern);
                    ++j;  // past '>'
                    if (name.empty()) throw ConfigError("empty group name in pattern: " + pattern);
                    ++group;
                    names_[name] = group;
                    translated += '(';
                    i = j - 1;
                    continue;
                }
                // (?: and friends — copy through, not a capture group.
                translated += '(';
                continue;
            }
            ++group;
            translated += '(';
        }
        try {
            re_ = std::regex(translated, std::regex::ECMAScript);
        } catch (const std::regex_error& e) {
            throw ConfigError("invalid pattern '" + pattern + "': " + e.what());
        }
    }

    const std::string& source() const { return source_; }

    bool has_group(const std::string& name) const { return names_.count(name) > 0; }

    /// Full match; on success returns the named captures that participated.
    std::optional<std::map<std::string, std::string>> match(const std::string& text) const {
        std::smatch m;
        if (!std::regex_match(text, m, re_)) return std::nullopt;
        std::map<std::string, std::string> captures;
        for (const auto& [name, idx] : names_) {
            if (idx < static_cast<int>(m.size()) && m[idx].matched) captures[name] = m[idx].str();
        }
        return captures;
    }

private:
    std::string source_;
    std::regex re_;
    std::map<std::string, int> names_;
};

}  // namespace martini

#endif  // MARTINI_PATTERN_HPP
