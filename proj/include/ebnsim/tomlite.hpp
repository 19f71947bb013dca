#pragma once

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

// Minimal TOML reader covering the subset used by topology configs:
// [table] headers, [[array-of-tables]] headers, and key = value lines with
// strings, booleans, numbers (inf accepted) and flat arrays. Lowered into a
// nlohmann::json document so the rest of the loader is format-agnostic.
namespace ebnsim::tomlite {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("config line " + std::to_string(line) + ": " + what) {}
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::string_view strip_comment(std::string_view s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_string = !in_string;
        if (s[i] == '#' && !in_string) return s.substr(0, i);
    }
    return s;
}

inline nlohmann::json parse_scalar(std::string_view v, std::size_t line) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
        std::string out;
        for (std::size_t i = 1; i + 1 < v.size(); ++i) {
            if (v[i] == '\\' && i + 2 < v.size()) {
                ++i;
                switch (v[i]) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    default: out += v[i];
                }
            } else {
                out += v[i];
            }
        }
        return out;
    }
    if (v == "true") return true;
    if (v == "false") return false;
    if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
    if (v == "-inf") return -std::numeric_limits<double>::infinity();
    std::string num(v);
    try {
        std::size_t used = 0;
        if (num.find_first_of(".eE") == std::string::npos &&
            num.find("inf") == std::string::npos) {
            long long i = std::stoll(num, &used);
            if (used == num.size()) return i;
        }
        double d = std::stod(num, &used);
        if (used == num.size()) return d;
    } catch (const std::exception&) {
    }
    throw ParseError(line, "cannot parse value '" + num + "'");
}

inline nlohmann::json parse_value(std::string_view v, std::size_t line) {
    v = trim(v);
    if (v.empty()) throw ParseError(line, "empty value");
    if (v.front() == '[') {
        if (v.back() != ']') throw ParseError(line, "unterminated array");
        nlohmann::json arr = nlohmann::json::array();
        std::string_view body = v.substr(1, v.size() - 2);
        std::size_t start = 0;
        bool in_string = false;
        for (std::size_t i = 0; i <= body.size(); ++i) {
            if (i < body.size() && body[i] == '"') in_string = !in_string;
            if (i == body.size() || (body[i] == ',' && !in_string)) {
                std::string_view item = trim(body.substr(start, i - start));
                if (!item.empty()) arr.push_back(parse_scalar(item, line));
                start = i + 1;
            }
        }
        return arr;
    }
    return parse_scalar(v, line);
}

}  // namespace detail

inline nlohmann::json parse(std::string_view text) {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* current = &root;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        ++line_no;
        std::string_view line = detail::trim(detail::strip_comment(text.substr(pos, eol - pos)));
        pos = eol + 1;
        if (line.empty()) continue;
        if (line.front() == '[') {
            bool array_table = line.size() > 1 && line[1] == '[';
            std::size_t close = line.find(array_table ? "]]" : "]");
            if (close == std::string_view::npos) throw ParseError(line_no, "unterminated table header");
            std::string name(detail::trim(line.substr(array_table ? 2 : 1, close - (array_table ? 2 : 1))));
            if (name.empty()) throw ParseError(line_no, "empty table name");
            if (array_table) {
                if (!root.contains(name)) root[name] = nlohmann::json::array();
                root[name].push_back(nlohmann::json::object());
                current = &root[name].back();
            } else {
                if (!root.contains(name)) root[name] = nlohmann::json::object();
                current = &root[name];
            }
            continue;
        }
        std::size_t eq = std::string_view::npos;
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_string = !in_string;
            if (line[i] == '=' && !in_string) {
                eq = i;
                break;
            }
        }
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
        std::string key(detail::trim(line.substr(0, eq)));
        if (key.empty()) throw ParseError(line_no, "empty key");
        (*current)[key] = detail::parse_value(line.substr(eq + 1), line_no);
    }
    return root;
}

}  // namespace ebnsim::tomlite
