#pragma once

// Internal helpers for strict JSON decoding with path-qualified diagnostics.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string>
#include <string_view>

#include "json.hpp"
#include "rqv/error.hpp"

namespace rqv::detail {

using json = nlohmann::json;

inline json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col), "malformed JSON");
    }
}

inline void require_object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw ParseError(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ParseError(path.empty() ? key : path + "." + key, "unknown field");
    }
}

inline const json& require_field(const json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(path.empty() ? std::string(key) : path + "." + key, "missing field");
    return *it;
}

inline double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path, "expected a number");
    return j.get<double>();
}

/// Number, or the strings "inf"/"+inf"/"infinity" for +infinity.
inline double as_extended_number(const json& j, const std::string& path) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "infinity" || s == "Infinity") {
            return std::numeric_limits<double>::infinity();
        }
        throw ParseError(path, "expected a number or \"inf\"");
    }
    return as_number(j, path);
}

inline double as_non_negative(const json& j, const std::string& path) {
    const double v = as_number(j, path);
    if (!std::isfinite(v) || v < 0.0) throw ParseError(path, "expected a finite non-negative number");
    return v;
}

inline std::int64_t as_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
    return j.get<std::int64_t>();
}

inline std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ParseError(path, "expected a string");
    return j.get<std::string>();
}

inline std::string at(const std::string& path, std::size_t index) {
    return path + "[" + std::to_string(index) + "]";
}

inline std::string dot(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

}  // namespace rqv::detail
