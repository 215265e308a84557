#include "blockrip/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "blockrip/errors.hpp"

namespace blockrip {

ConfigValue ConfigValue::integer(std::int64_t v) {
    ConfigValue c;
    c.kind = Kind::integer;
    c.i = v;
    return c;
}
ConfigValue ConfigValue::real(double v) {
    ConfigValue c;
    c.kind = Kind::real;
    c.d = v;
    return c;
}
ConfigValue ConfigValue::boolean(bool v) {
    ConfigValue c;
    c.kind = Kind::boolean;
    c.b = v;
    return c;
}
ConfigValue ConfigValue::text(std::string v) {
    ConfigValue c;
    c.kind = Kind::text;
    c.s = std::move(v);
    return c;
}
ConfigValue ConfigValue::array(std::vector<ConfigValue> v) {
    ConfigValue c;
    c.kind = Kind::array;
    c.items = std::move(v);
    return c;
}

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string out(buf, res.ptr);
    return out;
}

struct ValueParser {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() { return text[pos]; }

    ConfigValue parse_value() {
        skip_ws();
        if (pos >= text.size()) throw ValidationError("config: missing value");
        char c = text[pos];
        if (c == '[') return parse_array();
        if (c == '"') return parse_string();
        if (c == '{') throw ValidationError("config: inline table not allowed here");
        return parse_scalar();
    }

    ConfigValue parse_array() {
        ++pos;  // consume '['
        std::vector<ConfigValue> items;
        skip_ws();
        if (pos < text.size() && text[pos] == ']') {
            ++pos;
            return ConfigValue::array(std::move(items));
        }
        for (;;) {
            items.push_back(parse_value());
            skip_ws();
            if (pos >= text.size()) throw ValidationError("config: unterminated array");
            if (text[pos] == ',') {
                ++pos;
                continue;
            }
            if (text[pos] == ']') {
                ++pos;
                return ConfigValue::array(std::move(items));
            }
            throw ValidationError("config: expected ',' or ']' in array");
        }
    }

    ConfigValue parse_string() {
        ++pos;  // consume '"'
        std::string out;
        while (pos < text.size() && text[pos] != '"') out.push_back(text[pos++]);
        if (pos >= text.size()) throw ValidationError("config: unterminated string");
        ++pos;
        return ConfigValue::text(std::move(out));
    }

    ConfigValue parse_scalar() {
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ',' && text[pos] != ']' && text[pos] != '}' &&
               text[pos] != ' ' && text[pos] != '\t')
            ++pos;
        std::string tok = text.substr(start, pos - start);
        if (tok.empty()) throw ValidationError("config: empty value");
        if (tok == "true") return ConfigValue::boolean(true);
        if (tok == "false") return ConfigValue::boolean(false);
        if (tok == "inf") return ConfigValue::real(std::numeric_limits<double>::infinity());

        std::int64_t iv = 0;
        auto [p1, e1] = std::from_chars(tok.data(), tok.data() + tok.size(), iv);
        if (e1 == std::errc() && p1 == tok.data() + tok.size()) return ConfigValue::integer(iv);
        char* end = nullptr;
        double dv = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() + tok.size()) return ConfigValue::real(dv);
        return ConfigValue::text(std::move(tok));  // bare string
    }

    // {k = v, k2 = v2}: assigns prefix.k entries into the map.
    void parse_inline_table(ConfigMap& map, const std::string& prefix) {
        ++pos;  // consume '{'
        skip_ws();
        if (pos < text.size() && text[pos] == '}') {
            ++pos;
            return;
        }
        for (;;) {
            skip_ws();
            std::size_t start = pos;
            while (pos < text.size() && text[pos] != '=' && text[pos] != ' ' &&
                   text[pos] != '\t')
                ++pos;
            std::string key = text.substr(start, pos - start);
            if (key.empty()) throw ValidationError("config: empty key in inline table");
            skip_ws();
            if (pos >= text.size() || text[pos] != '=')
                throw ValidationError("config: expected '=' in inline table");
            ++pos;
            skip_ws();
            if (pos < text.size() && text[pos] == '{') {
                parse_inline_table(map, prefix + key + ".");
            } else {
                map[prefix + key] = parse_value();
            }
            skip_ws();
            if (pos >= text.size()) throw ValidationError("config: unterminated inline table");
            if (text[pos] == ',') {
                ++pos;
                continue;
            }
            if (text[pos] == '}') {
                ++pos;
                return;
            }
            throw ValidationError("config: expected ',' or '}' in inline table");
        }
    }
};

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

ConfigMap parse_config(const std::string& text) {
    ConfigMap map;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("config: bad section header at line " +
                                      std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ValidationError("config: empty section name at line " +
                                      std::to_string(lineno));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config: expected 'key = value' at line " +
                                  std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string value_text = trim(line.substr(eq + 1));
        if (key.empty())
            throw ValidationError("config: empty key at line " + std::to_string(lineno));
        std::string full_key = section.empty() ? key : section + "." + key;
        ValueParser vp{value_text};
        if (!value_text.empty() && value_text.front() == '{') {
            vp.parse_inline_table(map, full_key + ".");
        } else {
            map[full_key] = vp.parse_value();
        }
        if (!vp.done())
            throw ValidationError("config: trailing characters at line " +
                                  std::to_string(lineno));
    }
    return map;
}

ConfigMap load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

void config_set(ConfigMap& map, const std::string& key, const std::string& value_text) {
    if (key.empty()) throw ValidationError("config: empty override key");
    std::string vt = trim(value_text);
    if (!vt.empty() && vt.front() == '{') {
        ValueParser vp{vt};
        vp.parse_inline_table(map, key + ".");
        return;
    }
    try {
        ValueParser vp{vt};
        ConfigValue v = vp.parse_value();
        if (vp.done()) {
            map[key] = std::move(v);
            return;
        }
    } catch (const ValidationError&) {
    }
    map[key] = ConfigValue::text(vt);  // fall back to a bare string
}

std::string ConfigValue::serialize() const {
    switch (kind) {
        case Kind::integer:
            return std::to_string(i);
        case Kind::real:
            return format_double(d);
        case Kind::boolean:
            return b ? "true" : "false";
        case Kind::text:
            return "\"" + s + "\"";
        case Kind::array: {
            std::string out = "[";
            for (std::size_t k = 0; k < items.size(); ++k) {
                if (k) out += ", ";
                out += items[k].serialize();
            }
            return out + "]";
        }
    }
    return "";
}

std::string canonical_config_text(const ConfigMap& map) {
    std::string out;
    for (const auto& [key, value] : map) {
        if (key == "out") continue;  // delivery path, not experiment identity
        out += key;
        out += " = ";
        out += value.serialize();
        out += "\n";
    }
    return out;
}

std::string config_hash(const ConfigMap& map) {
    std::string text = canonical_config_text(map);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int k = 15; k >= 0; --k) {
        buf[k] = hex[h & 0xF];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

}  // namespace blockrip
