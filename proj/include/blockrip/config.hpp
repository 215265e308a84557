#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace blockrip {

// Parsed config value. The config format is a small key/value language:
// `key = value` lines, `[section]` headers (keys become section.key),
// values are integers, reals, booleans, quoted strings, arrays [a, b, ...]
// (nestable) and inline tables {k = v, ...} (flattened into dotted keys).
struct ConfigValue {
    enum class Kind { integer, real, boolean, text, array };
    Kind kind = Kind::integer;
    std::int64_t i = 0;
    double d = 0.0;
    bool b = false;
    std::string s;
    std::vector<ConfigValue> items;

    bool is_number() const { return kind == Kind::integer || kind == Kind::real; }
    double as_real() const { return kind == Kind::integer ? static_cast<double>(i) : d; }
    std::string serialize() const;

    static ConfigValue integer(std::int64_t v);
    static ConfigValue real(double v);
    static ConfigValue boolean(bool v);
    static ConfigValue text(std::string v);
    static ConfigValue array(std::vector<ConfigValue> v);
};

using ConfigMap = std::map<std::string, ConfigValue>;

// Throws ValidationError with "config: ..." messages on syntax errors.
ConfigMap parse_config(const std::string& text);
ConfigMap load_config(const std::string& path);  // IoError if unreadable

// Parses `value_text` with the value grammar; an unparsable token is kept
// as a bare string, so CLI overrides like paths need no quoting.
void config_set(ConfigMap& map, const std::string& key, const std::string& value_text);

// Sorted "key = value" lines; the canonical form that is echoed and hashed.
std::string canonical_config_text(const ConfigMap& map);

// FNV-1a 64 over the canonical text, as 16 hex digits.
std::string config_hash(const ConfigMap& map);

}  // namespace blockrip
