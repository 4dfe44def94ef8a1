// ============================================================================
// core/config.hpp - Structured text config: [sections], key = value, arrays
// ============================================================================
//
// Format, by example:
//
//   # comment
//   [pattern]
//   kind = accordion-p
//   segment_len_a = 0.01
//   bays = 20
//
//   [channel.0]
//   orientation = parallel
//   path = 0.035 0.0, 0.035 0.124   # comma-separated "u v" points
//
// Values are strings; typed accessors parse on demand and report the section
// and key on failure.
#pragma once
#include <map>
#include <string>
#include <vector>

namespace fxc {

class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;
    std::vector<std::string> sections_with_prefix(const std::string& prefix) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_number(const std::string& section, const std::string& key) const;
    double get_number(const std::string& section, const std::string& key, double fallback) const;
    long get_int(const std::string& section, const std::string& key, long fallback) const;
    std::vector<double> get_numbers(const std::string& section, const std::string& key) const;
    // comma-separated list of whitespace-separated tuples
    std::vector<std::vector<double>> get_tuples(const std::string& section,
                                                const std::string& key) const;

    void set(const std::string& section, const std::string& key, const std::string& value);
    std::string serialize() const;

private:
    // section -> key -> raw value
    std::map<std::string, std::map<std::string, std::string>> data_;
    std::string origin_;
};

} // namespace fxc
