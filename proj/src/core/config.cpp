#include "core/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace fxc {

static std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail(errc::config, origin + ":" + std::to_string(line_no) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                fail(errc::config, origin + ":" + std::to_string(line_no) + ": empty section name");
            cfg.data_[section]; // section may stay empty
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(errc::config, origin + ":" + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            fail(errc::config, origin + ":" + std::to_string(line_no) + ": empty key");
        if (section.empty())
            fail(errc::config, origin + ":" + std::to_string(line_no) + ": key outside any section");
        cfg.data_[section][key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io, "cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

bool Config::has_section(const std::string& section) const { return data_.count(section) > 0; }

bool Config::has(const std::string& section, const std::string& key) const {
    auto it = data_.find(section);
    return it != data_.end() && it->second.count(key) > 0;
}

std::vector<std::string> Config::sections_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [name, kv] : data_)
        if (name.rfind(prefix, 0) == 0) out.push_back(name);
    return out;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    auto it = data_.find(section);
    if (it == data_.end() || !it->second.count(key))
        fail(errc::config, origin_ + ": missing [" + section + "] " + key);
    return it->second.at(key);
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
}

static double to_number(const std::string& s, const std::string& where) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        fail(errc::config, where + ": not a number: '" + s + "'");
    return v;
}

double Config::get_number(const std::string& section, const std::string& key) const {
    return to_number(get_string(section, key), origin_ + " [" + section + "] " + key);
}

double Config::get_number(const std::string& section, const std::string& key,
                          double fallback) const {
    return has(section, key) ? get_number(section, key) : fallback;
}

long Config::get_int(const std::string& section, const std::string& key, long fallback) const {
    if (!has(section, key)) return fallback;
    double v = get_number(section, key);
    long n = static_cast<long>(v);
    if (static_cast<double>(n) != v)
        fail(errc::config, origin_ + " [" + section + "] " + key + ": expected integer");
    return n;
}

std::vector<double> Config::get_numbers(const std::string& section, const std::string& key) const {
    std::string raw = get_string(section, key);
    std::vector<double> out;
    std::istringstream ss(raw);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        out.push_back(to_number(tok, origin_ + " [" + section + "] " + key));
    }
    return out;
}

std::vector<std::vector<double>> Config::get_tuples(const std::string& section,
                                                    const std::string& key) const {
    std::string raw = get_string(section, key);
    std::vector<std::vector<double>> out;
    std::istringstream ss(raw);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        std::vector<double> tuple;
        std::istringstream ts(tok);
        std::string num;
        while (ts >> num)
            tuple.push_back(to_number(num, origin_ + " [" + section + "] " + key));
        out.push_back(std::move(tuple));
    }
    return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    data_[section][key] = value;
}

std::string Config::serialize() const {
    std::ostringstream out;
    for (const auto& [name, kv] : data_) {
        out << '[' << name << "]\n";
        for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
        out << '\n';
    }
    return out.str();
}

} // namespace fxc
