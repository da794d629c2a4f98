#include "liureg/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace liureg {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\''))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

double parse_number(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' has non-numeric value '" + v +
                                 "'");
    }
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

ConfigFile ConfigFile::parse_string(const std::string& text) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     " is not 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     " has an empty key or value");
        }
        if (cfg.raw_.count(key)) {
            throw std::runtime_error("config: duplicate key '" + key + "'");
        }
        cfg.raw_[key] = value;
        cfg.consumed_[key] = false;
    }
    return cfg;
}

bool ConfigFile::has(const std::string& key) const { return raw_.count(key) > 0; }

std::string ConfigFile::take(const std::string& key) {
    const auto it = raw_.find(key);
    if (it == raw_.end()) throw std::runtime_error("config: missing required key '" + key + "'");
    consumed_[key] = true;
    return it->second;
}

std::vector<std::string> ConfigFile::value_list(const std::string& key) {
    std::string v = take(key);
    std::vector<std::string> items;
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') {
            throw std::runtime_error("config: key '" + key + "' has an unterminated array");
        }
        v = v.substr(1, v.size() - 2);
        std::stringstream ss(v);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cell = trim(cell);
            if (!cell.empty()) items.push_back(unquote(cell));
        }
        if (items.empty()) {
            throw std::runtime_error("config: key '" + key + "' has an empty array");
        }
    } else {
        items.push_back(unquote(v));
    }
    return items;
}

double ConfigFile::get_number(const std::string& key) {
    return parse_number(key, unquote(take(key)));
}

double ConfigFile::get_number_or(const std::string& key, double fallback) {
    return has(key) ? get_number(key) : fallback;
}

long long ConfigFile::get_int(const std::string& key) {
    const double x = get_number(key);
    const long long i = static_cast<long long>(x);
    if (static_cast<double>(i) != x) {
        throw std::runtime_error("config: key '" + key + "' must be an integer");
    }
    return i;
}

long long ConfigFile::get_int_or(const std::string& key, long long fallback) {
    return has(key) ? get_int(key) : fallback;
}

bool ConfigFile::get_bool_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string v = unquote(take(key));
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::runtime_error("config: key '" + key + "' must be true or false");
}

std::string ConfigFile::get_string(const std::string& key) { return unquote(take(key)); }

std::string ConfigFile::get_string_or(const std::string& key, const std::string& fallback) {
    return has(key) ? get_string(key) : fallback;
}

std::vector<double> ConfigFile::get_number_list(const std::string& key) {
    std::vector<double> out;
    for (const auto& s : value_list(key)) out.push_back(parse_number(key, s));
    return out;
}

std::vector<double> ConfigFile::get_number_list_or(const std::string& key,
                                                   std::vector<double> fallback) {
    return has(key) ? get_number_list(key) : std::move(fallback);
}

std::vector<std::string> ConfigFile::get_string_list_or(const std::string& key,
                                                        std::vector<std::string> fallback) {
    return has(key) ? value_list(key) : std::move(fallback);
}

void ConfigFile::check_all_consumed() const {
    std::string unknown;
    for (const auto& [key, used] : consumed_) {
        if (!used) unknown += (unknown.empty() ? "" : ", ") + key;
    }
    if (!unknown.empty()) {
        throw std::runtime_error("config: unknown key(s): " + unknown);
    }
}

}  // namespace liureg
