#pragma once

#include <map>
#include <string>
#include <vector>

namespace liureg {

// Strict key = value configuration file. Values are numbers, booleans,
// quoted or bare strings, or [a, b, c] arrays. '#' starts a comment.
// Readers must consume every key: unknown keys are errors, not
// warnings, so typos in long simulation configs cannot pass silently.
class ConfigFile {
  public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text);

    bool has(const std::string& key) const;

    double get_number(const std::string& key);
    double get_number_or(const std::string& key, double fallback);
    long long get_int(const std::string& key);
    long long get_int_or(const std::string& key, long long fallback);
    bool get_bool_or(const std::string& key, bool fallback);
    std::string get_string(const std::string& key);
    std::string get_string_or(const std::string& key, const std::string& fallback);
    std::vector<double> get_number_list(const std::string& key);
    std::vector<double> get_number_list_or(const std::string& key,
                                           std::vector<double> fallback);
    std::vector<std::string> get_string_list_or(const std::string& key,
                                                std::vector<std::string> fallback);

    // Throws listing every key never consumed by a getter.
    void check_all_consumed() const;

    // Raw view (consumed flags untouched), for manifests.
    const std::map<std::string, std::string>& raw() const { return raw_; }

  private:
    std::vector<std::string> value_list(const std::string& key);
    std::string take(const std::string& key);

    std::map<std::string, std::string> raw_;
    std::map<std::string, bool> consumed_;
};

}  // namespace liureg
