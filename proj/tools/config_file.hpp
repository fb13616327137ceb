#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cli {

// Parse error for the flat `key = value` format; carries the line number.
class ConfigFileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfigEntry {
    std::string value;
    int line;
};

// `[section]` headers over `key = value` lines; '#' and ';' start comments.
// Sections: scenario / sweep / oracle. Unknown sections or keys are errors so
// typos never silently change an experiment.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_text(const std::string& text, const std::string& origin);

    std::optional<ConfigEntry> lookup(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const;

    double get_double(const std::string& section, const std::string& key,
                      const ConfigEntry& e) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                        const ConfigEntry& e) const;
    bool get_bool(const std::string& section, const std::string& key, const ConfigEntry& e) const;

private:
    std::string origin_;
    std::map<std::string, std::map<std::string, ConfigEntry>> sections_;

    [[noreturn]] void fail(int line, const std::string& message) const;
};

} // namespace cli
