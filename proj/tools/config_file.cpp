#include "config_file.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace cli {

namespace {

const std::map<std::string, std::vector<std::string>> kKnownKeys = {
    {"scenario",
     {"d_near", "d_far", "d_eve", "d_pr", "alpha", "sigma_eps2", "pmax_db", "ip_db", "a_s",
      "allocate"}},
    {"sweep", {"axis", "values", "from", "to", "step", "pr_equal_distance"}},
    {"oracle", {"mc_samples", "seed", "quad_tol"}},
};

std::string trim(const std::string& s)
{
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string strip_comment(const std::string& s)
{
    const auto pos = s.find_first_of("#;");
    return pos == std::string::npos ? s : s.substr(0, pos);
}

} // namespace

void ConfigFile::fail(int line, const std::string& message) const
{
    throw ConfigFileError(origin_ + ":" + std::to_string(line) + ": " + message);
}

ConfigFile ConfigFile::parse_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigFileError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin)
{
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                cfg.fail(line_no, "malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (!kKnownKeys.count(section))
                cfg.fail(line_no, "unknown section '" + section + "' (expected scenario, sweep or oracle)");
            cfg.sections_[section]; // materialize even if empty
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            cfg.fail(line_no, "expected 'key = value', got '" + line + "'");
        if (section.empty())
            cfg.fail(line_no, "key outside of any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto& allowed = kKnownKeys.at(section);
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            cfg.fail(line_no, "unknown key '" + key + "' in section [" + section + "]");
        if (cfg.sections_[section].count(key))
            cfg.fail(line_no, "duplicate key '" + key + "' in section [" + section + "]");
        cfg.sections_[section][key] = {value, line_no};
    }
    return cfg;
}

std::optional<ConfigEntry> ConfigFile::lookup(const std::string& section,
                                              const std::string& key) const
{
    const auto sec = sections_.find(section);
    if (sec == sections_.end())
        return std::nullopt;
    const auto it = sec->second.find(key);
    if (it == sec->second.end())
        return std::nullopt;
    return it->second;
}

bool ConfigFile::has_section(const std::string& section) const
{
    return sections_.count(section) != 0;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              const ConfigEntry& e) const
{
    try {
        std::size_t used = 0;
        const double v = std::stod(e.value, &used);
        if (used != e.value.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        fail(e.line, "field '" + key + "' in [" + section + "]: '" + e.value +
                         "' is not a number");
    }
}

std::vector<double> ConfigFile::get_double_list(const std::string& section, const std::string& key,
                                                const ConfigEntry& e) const
{
    std::vector<double> out;
    std::istringstream in(e.value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty())
            fail(e.line, "field '" + key + "' in [" + section + "]: empty list element");
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            fail(e.line, "field '" + key + "' in [" + section + "]: '" + item +
                             "' is not a number");
        }
    }
    if (out.empty())
        fail(e.line, "field '" + key + "' in [" + section + "]: empty list");
    return out;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          const ConfigEntry& e) const
{
    if (e.value == "true" || e.value == "1" || e.value == "yes")
        return true;
    if (e.value == "false" || e.value == "0" || e.value == "no")
        return false;
    fail(e.line, "field '" + key + "' in [" + section + "]: expected a boolean, got '" + e.value +
                     "'");
}

} // namespace cli
