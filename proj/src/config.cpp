#include "meso/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace meso {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections_[section];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end() || !s->second.count(key))
    throw ConfigError("missing config key [" + section + "] " + key);
  return s->second.at(key);
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const std::string v = get_string(section, key);
  try {
    size_t used = 0;
    const double x = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return x;
  } catch (...) {
  }
  throw ConfigError("config key [" + section + "] " + key + ": not a number: " + v);
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key,
                    int fallback) const {
  if (!has(section, key)) return fallback;
  const double v = get_double(section, key);
  const int i = int(v);
  if (double(i) != v)
    throw ConfigError("config key [" + section + "] " + key + ": expected an integer");
  return i;
}

std::vector<double> Config::get_list(const std::string& section,
                                     const std::string& key) const {
  std::string v = get_string(section, key);
  for (char& c : v)
    if (c == ',') c = ' ';
  std::istringstream in(v);
  std::vector<double> out;
  double x;
  while (in >> x) out.push_back(x);
  if (out.empty())
    throw ConfigError("config key [" + section + "] " + key + ": empty list");
  return out;
}

}  // namespace meso
