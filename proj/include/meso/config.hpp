#ifndef MESO_CONFIG_HPP
#define MESO_CONFIG_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace meso {

// Raised for malformed or missing configuration; the CLI maps it to exit 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Line-oriented "key = value" text with [section] headers and '#' comments.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  // whitespace- or comma-separated list
  std::vector<double> get_list(const std::string& section, const std::string& key) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace meso

#endif
