#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

namespace sonig {

// Plain key value configuration files: one `key = value` pair per line,
// `#` starts a comment, values may be scalars or comma separated lists.
class KeyValueConfig {
 public:
  static KeyValueConfig load(const std::string& path);
  static KeyValueConfig parse(std::istream& in, const std::string& origin = "<stream>");

  bool has(const std::string& key) const;

  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::string require(const std::string& key) const;

  std::map<std::string, std::string> values_;
};

}  // namespace sonig
