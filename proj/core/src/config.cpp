#include "sonig/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sonig/errors.hpp"

namespace sonig {

namespace {

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw InputError("config: value of '" + key + "' is not a number: '" + v + "'");
  }
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  return parse(in, path);
}

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& origin) {
  KeyValueConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = strip(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw InputError(origin + ": line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = strip(trimmed.substr(0, eq));
    const std::string value = strip(trimmed.substr(eq + 1));
    if (key.empty()) {
      throw InputError(origin + ": line " + std::to_string(line_no) + ": empty key");
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueConfig::require(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw InputError("config: missing required key '" + key + "'");
  return it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  return to_double(require(key), key);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int KeyValueConfig::get_int(const std::string& key) const {
  const double v = get_double(key);
  const int out = static_cast<int>(v);
  if (static_cast<double>(out) != v) {
    throw InputError("config: value of '" + key + "' is not an integer");
  }
  return out;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = require(key);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw InputError("config: value of '" + key + "' is not a boolean");
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? require(key) : fallback;
}

std::vector<double> KeyValueConfig::get_list(const std::string& key) const {
  const std::string raw = require(key);
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const std::string v = strip(field);
    if (v.empty()) throw InputError("config: empty element in list '" + key + "'");
    out.push_back(to_double(v, key));
  }
  if (out.empty()) throw InputError("config: empty list for key '" + key + "'");
  return out;
}

std::vector<double> KeyValueConfig::get_list(const std::string& key,
                                             const std::vector<double>& fallback) const {
  return has(key) ? get_list(key) : fallback;
}

}  // namespace sonig
