#include "selfsim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace selfsim {

static std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

static std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
  return s;
}

static std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = unquote(trim(item));
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& s0) {
  std::string s = trim(s0);
  auto caret = s.find('^');
  if (caret != std::string::npos) {
    double b = parse_number(s.substr(0, caret)), e = parse_number(s.substr(caret + 1));
    return std::pow(b, e);
  }
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s0 + "'");
  }
  if (pos != s.size()) throw std::invalid_argument("not a number: '" + s0 + "'");
  return v;
}

Config Config::parse(const std::string& text) {
  Config c;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": missing '='");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    if (c.kv_.count(key)) throw std::invalid_argument("config line " + std::to_string(lineno) + ": duplicate key " + key);
    c.kv_[key] = unquote(trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

std::string Config::str(const std::string& key, const std::string& def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  seen_[key] = true;
  return it->second;
}

double Config::num(const std::string& key, double def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  seen_[key] = true;
  try {
    return parse_number(it->second);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": not a number");
  }
}

long long Config::integer(const std::string& key, long long def) const {
  if (!has(key)) return def;
  double v = num(key, 0.0);
  if (v != std::floor(v)) throw std::invalid_argument("config key " + key + ": not an integer");
  return static_cast<long long>(v);
}

std::uint64_t Config::u64(const std::string& key, std::uint64_t def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  seen_[key] = true;
  try {
    std::size_t pos = 0;
    auto v = std::stoull(it->second, &pos, 0);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": not an unsigned integer");
  }
}

std::vector<double> Config::nums(const std::string& key, const std::vector<double>& def) const {
  if (!has(key)) return def;
  std::vector<double> out;
  for (const auto& s : strs(key, {})) {
    try {
      out.push_back(parse_number(s));
    } catch (const std::exception&) {
      throw std::invalid_argument("config key " + key + ": bad list entry '" + s + "'");
    }
  }
  return out;
}

std::vector<std::string> Config::strs(const std::string& key, const std::vector<std::string>& def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  seen_[key] = true;
  return split_list(it->second);
}

std::vector<std::string> Config::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : kv_)
    if (!seen_.count(k)) out.push_back(k);
  return out;
}

std::string Config::dump() const {
  std::string s;
  for (const auto& [k, v] : kv_) s += k + " = " + v + "\n";
  return s;
}

}  // namespace selfsim
