#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace selfsim {

// Flat "key = value" file. '#' starts a comment, blank lines are ignored,
// values may be comma separated lists. Quotes around values are stripped.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

  std::string str(const std::string& key, const std::string& def) const;
  double num(const std::string& key, double def) const;
  long long integer(const std::string& key, long long def) const;
  std::uint64_t u64(const std::string& key, std::uint64_t def) const;
  std::vector<double> nums(const std::string& key, const std::vector<double>& def) const;
  std::vector<std::string> strs(const std::string& key, const std::vector<std::string>& def) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }
  // Keys set in the file but never read.
  std::vector<std::string> unused() const;
  std::string dump() const;

 private:
  std::map<std::string, std::string> kv_;
  mutable std::map<std::string, bool> seen_;
};

// Accepts plain numbers and 2^k.
double parse_number(const std::string& s);

}  // namespace selfsim
