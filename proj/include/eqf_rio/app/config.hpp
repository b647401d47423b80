#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "eqf_rio/lie/types.hpp"

namespace eqf_rio {

/// Parse or validation error in a configuration file. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Flat "key = value" file. Keys may contain dots; '#' starts a comment.
class KeyValueFile {
 public:
  static KeyValueFile load(const std::string& path);
  static KeyValueFile parse(const std::string& text, const std::string& source = "<string>");

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Three numbers separated by commas or whitespace.
  Vector3d get_vec3(const std::string& key, const Vector3d& fallback) const;

  /// Throws ConfigError naming the first key not in allowed.
  void reject_unknown(const std::set<std::string>& allowed) const;

  std::string to_string() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  std::map<std::string, Entry> entries_;
  std::string source_;
};

}  // namespace eqf_rio
