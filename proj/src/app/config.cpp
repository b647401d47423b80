#include "eqf_rio/app/config.hpp"

#include <fstream>
#include <sstream>

namespace eqf_rio {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& source) {
  KeyValueFile file;
  file.source_ = source;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line) + ": expected 'key = value'");
    }
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line) + ": empty key");
    if (file.entries_.count(key)) {
      throw ConfigError(source + ":" + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    file.entries_[key] = {value, line};
  }
  return file;
}

void KeyValueFile::set(const std::string& key, const std::string& value) { entries_[key] = {value, 0}; }

void KeyValueFile::fail(const std::string& key, const std::string& message) const {
  const auto it = entries_.find(key);
  const int line = it == entries_.end() ? 0 : it->second.line;
  throw ConfigError(source_ + ":" + std::to_string(line) + ": " + key + ": " + message);
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second.value;
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second.value, &pos);
    if (pos != it->second.value.size()) fail(key, "trailing characters in number");
    return v;
  } catch (const std::logic_error&) {
    fail(key, "expected a number, got '" + it->second.value + "'");
  }
}

int KeyValueFile::get_int(const std::string& key, int fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const int v = std::stoi(it->second.value, &pos);
    if (pos != it->second.value.size()) fail(key, "expected an integer");
    return v;
  } catch (const std::logic_error&) {
    fail(key, "expected an integer, got '" + it->second.value + "'");
  }
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second.value;
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  fail(key, "expected a boolean, got '" + v + "'");
}

Vector3d KeyValueFile::get_vec3(const std::string& key, const Vector3d& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::string text = it->second.value;
  for (char& c : text) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(text);
  Vector3d v;
  if (!(in >> v.x() >> v.y() >> v.z())) fail(key, "expected three numbers");
  std::string rest;
  if (in >> rest) fail(key, "expected three numbers");
  return v;
}

void KeyValueFile::reject_unknown(const std::set<std::string>& allowed) const {
  for (const auto& [key, entry] : entries_) {
    if (!allowed.count(key)) {
      throw ConfigError(source_ + ":" + std::to_string(entry.line) + ": unknown key '" + key + "'");
    }
  }
}

std::string KeyValueFile::to_string() const {
  std::ostringstream out;
  for (const auto& [key, entry] : entries_) out << key << " = " << entry.value << '\n';
  return out.str();
}

}  // namespace eqf_rio
