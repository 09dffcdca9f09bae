#include "potrec/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "potrec/error.hpp"

namespace potrec {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  return true;
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  // from_chars rejects a leading '+'.
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Config Config::parse(std::string_view text, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  auto error = [&](const std::string& why) {
    throw Error(ErrorCode::Config, source + ":" + std::to_string(line_no) + ": " + why);
  };
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string_view::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') error("unterminated section header");
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!valid_name(name)) error("invalid section name '" + std::string(name) + "'");
      section = std::string(name);
      cfg.data_[section];
    } else {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) error("expected 'key = value'");
      const std::string_view key = trim(line.substr(0, eq));
      const std::string_view value = trim(line.substr(eq + 1));
      if (section.empty()) error("key '" + std::string(key) + "' outside any section");
      if (!valid_name(key)) error("invalid key '" + std::string(key) + "'");
      auto& keys = cfg.data_[section];
      if (keys.count(std::string(key))) error("duplicate key '" + std::string(key) + "' in [" + section + "]");
      keys[std::string(key)] = {std::string(value), line_no};
    }
    if (end == text.size()) break;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Config, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto it = data_.find(section);
  return it != data_.end() && it->second.count(key) > 0;
}

bool Config::has_section(const std::string& section) const { return data_.count(section) > 0; }

std::vector<std::string> Config::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, keys] : data_) out.push_back(name);
  return out;
}

std::vector<std::string> Config::keys(const std::string& section) const {
  std::vector<std::string> out;
  const auto it = data_.find(section);
  if (it != data_.end())
    for (const auto& [k, v] : it->second) out.push_back(k);
  return out;
}

const Config::Entry& Config::entry(const std::string& section, const std::string& key) const {
  const auto it = data_.find(section);
  if (it == data_.end() || !it->second.count(key))
    throw Error(ErrorCode::Config, source_ + ": missing key '" + key + "' in [" + section + "]");
  return it->second.at(key);
}

void Config::fail(const std::string& section, const std::string& key, const std::string& why) const {
  throw Error(ErrorCode::Config,
              source_ + ":" + std::to_string(line_of(section, key)) + ": [" + section + "] " + key + ": " + why);
}

int Config::line_of(const std::string& section, const std::string& key) const {
  return has(section, key) ? data_.at(section).at(key).line : 0;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  return entry(section, key).value;
}

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  double v = 0.0;
  if (!parse_number(entry(section, key).value, v)) fail(section, key, "expected a number");
  return v;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key) const {
  const std::string_view s = trim(entry(section, key).value);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(section, key, "expected an integer");
  return v;
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string& v = entry(section, key).value;
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  fail(section, key, "expected true/false");
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key) const {
  const std::string& v = entry(section, key).value;
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const std::size_t comma = std::min(v.find(',', pos), v.size());
    double x = 0.0;
    if (!parse_number(std::string_view(v).substr(pos, comma - pos), x)) fail(section, key, "expected comma-separated numbers");
    out.push_back(x);
    pos = comma + 1;
    if (comma == v.size()) break;
  }
  return out;
}

Point Config::get_point(const std::string& section, const std::string& key, const Point& fallback) const {
  if (!has(section, key)) return fallback;
  const std::vector<double> xs = get_list(section, key);
  if (xs.size() > 3) fail(section, key, "at most three coordinates");
  Point p{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < xs.size(); ++i) p[i] = xs[i];
  return p;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  if (!valid_name(section) || !valid_name(key)) throw Error(ErrorCode::Config, "invalid section or key name");
  data_[section][key] = {value, 0};
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [name, keys] : data_) {
    out += "[" + name + "]\n";
    for (const auto& [k, e] : keys) out += k + "=" + e.value + "\n";
  }
  return out;
}

std::string Config::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

}  // namespace potrec
