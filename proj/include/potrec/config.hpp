#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "potrec/grid.hpp"

namespace potrec {

/// Plain-text key-value configuration with sections:
///
///   # comment
///   [section]
///   key = value        ; trailing comments allowed
///
/// Keys must live inside a section and may appear once per section. All
/// errors are ErrorCode::Config and name the source and line.
class Config {
 public:
  static Config parse(std::string_view text, const std::string& source = "<string>");
  static Config load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  std::vector<std::string> sections() const;
  std::vector<std::string> keys(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  /// Comma-separated numbers.
  std::vector<double> get_list(const std::string& section, const std::string& key) const;
  /// Up to three comma-separated coordinates; missing ones are zero.
  Point get_point(const std::string& section, const std::string& key, const Point& fallback) const;

  /// Line of a key in the source, for diagnostics (0 when absent).
  int line_of(const std::string& section, const std::string& key) const;
  const std::string& source() const noexcept { return source_; }

  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Sorted "[section]\nkey=value\n" rendering; independent of layout and comments.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry& entry(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& why) const;

  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> data_;
};

/// FNV-1a 64-bit digest.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace potrec
