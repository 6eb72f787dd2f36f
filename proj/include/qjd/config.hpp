#pragma once

// Flat `dotted.key = value` configuration files. '#' starts a comment, blank
// lines are ignored, list values are comma separated.

#include "qjd/core.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qjd {

class FlatConfig {
 public:
  static FlatConfig parse(std::istream& in);
  static FlatConfig parse_string(const std::string& text);
  static FlatConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.contains(key); }
  void set(const std::string& key, std::string value);
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& key) const;
  std::optional<std::uint64_t> get_u64(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  std::optional<std::vector<std::string>> get_list(const std::string& key) const;

  /// Throws ParseError naming the first key not in `known`.
  void require_known(const std::vector<std::string>& known) const;

  /// Canonical text form, keys sorted.
  std::string to_text() const;

 private:
  int line_of(const std::string& key) const;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
};

}  // namespace qjd
