#pragma once

// Flat key=value run configuration.  Values resolve as defaults < config
// file < command-line flags; typed accessors raise ValidationError naming
// the key on malformed values.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace snowflake::cli {

using KeyValues = std::map<std::string, std::string>;

/// Parses "key = value" lines; '#' starts a comment, blank lines are
/// skipped.  `origin` names the source in error messages ("path:line N").
KeyValues parse_config_text(std::string_view text, const std::string& origin);

/// Reads and parses a config file.
KeyValues load_config_file(const std::string& path);

class Config {
 public:
  Config() = default;
  explicit Config(KeyValues values) : values_(std::move(values)) {}

  /// defaults < file < flags; keys absent from `defaults` are rejected with
  /// the list of valid keys.
  static Config resolve(const KeyValues& defaults, const KeyValues& file, const KeyValues& flags);

  const KeyValues& values() const { return values_; }
  bool has(const std::string& key) const;
  /// Present and non-empty.
  bool given(const std::string& key) const;

  const std::string& text(const std::string& key) const;
  /// Accepts "inf" for infinity.
  double number(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  std::uint64_t seed(const std::string& key = "seed") const;
  bool flag(const std::string& key) const;
  /// Comma-separated numbers.
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::size_t> counts(const std::string& key) const;

 private:
  KeyValues values_;
};

}  // namespace snowflake::cli
