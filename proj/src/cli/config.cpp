#include "snowflake/cli/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "snowflake/spaces.hpp"

namespace snowflake::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
  return true;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trim(std::string_view(text).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    parts.emplace_back(piece);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return parts;
}

double parse_double(std::string_view text, const std::string& key) {
  if (text == "inf" || text == "infinity") return kInfinity;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  require(ec == std::errc() && ptr == text.data() + text.size() && !text.empty(),
          "config key '" + key + "': expected a number, got '" + std::string(text) + "'");
  return value;
}

std::uint64_t parse_unsigned(std::string_view text, const std::string& key) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  require(ec == std::errc() && ptr == text.data() + text.size() && !text.empty(),
          "config key '" + key + "': expected a non-negative integer, got '" + std::string(text) + "'");
  return value;
}

}  // namespace

KeyValues parse_config_text(std::string_view text, const std::string& origin) {
  KeyValues out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    require(eq != std::string_view::npos, where + ": malformed line (expected key = value)");
    const auto key = trim(line.substr(0, eq));
    require(valid_key(key), where + ": malformed line (invalid key '" + std::string(key) + "')");
    out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

KeyValues load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

Config Config::resolve(const KeyValues& defaults, const KeyValues& file, const KeyValues& flags) {
  KeyValues merged = defaults;
  for (const KeyValues* layer : {&file, &flags}) {
    for (const auto& [key, value] : *layer) {
      if (!defaults.count(key)) {
        std::string valid;
        for (const auto& [k, v] : defaults) valid += (valid.empty() ? "" : ", ") + k;
        throw ValidationError("unknown config key '" + key + "'; valid keys: " + valid);
      }
      merged[key] = value;
    }
  }
  return Config(std::move(merged));
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

bool Config::given(const std::string& key) const {
  const auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

const std::string& Config::text(const std::string& key) const {
  const auto it = values_.find(key);
  require(it != values_.end(), "missing config key '" + key + "'");
  return it->second;
}

double Config::number(const std::string& key) const {
  require(given(key), "config key '" + key + "' is required");
  return parse_double(text(key), key);
}

std::size_t Config::count(const std::string& key) const {
  require(given(key), "config key '" + key + "' is required");
  return static_cast<std::size_t>(parse_unsigned(text(key), key));
}

std::uint64_t Config::seed(const std::string& key) const {
  require(given(key), "config key '" + key + "' is required");
  return parse_unsigned(text(key), key);
}

bool Config::flag(const std::string& key) const {
  const std::string& value = text(key);
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no" || value.empty()) return false;
  throw ValidationError("config key '" + key + "': expected true or false, got '" + value + "'");
}

std::vector<double> Config::numbers(const std::string& key) const {
  require(given(key), "config key '" + key + "' is required");
  std::vector<double> out;
  for (const auto& part : split_commas(text(key))) out.push_back(parse_double(part, key));
  return out;
}

std::vector<std::size_t> Config::counts(const std::string& key) const {
  require(given(key), "config key '" + key + "' is required");
  std::vector<std::size_t> out;
  for (const auto& part : split_commas(text(key))) out.push_back(static_cast<std::size_t>(parse_unsigned(part, key)));
  return out;
}

}  // namespace snowflake::cli
