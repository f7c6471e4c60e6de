#pragma once

// JSON and CSV encodings of the core types.  Doubles are written with 17
// significant digits (CSV) or nlohmann's shortest round-trip form (JSON), so
// finite values survive a write/read cycle bit for bit.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "snowflake/spaces.hpp"

namespace snowflake::io {

using Json = nlohmann::json;

/// Exponent as a JSON number, or the string "inf".
Json exponent_to_json(double p);
double exponent_from_json(const Json& j);

/// {"labels":[...], "dist":[[...],...]}
Json to_json(const FiniteMetricSpace& space);
FiniteMetricSpace metric_space_from_json(const Json& j);

/// {"alpha":a, "p":p, "images":{"label":[coords]}}
Json to_json(const EmbeddingTable& table);
EmbeddingTable embedding_from_json(const Json& j, const FiniteMetricSpace& source);

/// {"values":[...]}
Json to_json(const StepFunction& f);
StepFunction step_function_from_json(const Json& j);

/// {"p":p, "coords":[...]} (plus "block" when > 1)
Json to_json(const PNormVector& v);
PNormVector vector_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

/// Formats a double with 17 significant digits, '.' decimal separator.
std::string format_double(double x);

/// Minimal CSV writer: a header row, then rows of doubles.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
};

}  // namespace snowflake::io
