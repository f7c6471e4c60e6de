#include "snowflake/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace snowflake::io {

Json exponent_to_json(double p) {
  if (p == kInfinity) return "inf";
  return p;
}

double exponent_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    require(s == "inf" || s == "infinity", "exponent string must be \"inf\"");
    return kInfinity;
  }
  require(j.is_number(), "exponent must be a number or \"inf\"");
  return j.get<double>();
}

Json to_json(const FiniteMetricSpace& space) {
  return Json{{"labels", space.labels()}, {"dist", space.matrix()}};
}

FiniteMetricSpace metric_space_from_json(const Json& j) {
  require(j.is_object() && j.contains("labels") && j.contains("dist"),
          "metric space JSON needs \"labels\" and \"dist\"");
  std::vector<std::string> labels;
  for (const auto& l : j.at("labels")) labels.push_back(l.is_string() ? l.get<std::string>() : l.dump());
  return FiniteMetricSpace(std::move(labels), j.at("dist").get<std::vector<std::vector<double>>>());
}

Json to_json(const EmbeddingTable& table) {
  Json images = Json::object();
  for (std::size_t i = 0; i < table.source().size(); ++i)
    images[table.source().label(i)] = table.image(i).coords();
  Json j{{"alpha", table.alpha()}, {"p", exponent_to_json(table.p())}, {"images", images}};
  if (table.images().front().block() > 1) j["block"] = table.images().front().block();
  return j;
}

EmbeddingTable embedding_from_json(const Json& j, const FiniteMetricSpace& source) {
  require(j.is_object() && j.contains("alpha") && j.contains("p") && j.contains("images"),
          "embedding JSON needs \"alpha\", \"p\" and \"images\"");
  const double p = exponent_from_json(j.at("p"));
  const std::size_t block = j.value("block", std::size_t{1});
  const auto& images = j.at("images");
  std::vector<PNormVector> out;
  for (const auto& label : source.labels()) {
    require(images.contains(label), "embedding JSON has no image for label '" + label + "'");
    out.emplace_back(images.at(label).get<std::vector<double>>(), p, block);
  }
  require(images.size() == source.size(), "embedding JSON has images for unknown labels");
  return EmbeddingTable(source, std::move(out), j.at("alpha").get<double>());
}

Json to_json(const StepFunction& f) { return Json{{"values", f.values()}}; }

StepFunction step_function_from_json(const Json& j) {
  if (j.is_array()) return StepFunction(j.get<std::vector<double>>());
  require(j.is_object() && j.contains("values"), "step function JSON needs \"values\"");
  return StepFunction(j.at("values").get<std::vector<double>>());
}

Json to_json(const PNormVector& v) {
  Json j{{"p", exponent_to_json(v.p())}, {"coords", v.coords()}};
  if (v.block() > 1) j["block"] = v.block();
  return j;
}

PNormVector vector_from_json(const Json& j) {
  require(j.is_object() && j.contains("p") && j.contains("coords"), "vector JSON needs \"p\" and \"coords\"");
  return PNormVector(j.at("coords").get<std::vector<double>>(), exponent_from_json(j.at("p")),
                     j.value("block", std::size_t{1}));
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open input file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("malformed JSON in '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << j.dump(2) << '\n';
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  // Locale-proof: snprintf honors LC_NUMERIC.
  for (char& c : buf)
    if (c == ',') c = '.';
  return buf;
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
  out_ << '\n';
}

}  // namespace snowflake::io
