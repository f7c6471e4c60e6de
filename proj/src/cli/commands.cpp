#include "snowflake/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "snowflake/cli/config.hpp"
#include "snowflake/embeddings.hpp"
#include "snowflake/io.hpp"
#include "snowflake/reductions.hpp"
#include "snowflake/search.hpp"
#include "snowflake/typecotype.hpp"

namespace snowflake::cli {

namespace {

using io::Json;

struct Option {
  std::string key;
  std::string default_value;
  std::string help;
};

class Context {
 public:
  Context(std::string name, const Config& cfg, std::ostream& out) : name_(std::move(name)), cfg_(cfg), out_(out) {}

  const Config& cfg() const { return cfg_; }
  std::ostream& out() { return out_; }

  Json read_json(const std::string& key) {
    const std::string& path = cfg_.text(key);
    inputs_.push_back(path);
    return io::read_json_file(path);
  }

  /// Writes the primary output to --out, or to stdout when no path is set.
  void emit(const std::string& payload) {
    if (cfg_.given("out")) {
      const std::string& path = cfg_.text("out");
      std::ofstream file(path, std::ios::binary);
      require(static_cast<bool>(file), "cannot open output file '" + path + "'");
      file << payload;
      require(static_cast<bool>(file), "failed writing output file '" + path + "'");
      outputs_.push_back(path);
    } else {
      out_ << payload;
    }
  }

  void emit(const Json& j) { emit(j.dump(2) + "\n"); }

  void write_manifest(double seconds) const;

 private:
  std::string name_;
  const Config& cfg_;
  std::ostream& out_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
};

std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void Context::write_manifest(double seconds) const {
  Json inputs = Json::array();
  for (const auto& path : inputs_) inputs.push_back({{"path", path}, {"fnv1a64", fnv1a64_file(path)}});
  Json manifest{{"subcommand", name_},
                {"config", cfg_.values()},
                {"inputs", inputs},
                {"outputs", outputs_},
                {"wall_clock_seconds", seconds}};
  if (cfg_.given("seed")) manifest["seed"] = cfg_.seed();
  std::string path;
  if (cfg_.given("manifest")) {
    path = cfg_.text("manifest");
  } else if (cfg_.given("out")) {
    path = cfg_.text("out") + ".manifest.json";
  } else {
    path = name_ + ".manifest.json";
  }
  io::write_json_file(path, manifest);
}

struct Command {
  std::string name;
  std::string summary;
  std::vector<Option> options;
  std::function<void(Context&)> handler;
};

std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream s;
  io::CsvWriter csv(s);
  csv.header(header);
  for (const auto& r : rows) csv.row(r);
  return s.str();
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  require(n >= 1, "sample count must be >= 1");
  require(hi >= lo, "range must satisfy t-min <= t-max");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

KochParams koch_params(const Config& cfg) {
  if (cfg.given("alpha")) return KochParams::from_alpha(cfg.number("alpha"));
  return KochParams::from_ratio(cfg.number("r"));
}

FiniteMetricSpace read_space(Context& ctx) {
  if (ctx.cfg().given("space")) return io::metric_space_from_json(ctx.read_json("space"));
  require(ctx.cfg().given("builtin"), "either --space or --builtin is required");
  return builtin_space(ctx.cfg().text("builtin"));
}

std::vector<PNormVector> read_vectors(Context& ctx, const std::string& key, double default_p) {
  const Json j = ctx.read_json(key);
  require(j.is_array(), "vector family JSON must be an array");
  std::vector<PNormVector> out;
  for (const auto& v : j) {
    if (v.is_array()) {
      out.emplace_back(v.get<std::vector<double>>(), default_p);
    } else {
      out.push_back(io::vector_from_json(v));
    }
  }
  return out;
}

Mode read_mode(const Config& cfg) {
  const std::string& mode = cfg.text("mode");
  if (mode == "exact") return ExactMode{};
  if (mode == "sampled") return SampledMode{cfg.seed(), cfg.count("samples")};
  throw ValidationError("mode must be 'exact' or 'sampled', got '" + mode + "'");
}

Json ratio_json(const RatioEstimate& r, const Config& cfg) {
  return Json{{"ratio", r.value}, {"std_error", r.std_error}, {"samples", r.samples}, {"mode", cfg.text("mode")}};
}

// Maps R -> R^n used by the lifts: a tabulated JSON map, or the Hölder line
// map tabulated at the inputs that will be looked up.
TabulatedMap read_line_map(Context& ctx, std::span<const double> inputs) {
  if (ctx.cfg().given("map")) return TabulatedMap::from_json(ctx.read_json("map"));
  const HolderLineMap line(ctx.cfg().number("line-map-alpha"));
  return TabulatedMap::at_points(inputs, [&](double t) { return line(t); });
}

// Grid-point generators shared by metric-type (m = 2) and metric-cotype.
GridMap::Generator grid_generator(const Config& cfg, unsigned m) {
  const std::string& name = cfg.text("generator");
  const double p = cfg.number("norm-p");
  if (name == "identity-lp") {
    return [p](const std::vector<unsigned>& s) {
      std::vector<double> coords(s.begin(), s.end());
      return PNormVector(std::move(coords), p);
    };
  }
  if (name == "sigma") {
    return [p, m](const std::vector<unsigned>& s) { return sigma_embed(s, m, p); };
  }
  if (name == "koch-composite") {
    const KochParams params = KochParams::from_ratio(cfg.number("r"));
    return [p, m, params](const std::vector<unsigned>& s) {
      std::vector<double> coords;
      for (unsigned k : s) {
        const Point2 z = koch_eval(params, static_cast<double>(k % m) / static_cast<double>(m));
        coords.push_back(z.x);
        coords.push_back(z.y);
      }
      return PNormVector(std::move(coords), p, 2);
    };
  }
  throw ValidationError("unknown generator '" + name + "' (expected identity-lp, sigma or koch-composite)");
}

BaseMap read_base(const Config& cfg) {
  const std::string& name = cfg.text("base");
  const double q = cfg.number("q");
  if (name == "linear") return linear_base_map(q);
  if (name == "identity") return identity_base_map(q);
  if (name == "koch") {
    require(q == 2.0, "base 'koch' maps into l_2^2: q must be 2");
    return koch_base_map(cfg.number("p") / q, 20000, 1.5, cfg.seed());
  }
  throw ValidationError("unknown base map '" + name + "' (expected linear, identity or koch)");
}

ReductionFamily read_family(const Config& cfg) {
  const BaseMap base = read_base(cfg);
  const double p = cfg.number("p");
  const double q = cfg.number("q");
  const double c = cfg.number("c");
  const double d = cfg.given("d") ? cfg.number("d") : base.A * std::pow(c, p / q);
  return scaled_family(base, p, q, c, d);
}

SequencePair read_pair(Context& ctx, std::size_t horizon) {
  if (ctx.cfg().given("pair")) {
    const Json j = ctx.read_json("pair");
    require(j.is_object() && j.contains("x") && j.contains("y"), "sequence pair JSON needs \"x\" and \"y\"");
    const double p = j.contains("p") ? io::exponent_from_json(j.at("p")) : 2.0;
    std::vector<PNormVector> x, y;
    for (const auto& v : j.at("x")) x.emplace_back(v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()}, p);
    for (const auto& v : j.at("y")) y.emplace_back(v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()}, p);
    return SequencePair(std::move(x), std::move(y));
  }
  const std::vector<double> d = planted_distances(ctx.cfg().text("plant"), horizon);
  return plant_pair(d, ctx.cfg().seed());
}

SearchConfig read_search_config(const Config& cfg) {
  SearchConfig s;
  s.target_dim = cfg.count("dim");
  s.target_exponent = cfg.number("target-p");
  s.alpha = cfg.number("alpha");
  return s;
}

Json search_json(const SearchResult& r) {
  const DistortionReport report = holder_distortion(r.table);
  return Json{{"constantA", r.constantA},
              {"objective", r.objective},
              {"distortion", report.distortion()},
              {"restart_values", r.restart_values},
              {"evaluations", r.evaluations},
              {"embedding", io::to_json(r.table)}};
}

// ---------------------------------------------------------------- commands

void cmd_curve(Context& ctx) {
  std::ostringstream s;
  write_curve_csv(s, koch_params(ctx.cfg()), ctx.cfg().count("samples"), static_cast<int>(ctx.cfg().count("depth")));
  ctx.emit(s.str());
}

void cmd_extend(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const KochParams params = koch_params(cfg);
  const auto steps = static_cast<int>(cfg.count("max-steps"));
  const auto ts = linspace(cfg.number("t-min"), cfg.number("t-max"), cfg.count("samples"));
  std::vector<std::vector<double>> rows(ts.size());
  std::vector<std::string> errors(ts.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < ts.size(); ++i) {
    try {
      const Point2 z = koch_extend(params, ts[i], steps);
      rows[i] = {ts[i], z.x, z.y};
    } catch (const ValidationError& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors) require(e.empty(), e);
  ctx.emit(csv_text({"t", "x", "y"}, rows));
}

void cmd_line_map(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const HolderLineMap map(cfg.number("alpha"), static_cast<int>(cfg.count("max-steps")));
  const auto ts = linspace(cfg.number("t-min"), cfg.number("t-max"), cfg.count("samples"));
  std::vector<std::vector<double>> rows(ts.size());
  std::vector<std::string> errors(ts.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < ts.size(); ++i) {
    try {
      rows[i] = map(ts[i]);
      rows[i].insert(rows[i].begin(), ts[i]);
    } catch (const ValidationError& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors) require(e.empty(), e);
  std::vector<std::string> header{"t"};
  for (std::size_t k = 0; k < map.dimension(); ++k) header.push_back("y" + std::to_string(k));
  ctx.emit(csv_text(header, rows));
}

void cmd_lift_lr(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const StepFunction f = io::step_function_from_json(ctx.read_json("f"));
  std::optional<StepFunction> g;
  if (cfg.given("g")) g = io::step_function_from_json(ctx.read_json("g"));
  std::vector<double> inputs = f.values();
  if (g) inputs.insert(inputs.end(), g->values().begin(), g->values().end());
  const TabulatedMap map = read_line_map(ctx, inputs);
  const double r = cfg.number("r");
  const double s = cfg.number("s");
  const StepFunction lifted = lift_lr(map, f, r, s);
  Json j{{"n", map.dimension()}, {"pieces", lifted.pieces()}, {"values", lifted.values()}};
  if (g) {
    const StepFunction lifted_g = lift_lr(map, *g, r, s);
    j["lift_distance_pow_s"] = std::pow(lr_distance(lifted, lifted_g, s), s);
    j["integrand"] = lift_lr_integrand(map, f, *g, s);
  }
  ctx.emit(j);
}

void cmd_lift_c0(Context& ctx) {
  const Json jx = ctx.read_json("x");
  const std::vector<double> x = jx.is_array() ? jx.get<std::vector<double>>() : jx.at("values").get<std::vector<double>>();
  const TabulatedMap map = read_line_map(ctx, x);
  ctx.emit(Json{{"n", map.dimension()}, {"values", lift_c0(map, x)}});
}

void cmd_discretize(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const Json jf = ctx.read_json("family");
  require(jf.is_array(), "family JSON must be an array of step functions");
  std::vector<StepFunction> family;
  for (const auto& f : jf) family.push_back(io::step_function_from_json(f));
  const double r = cfg.number("r");
  const std::size_t threshold = discretization_threshold(family, r);
  const std::size_t m = cfg.count("m") == 0 ? std::max<std::size_t>(threshold, 1) : cfg.count("m");
  const auto vectors = discretize_lr(family, r, m);
  Json pairs = Json::array();
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const double exact = lr_distance(family[i], family[j], r);
      const double sampled = p_distance(vectors[i], vectors[j]);
      pairs.push_back({{"i", i}, {"j", j}, {"lr", exact}, {"sampled", sampled},
                       {"ratio", exact > 0.0 ? Json(sampled / exact) : Json(nullptr)}});
    }
  }
  Json vecs = Json::array();
  for (const auto& v : vectors) vecs.push_back(v.coords());
  ctx.emit(Json{{"m", m}, {"threshold", threshold}, {"vectors", vecs}, {"pairs", pairs}});
}

void cmd_kuratowski(Context& ctx) {
  const FiniteMetricSpace space = read_space(ctx);
  const std::string& mode = ctx.cfg().text("recenter");
  Recenter recenter;
  if (mode == "none") {
    recenter = Recenter::none;
  } else if (mode == "shift") {
    recenter = Recenter::shift;
  } else if (mode == "unit") {
    recenter = Recenter::unit;
  } else {
    throw ValidationError("recenter must be none, shift or unit");
  }
  const EmbeddingTable table = kuratowski_embed(space, recenter);
  const DistortionReport report = holder_distortion(space, table);
  ctx.emit(Json{{"embedding", io::to_json(table)},
                {"max_ratio", report.max_ratio},
                {"min_ratio", report.min_ratio},
                {"constantA", report.constantA}});
}

void cmd_round(Context& ctx) {
  const Json j = ctx.read_json("in");
  std::size_t first = ctx.cfg().count("first-index");
  std::vector<double> x;
  if (j.is_array()) {
    x = j.get<std::vector<double>>();
  } else {
    require(j.is_object() && j.contains("values"), "round input must be an array or {\"first_index\", \"values\"}");
    x = j.at("values").get<std::vector<double>>();
    first = j.value("first_index", first);
  }
  ctx.emit(Json(dyadic_round(x, first)));
}

void cmd_type(Context& ctx) {
  const auto vectors = read_vectors(ctx, "vectors", ctx.cfg().number("norm-p"));
  ctx.emit(ratio_json(rademacher_type_ratio(vectors, ctx.cfg().number("p"), read_mode(ctx.cfg())), ctx.cfg()));
}

void cmd_cotype(Context& ctx) {
  const auto vectors = read_vectors(ctx, "vectors", ctx.cfg().number("norm-p"));
  ctx.emit(ratio_json(rademacher_cotype_ratio(vectors, ctx.cfg().number("q"), read_mode(ctx.cfg())), ctx.cfg()));
}

void cmd_metric_type(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const double p = cfg.number("p");
  std::vector<std::vector<double>> rows;
  if (cfg.given("map")) {
    const Json j = ctx.read_json("map");
    require(j.is_object() && j.contains("n") && j.contains("images"), "hypercube map JSON needs \"n\" and \"images\"");
    std::vector<PNormVector> images;
    for (const auto& v : j.at("images")) images.push_back(io::vector_from_json(v));
    const auto n = j.at("n").get<unsigned>();
    rows.push_back({static_cast<double>(n), metric_type_ratio(HypercubeMap(n, std::move(images)), p)});
  } else {
    const auto generator = grid_generator(cfg, 2);
    for (std::size_t n : cfg.counts("n-values")) {
      require(n >= 1 && n <= 24, "n-values entries must lie in 1..24");
      std::vector<PNormVector> images;
      for (std::size_t s = 0; s < (std::size_t{1} << n); ++s) {
        std::vector<unsigned> bits(n);
        for (std::size_t j = 0; j < n; ++j) bits[j] = static_cast<unsigned>((s >> j) & 1U);
        images.push_back(generator(bits));
      }
      rows.push_back({static_cast<double>(n), metric_type_ratio(HypercubeMap(static_cast<unsigned>(n), std::move(images)), p)});
    }
  }
  ctx.emit(csv_text({"n", "ratio"}, rows));
}

void cmd_metric_cotype(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const double q = cfg.number("q");
  const Mode mode = read_mode(cfg);
  std::vector<std::vector<double>> rows;
  const auto add_row = [&](const GridMap& map) {
    const RatioEstimate r = metric_cotype_ratio(map, q, mode);
    rows.push_back({static_cast<double>(map.m()), r.value, r.std_error, static_cast<double>(r.samples)});
  };
  if (cfg.given("map")) {
    const Json j = ctx.read_json("map");
    require(j.is_object() && j.contains("n") && j.contains("m") && j.contains("images"),
            "grid map JSON needs \"n\", \"m\" and \"images\"");
    std::vector<PNormVector> images;
    for (const auto& v : j.at("images")) images.push_back(io::vector_from_json(v));
    add_row(GridMap::from_table(j.at("n").get<unsigned>(), j.at("m").get<unsigned>(), std::move(images)));
  } else {
    const auto n = static_cast<unsigned>(cfg.count("n"));
    std::vector<std::size_t> ms;
    if (cfg.given("sweep-c")) {
      // m >= C n^(1/q), rounded up to even, then the next m-count - 1 even values.
      const double lowest = cfg.number("sweep-c") * std::pow(static_cast<double>(n), 1.0 / q);
      auto m0 = static_cast<std::size_t>(std::ceil(lowest - 1e-12));
      m0 = std::max<std::size_t>(2, m0 + (m0 % 2));
      for (std::size_t k = 0; k < cfg.count("m-count"); ++k) ms.push_back(m0 + 2 * k);
    } else {
      ms = cfg.counts("m-values");
    }
    for (std::size_t m : ms) add_row(GridMap(n, static_cast<unsigned>(m), grid_generator(cfg, static_cast<unsigned>(m))));
  }
  ctx.emit(csv_text({"m", "gamma", "std_error", "samples"}, rows));
}

void cmd_sigma(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto m = static_cast<unsigned>(cfg.count("m"));
  const double q = cfg.number("q");
  std::vector<unsigned> s;
  for (std::size_t v : cfg.counts("s")) s.push_back(static_cast<unsigned>(v));
  const PNormVector image = sigma_embed(s, m, q);
  std::vector<double> half, unit;
  for (std::size_t j = 0; j < s.size(); ++j) {
    std::vector<unsigned> shifted = s;
    shifted[j] = (shifted[j] + m / 2) % m;
    const PNormVector h = sigma_embed(shifted, m, q);
    shifted[j] = (s[j] + 1) % m;
    const PNormVector u = sigma_embed(shifted, m, q);
    half.push_back(std::hypot(h[2 * j] - image[2 * j], h[2 * j + 1] - image[2 * j + 1]));
    unit.push_back(std::hypot(u[2 * j] - image[2 * j], u[2 * j + 1] - image[2 * j + 1]));
  }
  ctx.emit(Json{{"image", io::to_json(image)}, {"half_shift_distances", half}, {"unit_step_distances", unit}});
}

void cmd_profile(Context& ctx) {
  const SpaceDescriptor space = SpaceDescriptor::parse(ctx.cfg().text("space"));
  const TypeCotypeProfile profile = space_profile(space);
  const std::string text = "space: " + space.to_string() + "\np_sup: " + io::format_double(profile.p_sup) +
                           "\nq_inf: " + io::format_double(profile.q_inf) + "\n";
  if (ctx.cfg().given("out")) {
    ctx.emit(Json{{"space", space.to_string()},
                  {"p_sup", io::exponent_to_json(profile.p_sup)},
                  {"q_inf", io::exponent_to_json(profile.q_inf)}});
  }
  ctx.out() << text;
}

void cmd_conditions(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const NecessaryConditions c =
      necessary_conditions(cfg.number("r"), cfg.number("s"), cfg.number("p"), cfg.number("q"));
  if (cfg.given("out")) {
    ctx.emit(Json{{"exponent_order", c.exponent_order},
                  {"type_clause", c.type_clause},
                  {"cotype_clause", c.cotype_clause},
                  {"all", c.all()}});
  }
  ctx.out() << "exponent_order: " << bool_text(c.exponent_order) << "\ntype_clause: " << bool_text(c.type_clause)
            << "\ncotype_clause: " << bool_text(c.cotype_clause) << "\nall: " << bool_text(c.all()) << "\n";
}

void cmd_verdict(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const bool reducible = iff_verdict(cfg.number("r"), cfg.number("p"), cfg.number("s"), cfg.number("q"));
  if (cfg.given("out")) ctx.emit(Json{{"reducible", reducible}});
  ctx.out() << "reducible: " << bool_text(reducible) << "\n";
}

void cmd_theta(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const ReductionFamily family = read_family(cfg);
  const SequencePair pair = read_pair(ctx, cfg.count("horizon"));
  const auto tx = theta(family, pair.x());
  const auto ty = theta(family, pair.y());
  const ThetaSums sums = theta_partial_sums(tx, ty, family.q, pair.horizon());
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  for (std::size_t i = 0; i < tx.size(); ++i) {
    width = tx[i].values.size();
    std::vector<double> row{static_cast<double>(tx[i].index), static_cast<double>(tx[i].n), static_cast<double>(tx[i].m)};
    row.insert(row.end(), tx[i].values.begin(), tx[i].values.end());
    row.insert(row.end(), ty[i].values.begin(), ty[i].values.end());
    rows.push_back(std::move(row));
  }
  std::vector<std::string> header{"index", "n", "m"};
  for (std::size_t k = 0; k < width; ++k) header.push_back("x" + std::to_string(k));
  for (std::size_t k = 0; k < width; ++k) header.push_back("y" + std::to_string(k));
  ctx.emit(csv_text(header, rows));
  if (cfg.given("out"))
    ctx.out() << "flat_sum: " << io::format_double(sums.flat) << "\nblockwise_sum: " << io::format_double(sums.blockwise)
              << "\n";
}

void cmd_scale_family(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const ReductionFamily family = read_family(cfg);
  const PNormVector probe({cfg.number("probe")}, 2.0);
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  for (std::size_t n = 0; n < cfg.count("indices"); ++n) {
    const PNormVector image = family.map(n, probe);
    width = image.size();
    std::vector<double> row{static_cast<double>(n), family.eps(n), family.delta(n)};
    row.insert(row.end(), image.coords().begin(), image.coords().end());
    rows.push_back(std::move(row));
  }
  std::vector<std::string> header{"n", "eps", "delta"};
  for (std::size_t k = 0; k < width; ++k) header.push_back("T" + std::to_string(k));
  ctx.emit(csv_text(header, rows));
  if (cfg.given("out"))
    ctx.out() << "A: " << io::format_double(family.A) << "\nC: " << io::format_double(family.C)
              << "\nD: " << io::format_double(family.D) << "\n";
}

Json diagnostic_json(const CauchyDiagnostic& d) {
  return Json{{"horizon", d.horizon},
              {"sum", d.sum},
              {"last_decade_relative_change", d.last_decade_relative_change},
              {"numerically_cauchy", d.numerically_cauchy}};
}

void cmd_verify_family(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const ReductionFamily family = read_family(cfg);
  const auto samples = sample_regime_pairs(family, cfg.count("indices"), cfg.count("samples"), cfg.seed());
  const ReductionReport report = verify_reduction_conditions(family, samples, cfg.count("cauchy-horizon"));
  Json violations = Json::array();
  static const char* const names[] = {"small", "large", "middle"};
  for (const auto& v : report.violations) {
    violations.push_back({{"n", v.n},
                          {"pair", v.pair},
                          {"regime", names[static_cast<int>(v.regime)]},
                          {"source_distance", v.source_distance},
                          {"image_distance", v.image_distance},
                          {"lower", v.lower},
                          {"upper", io::exponent_to_json(v.upper)}});
  }
  ctx.emit(Json{{"A", family.A},
                {"C", family.C},
                {"D", family.D},
                {"pairs_checked", report.pairs_checked},
                {"regime_counts", {{"small", report.small_count}, {"large", report.large_count}, {"middle", report.middle_count}}},
                {"violations", violations},
                {"eps_sum", diagnostic_json(report.eps_sum)},
                {"delta_sum", diagnostic_json(report.delta_sum)},
                {"coverage", "sampled pairs only; conditions are checked on the listed sample, not proved"}});
}

void cmd_partial_sums(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const SequencePair pair = read_pair(ctx, cfg.count("horizon"));
  const auto trace = ep_partial_sums(pair, cfg.number("p"));
  std::vector<std::vector<double>> rows;
  rows.reserve(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) rows.push_back({static_cast<double>(i + 1), trace[i]});
  ctx.emit(csv_text({"N", cfg.number("p") == 0.0 ? "tail_sup" : "S_N"}, rows));
}

void cmd_window(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const double step = cfg.number("step");
  std::vector<double> samples;
  if (cfg.given("samples")) {
    samples = ctx.read_json("samples").get<std::vector<double>>();
  } else {
    const std::string& fn = cfg.text("function");
    const auto per_unit = static_cast<std::size_t>(std::llround(1.0 / step));
    const std::size_t count = cfg.count("windows") * per_unit + 1;
    for (std::size_t k = 0; k < count; ++k) {
      const double t = 1.0 + static_cast<double>(k) / static_cast<double>(per_unit);
      if (fn == "reciprocal") {
        samples.push_back(1.0 / t);
      } else if (fn == "zero") {
        samples.push_back(0.0);
      } else if (fn == "identity") {
        samples.push_back(t);
      } else {
        throw ValidationError("unknown function '" + fn + "' (expected reciprocal, zero or identity)");
      }
    }
  }
  const auto windows = theta_window(samples, step);
  const double shift = cfg.number("shift");
  std::vector<double> shifted(samples);
  for (double& v : shifted) v += shift;
  const auto other = theta_window(shifted, step);
  const StepFunction zero(std::vector<double>(windows.front().pieces(), 0.0));
  std::vector<std::vector<double>> rows;
  for (std::size_t n = 0; n < windows.size(); ++n)
    rows.push_back({static_cast<double>(n), sup_distance(windows[n], zero), sup_distance(windows[n], other[n])});
  ctx.emit(csv_text({"n", "sup_norm", "shift_distance"}, rows));
}

void cmd_brute(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const FiniteMetricSpace space = read_space(ctx);
  SearchConfig s = read_search_config(cfg);
  s.grid_resolution = cfg.number("resolution");
  s.box_radius = cfg.number("radius");
  s.max_placements = cfg.number("budget");
  ctx.emit(search_json(brute_min_distortion(space, s)));
}

void cmd_search(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const FiniteMetricSpace space = read_space(ctx);
  SearchConfig s = read_search_config(cfg);
  s.restarts = cfg.count("restarts");
  s.iterations = cfg.count("iterations");
  s.seed = cfg.seed();
  s.initial_step = cfg.number("initial-step");
  s.step_decay = cfg.number("decay");
  s.decay_patience = cfg.count("patience");
  const SearchResult result = local_min_distortion(space, s);
  Json j = search_json(result);
  const std::string& builtin = cfg.text("builtin");
  if (!cfg.given("space") && builtin.rfind("path:", 0) == 0) {
    const std::size_t n = space.size() - 1;
    j["path_bound"] = std::pow(static_cast<double>(n), s.alpha - 1.0);
    j["path_bound_check"] = path_alpha_bound_check(n, s.alpha, holder_distortion(result.table));
  }
  ctx.emit(j);
}

void cmd_obstruction(Context& ctx) {
  const auto& cfg = ctx.cfg();
  ObstructionConfig oc;
  for (std::size_t n : cfg.counts("n-values")) oc.n_values.push_back(static_cast<unsigned>(n));
  oc.p_src = cfg.number("p-src");
  oc.p_tgt = cfg.number("p-tgt");
  oc.alpha = cfg.number("alpha");
  oc.type_exponent = cfg.number("type-p");
  oc.restarts = cfg.count("restarts");
  oc.iterations = cfg.count("iterations");
  oc.seed = cfg.seed();
  std::vector<std::vector<double>> rows;
  for (const auto& r : hypercube_obstruction_experiment(oc))
    rows.push_back({static_cast<double>(r.n), r.constantA, r.a_squared, r.target_metric_type_ratio,
                    r.source_metric_type_ratio, r.growth});
  ctx.emit(csv_text({"n", "A", "A_squared", "target_metric_type_ratio", "source_metric_type_ratio", "growth"}, rows));
}

// ---------------------------------------------------------------- table

const std::vector<Option> kSpaceInput{
    {"space", "", "metric space JSON {\"labels\", \"dist\"}"},
    {"builtin", "cycle:4", "built-in space: path:<n>, cycle:<n>, triangle, hypercube:<n>:<p>"}};

const std::vector<Option> kFamilyOptions{
    {"base", "linear", "base map: linear, identity or koch"},
    {"p", "2", "source exponent p"},
    {"q", "2", "target exponent q"},
    {"c", "1", "threshold c of the base map"},
    {"d", "", "threshold d of the base map (default A c^(p/q))"},
    {"seed", "0", "seed (koch base: constant estimation)"}};

std::vector<Option> concat(std::vector<Option> a, const std::vector<Option>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const std::vector<Command>& commands() {
  static const std::vector<Command> table = {
      {"curve", "Sample the Koch-type curve K_r on [0,1] as t,x,y CSV. Anchor: Lemma 6.2.",
       {{"r", "0.3", "contraction ratio r in (1/4, 1/2)"},
        {"alpha", "", "Hölder exponent in (1/2, 1); overrides r"},
        {"samples", "1000", "number of grid points (>= 5)"},
        {"depth", "64", "base-4 digits evaluated"}},
       cmd_curve},
      {"extend", "Evaluate the whole-line extension K_r^infinity. Anchor: Lemma 6.2.",
       {{"r", "0.3", "contraction ratio"},
        {"alpha", "", "Hölder exponent; overrides r"},
        {"t-min", "-16", "left end"},
        {"t-max", "16", "right end"},
        {"samples", "1001", "number of points"},
        {"max-steps", "64", "extension steps allowed"}},
       cmd_extend},
      {"line-map", "Evaluate the Hölder(alpha) map R -> R^(2^k). Anchor: Lemma 6.2.",
       {{"alpha", "0.75", "Hölder exponent in (0, 1]"},
        {"t-min", "0", "left end"},
        {"t-max", "1", "right end"},
        {"samples", "101", "number of points"},
        {"max-steps", "64", "extension steps allowed per stage"}},
       cmd_line_map},
      {"lift-lr", "Lift a map R -> R^n to step functions, L_r -> L_s. Anchor: Theorem 6.3.",
       {{"map", "", "tabulated map JSON; default: the Hölder line map"},
        {"line-map-alpha", "0.75", "exponent of the default line map"},
        {"f", "", "step function JSON"},
        {"g", "", "second step function JSON; adds both sides of the norm identity"},
        {"r", "1", "source exponent r"},
        {"s", "2", "target exponent s"}},
       cmd_lift_lr},
      {"lift-c0", "Lift a map R -> R^n to finite c_0 sequences. Anchor: Theorem 6.4.",
       {{"map", "", "tabulated map JSON; default: the Hölder line map"},
        {"line-map-alpha", "0.75", "exponent of the default line map"},
        {"x", "", "sequence JSON (array or {\"values\"})"}},
       cmd_lift_c0},
      {"discretize", "Sample step functions into l_r^m and compare distances. Anchor: Lemma 7.1.",
       {{"family", "", "JSON array of step functions"},
        {"r", "1", "exponent r"},
        {"m", "0", "sample count; 0 uses the computed threshold"}},
       cmd_discretize},
      {"kuratowski", "Isometric embedding of a finite metric space into l_inf. Anchor: Theorem 3.3.",
       concat(kSpaceInput, {{"recenter", "none", "none, shift or unit"}}),
       cmd_kuratowski},
      {"round", "Dyadic rounding x(n) -> floor(x(n) 2^n) / 2^n. Anchor: Theorem 3.4.",
       {{"in", "", "JSON array, or {\"first_index\", \"values\"}"},
        {"first-index", "0", "index of the first entry for plain arrays"}},
       cmd_round},
      {"type", "Rademacher type ratio of a vector family. Anchor: Rademacher type definition; Theorem 6.5.",
       {{"vectors", "", "JSON array of vectors ({\"p\",\"coords\"} or plain arrays)"},
        {"norm-p", "2", "norm exponent for plain-array vectors"},
        {"p", "2", "type exponent"},
        {"mode", "exact", "exact or sampled"},
        {"samples", "10000", "sampled mode: number of sign patterns"},
        {"seed", "0", "sampled mode: seed"}},
       cmd_type},
      {"cotype", "Rademacher cotype ratio of a vector family. Anchor: Rademacher cotype definition; Theorem 6.5.",
       {{"vectors", "", "JSON array of vectors"},
        {"norm-p", "2", "norm exponent for plain-array vectors"},
        {"q", "2", "cotype exponent (>= 2)"},
        {"mode", "exact", "exact or sampled"},
        {"samples", "10000", "sampled mode: number of sign patterns"},
        {"seed", "0", "sampled mode: seed"}},
       cmd_cotype},
      {"metric-type", "Metric type ratio of hypercube maps, one CSV row per n. Anchor: Definition 5.2; Theorem 5.4.",
       {{"map", "", "hypercube map JSON {\"n\", \"images\"}"},
        {"generator", "identity-lp", "identity-lp, sigma or koch-composite"},
        {"n-values", "1,2,3,4,5,6,7,8,9,10", "dimensions to sweep"},
        {"norm-p", "2", "exponent of the target norm"},
        {"p", "2", "metric type exponent"},
        {"r", "0.3", "koch-composite: contraction ratio"}},
       cmd_metric_type},
      {"metric-cotype", "Metric cotype ratio over Z_m^n, one CSV row per m. Anchor: Definition 5.5; Lemma 5.6.",
       {{"map", "", "grid map JSON {\"n\", \"m\", \"images\"}"},
        {"generator", "sigma", "identity-lp, sigma or koch-composite"},
        {"n", "2", "grid dimension"},
        {"m-values", "2,4,8", "even moduli to sweep"},
        {"sweep-c", "", "if set, sweep m from C n^(1/q) upward instead of m-values"},
        {"m-count", "4", "number of moduli in the C sweep"},
        {"norm-p", "2", "exponent of the target norm"},
        {"q", "2", "metric cotype exponent"},
        {"r", "0.3", "koch-composite: contraction ratio"},
        {"mode", "exact", "exact or sampled"},
        {"samples", "10000", "sampled mode: number of draws"},
        {"seed", "0", "sampled mode: seed"}},
       cmd_metric_cotype},
      {"sigma", "Torus map sigma_n with per-coordinate shift distances. Anchor: Theorem 5.7.",
       {{"s", "0,0", "grid point, comma separated"},
        {"m", "4", "modulus (>= 2)"},
        {"q", "2", "exponent combining the coordinate moduli"}},
       cmd_sigma},
      {"profile", "Type supremum and cotype infimum of a classical space. Anchor: Theorem 6.5.",
       {{"space", "l2", "descriptor: l<r>, L<r>, c0, l<q>(<inner>)"}},
       cmd_profile},
      {"conditions", "The three necessary conditions for E(l_r,p) <= E(l_s,q). Anchor: Theorem 6.5.",
       {{"r", "1", "r >= 1"}, {"s", "1", "s >= 1"}, {"p", "1", "p >= 1"}, {"q", "2", "q >= 1"}},
       cmd_conditions},
      {"verdict", "Reducibility of E(L_r,p) to E(L_s,q) for r, s in [1,2], s <= q. Anchor: Corollary 6.7.",
       {{"r", "1", "r in [1,2]"}, {"p", "1", "p >= 1"}, {"s", "1", "s in [1,2]"}, {"q", "2", "q >= s"}},
       cmd_verdict},
      {"theta", "Pairing map theta(x)(<n,m>) = T_n(x(n))(m) as flat CSV. Anchor: Theorem 4.2; Theorem 3.4.",
       concat(kFamilyOptions, {{"pair", "", "sequence pair JSON {\"x\", \"y\"}"},
                               {"plant", "power:1", "planted distances: geometric:<ratio> or power:<exponent>"},
                               {"horizon", "100", "planted horizon"}}),
       cmd_theta},
      {"scale-family", "Rescaled family T_n(u) = 2^(-np/q) T(2^n u) with thresholds. Anchor: Corollary 4.4.",
       concat(kFamilyOptions, {{"indices", "10", "number of indices n"}, {"probe", "1", "input u evaluated"}}),
       cmd_scale_family},
      {"verify-family", "Check the three regime conditions on sampled pairs. Anchor: Theorem 4.2.",
       concat(kFamilyOptions, {{"indices", "20", "number of indices n"},
                               {"samples", "1000", "pairs per index"},
                               {"cauchy-horizon", "10000", "horizon of the threshold-sum diagnostic"}}),
       cmd_verify_family},
      {"partial-sums", "Partial sums of d_n^p (p >= 1) or tail suprema (p = 0). Anchor: Definition 4.1.",
       {{"pair", "", "sequence pair JSON {\"x\", \"y\"}"},
        {"plant", "power:1", "planted distances: geometric:<ratio> or power:<exponent>"},
        {"horizon", "10000", "planted horizon"},
        {"p", "2", "exponent, or 0 for tail suprema"},
        {"seed", "0", "planting seed"}},
       cmd_partial_sums},
      {"window", "Unit windows f(. + n + 1) on [0,1] and their sup distances. Anchor: windowing map of E_K.",
       {{"samples", "", "JSON array of f(1 + k step)"},
        {"function", "reciprocal", "built-in f: reciprocal, zero or identity"},
        {"windows", "5", "built-in f: number of windows"},
        {"step", "0.01", "grid step; 1/step must be an integer"},
        {"shift", "0.5", "constant added to form the comparison input"}},
       cmd_window},
      {"brute", "Exhaustive grid search for the least Hölder constant (|M| <= 5). Anchor: Lemma 5.1 oracle.",
       concat(kSpaceInput, {{"dim", "2", "target dimension (1 or 2)"},
                            {"target-p", "2", "target norm exponent"},
                            {"alpha", "1", "Hölder exponent"},
                            {"resolution", "0.05", "grid spacing"},
                            {"radius", "0", "box half-width; 0 means 1.5 diam^alpha"},
                            {"budget", "1e10", "maximum gauge-fixed placements"}}),
       cmd_brute},
      {"search", "Multi-start local search for a low Hölder constant. Anchor: Lemma 5.1.",
       concat(kSpaceInput, {{"dim", "2", "target dimension"},
                            {"target-p", "2", "target norm exponent"},
                            {"alpha", "1", "Hölder exponent"},
                            {"restarts", "8", "independent restarts"},
                            {"iterations", "10000", "iterations per restart"},
                            {"initial-step", "0", "initial step; 0 means diam^alpha / 4"},
                            {"decay", "0.95", "step decay factor"},
                            {"patience", "100", "non-improving iterations per decay"},
                            {"seed", "0", "seed"}}),
       cmd_search},
      {"obstruction", "Hypercube experiment: measured A and metric type ratios per n. Anchor: Theorem 5.4.",
       {{"n-values", "1,2,3,4", "hypercube dimensions"},
        {"p-src", "2", "source exponent"},
        {"p-tgt", "2", "target exponent"},
        {"alpha", "1", "Hölder exponent in (0, 1]"},
        {"type-p", "0", "metric type exponent; 0 means min(p-tgt, 2)"},
        {"restarts", "1", "search restarts"},
        {"iterations", "1", "search iterations; 1 keeps the identity candidate"},
        {"seed", "0", "seed"}},
       cmd_obstruction},
  };
  return table;
}

KeyValues defaults_of(const Command& c) {
  KeyValues d{{"out", ""}, {"manifest", ""}};
  for (const auto& o : c.options) d[o.key] = o.default_value;
  return d;
}

}  // namespace

std::vector<std::string> subcommand_names() {
  std::vector<std::string> names;
  for (const auto& c : commands()) names.push_back(c.name);
  return names;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hölder embeddings, type/cotype ratios and sequence-space reductions", "snowflake"};
  app.require_subcommand(1);
  app.fallthrough(false);

  const auto& table = commands();
  std::vector<CLI::App*> subs;
  std::vector<KeyValues> flag_storage(table.size());
  std::vector<std::vector<std::pair<std::string, CLI::Option*>>> flag_options(table.size());
  std::vector<std::string> config_paths(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const Command& c = table[i];
    CLI::App* sub = app.add_subcommand(c.name, c.summary);
    sub->add_option("--config", config_paths[i], "key = value file; flags override its values");
    std::vector<Option> all = c.options;
    all.push_back({"out", "", "output file (default: stdout)"});
    all.push_back({"manifest", "", "manifest path (default: <out>.manifest.json)"});
    for (const auto& o : all) {
      std::string help = o.help;
      if (!o.default_value.empty()) help += " [default: " + o.default_value + "]";
      CLI::Option* opt = sub->add_option("--" + o.key, flag_storage[i][o.key], help);
      flag_options[i].emplace_back(o.key, opt);
    }
    subs.push_back(sub);
  }

  if (argc >= 2 && argv[1][0] != '-') {
    const auto names = subcommand_names();
    if (std::find(names.begin(), names.end(), std::string(argv[1])) == names.end()) {
      err << "error: unknown subcommand '" << argv[1] << "'\n" << app.help();
      return 2;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return 2;
  }

  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    const Command& c = table[i];
    const auto started = std::chrono::steady_clock::now();
    try {
      KeyValues flags;
      for (const auto& [key, opt] : flag_options[i])
        if (opt->count() > 0) flags[key] = flag_storage[i][key];
      const KeyValues file = config_paths[i].empty() ? KeyValues{} : load_config_file(config_paths[i]);
      const Config cfg = Config::resolve(defaults_of(c), file, flags);
      Context ctx(c.name, cfg, out);
      c.handler(ctx);
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      ctx.write_manifest(seconds);
      return 0;
    } catch (const ValidationError& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    } catch (const nlohmann::json::exception& e) {
      err << "error: malformed JSON input: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      err << "internal error: " << e.what() << "\n";
      return 1;
    }
  }
  err << app.help();
  return 2;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("snowflake");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace snowflake::cli
