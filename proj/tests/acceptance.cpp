// Acceptance run: one PASS/FAIL line per criterion, exit status = number of FAILs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "snowflake/embeddings.hpp"
#include "snowflake/io.hpp"
#include "snowflake/parallel.hpp"
#include "snowflake/reductions.hpp"
#include "snowflake/search.hpp"
#include "snowflake/typecotype.hpp"

using namespace snowflake;

namespace {

// Pinned tolerances and limits.
constexpr double kAnchorTol = 1e-12;
constexpr double kSelfSimilarTol = 1e-10;
constexpr double kSlopeTol = 0.02;
constexpr double kMetricTypeTol = 1e-9;
constexpr double kOrthonormalTol = 1e-12;
constexpr double kCotypeTol = 1e-12;
constexpr double kLiftRelTol = 1e-12;
// Common-grid sampled distances are the step integrals; the m^(-1/r)
// weights round, so "exactly" is pinned at a few ulps.
constexpr double kCommonGridRelTol = 1e-15;
// Rounding allowance at the sandwich boundary (the linear base map attains it).
constexpr double kSandwichRelTol = 1e-12;
constexpr double kBaselTol = 1e-3;
constexpr double kGeometricTol = 1e-12;
constexpr double kSearchRelGap = 0.02;
constexpr double kTriangleBound = 1.001;
constexpr double kCriterion1Seconds = 1.0;
constexpr double kCriterion3Seconds = 30.0;
constexpr double kCriterion4Seconds = 5.0;
constexpr double kCriterion9Seconds = 60.0;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double dist(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// ---------------------------------------------------------------- 1

Verdict criterion1() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double r : {0.30, 0.35, 0.45}) {
    const KochParams p = KochParams::from_ratio(r);
    const Point2 expected[] = {{0, 0}, {r, 0}, {0.5, p.h()}, {1 - r, 0}, {1, 0}};
    for (int i = 0; i <= 4; ++i) {
      const Point2 z = koch_eval(p, i / 4.0, 64);
      worst = std::max({worst, std::abs(z.x - expected[i].x), std::abs(z.y - expected[i].y)});
    }
  }
  const double secs = seconds_since(t0);
  v.require(worst <= kAnchorTol, fmt("max anchor error %.3g", worst));
  v.require(secs < kCriterion1Seconds, fmt("runtime %.3g s", secs));
  if (v.pass) v.detail = fmt("max anchor error %.3g, %.3g s", worst, secs);
  return v;
}

// ---------------------------------------------------------------- 2

Verdict criterion2() {
  Verdict v;
  double self_err = 0.0, k1_err = 0.0, k2_err = 0.0;
  for (double r : {0.30, 0.35, 0.45}) {
    const KochParams p = KochParams::from_ratio(r);
    const CounterRng rng(2, 0);
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const double t = rng.uniform(i);
      const Point2 a = koch_eval(p, t / 4.0), b = koch_eval(p, t);
      self_err = std::max(self_err, dist(a, {r * b.x, r * b.y}));
      // K^1(t) = r^-1 K(t/4) on [0,4].
      const double s1 = 4.0 * t;
      const Point2 q1 = koch_eval(p, s1 / 4.0);
      k1_err = std::max(k1_err, dist(koch_extend(p, s1), {q1.x / r, q1.y / r}));
      // K^2(t) = r^-1 K^1((t+12)/4) - (r^-2 - r^-1, 0) on [-12,4].
      const double s2 = -12.0 + 16.0 * t;
      const Point2 q2 = koch_eval(p, (s2 + 12.0) / 16.0);
      const Point2 k2{q2.x / (r * r) - (1.0 / (r * r) - 1.0 / r), q2.y / (r * r)};
      k2_err = std::max(k2_err, dist(koch_extend(p, s2), k2));
    }
  }
  v.require(self_err <= kSelfSimilarTol, fmt("self-similarity error %.3g", self_err));
  v.require(k1_err <= kSelfSimilarTol, fmt("K^1 error %.3g", k1_err));
  v.require(k2_err <= kSelfSimilarTol, fmt("K^2 error %.3g", k2_err));
  if (v.pass) v.detail = fmt("max errors: self-similarity %.3g, K^1 %.3g, K^2 %.3g", self_err, k1_err, k2_err);
  return v;
}

// ---------------------------------------------------------------- 3

double slope_on_uniform_pairs(const std::function<std::vector<double>(double)>& f, std::uint64_t seed) {
  const CounterRng rng(seed, 3);
  std::vector<double> din, dout;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const double a = rng.uniform(2 * i), b = rng.uniform(2 * i + 1);
    if (a == b) continue;
    const auto fa = f(a), fb = f(b);
    double s = 0.0;
    for (std::size_t k = 0; k < fa.size(); ++k) s += (fa[k] - fb[k]) * (fa[k] - fb[k]);
    din.push_back(std::abs(a - b));
    dout.push_back(std::sqrt(s));
  }
  return fit_log_slope(din, dout);
}

Verdict criterion3() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  std::string summary;
  for (double r : {0.30, 0.35, 0.45}) {
    const KochParams p = KochParams::from_ratio(r);
    const double target = std::log(1.0 / r) / std::log(4.0);
    const double slope = slope_on_uniform_pairs(
        [&](double t) {
          const Point2 z = koch_eval(p, t);
          return std::vector<double>{z.x, z.y};
        },
        1);
    v.require(std::abs(slope - target) <= kSlopeTol, fmt("K_r r=%.2f slope %.4f vs %.4f", r, slope, target));
    summary += fmt("K_%.2f %.4f/%.4f; ", r, slope, target);
  }
  for (double alpha : {0.75, 0.3}) {
    const HolderLineMap map(alpha);
    const double slope = slope_on_uniform_pairs([&](double t) { return map(t); }, 2);
    v.require(std::abs(slope - alpha) <= kSlopeTol, fmt("line map alpha=%.2f slope %.4f", alpha, slope));
    summary += fmt("line %.2f %.4f; ", alpha, slope);
  }
  const double secs = seconds_since(t0);
  v.require(secs < kCriterion3Seconds, fmt("runtime %.3g s", secs));
  if (v.pass) v.detail = summary + fmt("%.3g s", secs);
  return v;
}

// ---------------------------------------------------------------- 4

Verdict criterion4() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (unsigned n = 1; n <= 10; ++n) {
    worst = std::max(worst, std::abs(metric_type_ratio(HypercubeMap::identity(n, 2), 2) - 1.0));
    worst = std::max(worst, std::abs(metric_type_ratio(HypercubeMap::identity(n, 1), 1) - 1.0));
  }
  const double secs = seconds_since(t0);
  v.require(worst <= kMetricTypeTol, fmt("max |ratio - 1| %.3g", worst));
  v.require(secs < kCriterion4Seconds, fmt("runtime %.3g s", secs));
  if (v.pass) v.detail = fmt("max |ratio - 1| %.3g, %.3g s", worst, secs);
  return v;
}

// ---------------------------------------------------------------- 5

Verdict criterion5() {
  Verdict v;
  const std::vector<PNormVector> copies(4, PNormVector({1.0}, 1));
  const double a = rademacher_type_ratio(copies, 1).value;
  std::vector<PNormVector> ortho;
  for (int i = 0; i < 4; ++i) {
    std::vector<double> e(4, 0.0);
    e[i] = 1.0;
    ortho.emplace_back(e, 2);
  }
  const double b = rademacher_type_ratio(ortho, 2).value;
  v.require(a == 0.375, fmt("repeated unit vectors give %.17g", a));
  v.require(std::abs(b - 1.0) <= kOrthonormalTol, fmt("orthonormal family gives %.17g", b));
  if (v.pass) v.detail = fmt("ratios %.17g and %.17g", a, b);
  return v;
}

// ---------------------------------------------------------------- 6

Verdict criterion6() {
  Verdict v;
  const GridMap two = GridMap::from_table(1, 2, {PNormVector({0.0}, 2), PNormVector({1.0}, 2)});
  const double gamma = metric_cotype_ratio(two, 2).value;
  const double expected = std::sqrt(1.5) / 2.0;
  v.require(std::abs(gamma - expected) <= kCotypeTol, fmt("Gamma %.17g vs %.17g", gamma, expected));
  double worst = 0.0;
  for (unsigned m : {2U, 4U, 8U, 16U}) {
    for (unsigned n = 1; n <= 4; ++n) {
      std::size_t total = 1;
      for (unsigned j = 0; j < n; ++j) total *= m;
      for (std::size_t idx = 0; idx < total; ++idx) {
        std::vector<unsigned> s(n);
        for (unsigned j = 0, rest = static_cast<unsigned>(idx); j < n; ++j, rest /= m) s[j] = rest % m;
        const PNormVector base = sigma_embed(s, m, 2);
        for (unsigned j = 0; j < n; ++j) {
          auto t = s;
          t[j] = (t[j] + m / 2) % m;
          worst = std::max(worst, std::abs(p_distance(sigma_embed(t, m, 2), base) - 2.0));
        }
      }
    }
  }
  v.require(worst <= kCotypeTol, fmt("half-shift error %.3g", worst));
  if (v.pass) v.detail = fmt("Gamma error %.3g, half-shift error %.3g", std::abs(gamma - expected), worst);
  return v;
}

// ---------------------------------------------------------------- 7

StepFunction random_step(std::mt19937_64& gen, std::size_t pieces) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> values(pieces);
  for (double& x : values) x = u(gen);
  return StepFunction(std::move(values));
}

Verdict criterion7() {
  Verdict v;
  std::mt19937_64 gen(7);
  const HolderLineMap line(0.75);
  double lift_worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const StepFunction f = random_step(gen, 1 + trial % 6), g = random_step(gen, 1 + trial % 4);
    std::vector<double> inputs = f.values();
    inputs.insert(inputs.end(), g.values().begin(), g.values().end());
    const TabulatedMap map = TabulatedMap::at_points(inputs, [&](double t) { return line(t); });
    const double s = 1.0 + trial % 3;
    const double lhs = std::pow(lr_distance(lift_lr(map, f, 1.0, s), lift_lr(map, g, 1.0, s), s), s);
    const double rhs = lift_lr_integrand(map, f, g, s);
    lift_worst = std::max(lift_worst, std::abs(lhs - rhs) / std::max(rhs, 1e-300));
  }
  v.require(lift_worst <= kLiftRelTol, fmt("lift identity relative error %.3g", lift_worst));

  double common_worst = 0.0, coarse_lo = kInfinity, coarse_hi = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double r = trial % 2 == 0 ? 1.0 : 2.0;
    std::vector<StepFunction> grid_family;
    for (std::size_t pieces : {1, 2, 4, 8}) grid_family.push_back(random_step(gen, pieces));
    const auto sampled = discretize_lr(grid_family, r, 8);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j)
        common_worst = std::max(common_worst,
                                std::abs(p_distance(sampled[i], sampled[j]) / lr_distance(grid_family[i], grid_family[j], r) - 1.0));

    const std::vector<StepFunction> family{random_step(gen, 3), random_step(gen, 5), random_step(gen, 7)};
    const std::size_t m = discretization_threshold(family, r);
    const auto coarse = discretize_lr(family, r, m);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j) {
        const double ratio = p_distance(coarse[i], coarse[j]) / lr_distance(family[i], family[j], r);
        coarse_lo = std::min(coarse_lo, ratio);
        coarse_hi = std::max(coarse_hi, ratio);
      }
  }
  v.require(common_worst <= kCommonGridRelTol, fmt("common-grid ratio error %.3g", common_worst));
  v.require(coarse_lo >= 0.5 && coarse_hi <= 2.0, fmt("coarse ratios in [%.4f, %.4f]", coarse_lo, coarse_hi));
  if (v.pass)
    v.detail = fmt("lift error %.3g, common-grid error %.3g", lift_worst, common_worst) +
               fmt(", coarse ratios in [%.4f, %.4f]", coarse_lo, coarse_hi);
  return v;
}

// ---------------------------------------------------------------- 8

Verdict criterion8() {
  Verdict v;
  const std::size_t horizon = 10000;
  const ReductionFamily fam = scaled_family(linear_base_map(2.0), 2.0, 2.0, 1.0, std::sqrt(5.0));
  const ReductionReport check = verify_reduction_conditions(fam, sample_regime_pairs(fam, 20, 1000, 0));
  v.require(check.violations.empty(), "family fails its sampled regime conditions");

  const auto d = planted_distances("power:1", horizon);
  bool middle = true;
  for (std::size_t n = 0; n < horizon; ++n) middle = middle && d[n] >= fam.eps(n) && d[n] <= fam.C;
  v.require(middle, "planted distances leave the middle regime");

  const SequencePair pair = plant_pair(d, 0);
  const auto tx = theta(fam, pair.x()), ty = theta(fam, pair.y());
  const auto source = ep_partial_sums(pair, fam.p);
  const double a_q = std::pow(fam.A, fam.q);
  std::size_t recorded = 0;
  for (std::size_t h : {1, 10, 100, 1000, 10000}) {
    const ThetaSums sums = theta_partial_sums(tx, ty, fam.q, h);
    const double s = source[h - 1];
    v.require(sums.flat >= s / a_q * (1 - kSandwichRelTol) && sums.flat <= s * a_q * (1 + kSandwichRelTol),
              fmt("sandwich fails at horizon %.0f", static_cast<double>(h)));
    ++recorded;
  }

  const double geometric = ep_partial_sums(planted_distances("geometric:0.5", 200), 1.0).back();
  const double basel = ep_partial_sums(planted_distances("power:1", horizon), 2.0).back();
  const double harmonic = ep_partial_sums(planted_distances("power:0.5", horizon), 2.0).back();
  v.require(std::abs(geometric - 2.0) <= kGeometricTol, fmt("geometric sum %.17g", geometric));
  v.require(std::abs(basel - std::numbers::pi * std::numbers::pi / 6.0) <= kBaselTol, fmt("1/n^2 sum %.17g", basel));
  v.require(harmonic > 9.0, fmt("1/n sum %.17g", harmonic));
  if (v.pass)
    v.detail = fmt("sandwich at %.0f horizons; geometric %.15g, basel gap %.3g", static_cast<double>(recorded), geometric,
                   std::numbers::pi * std::numbers::pi / 6.0 - basel) +
               fmt(", harmonic %.6g", harmonic);
  return v;
}

// ---------------------------------------------------------------- 9

Verdict criterion9() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  SearchConfig cfg;
  const SearchResult brute = brute_min_distortion(cycle_space(4), cfg);
  cfg.restarts = 32;
  cfg.iterations = 10000;
  const SearchResult local = local_min_distortion(cycle_space(4), cfg);
  const double gap = local.constantA / brute.constantA - 1.0;
  const double classical = holder_distortion(brute.table).distortion();
  v.require(std::abs(gap) <= kSearchRelGap, fmt("local %.6f vs brute %.6f", local.constantA, brute.constantA));
  SearchConfig tri;
  tri.restarts = 8;
  tri.iterations = 10000;
  const double triangle = local_min_distortion(triangle_space(), tri).constantA;
  v.require(triangle <= kTriangleBound, fmt("triangle A %.6f", triangle));
  const double secs = seconds_since(t0);
  v.require(secs < kCriterion9Seconds, fmt("runtime %.3g s", secs));
  if (v.pass)
    v.detail = fmt("4-cycle A: brute %.6f, local %.6f", brute.constantA, local.constantA) +
               fmt(" (max/min ratio %.6f); triangle A %.6f", classical, triangle) + fmt(", %.3g s", secs);
  return v;
}

// ---------------------------------------------------------------- 10

Verdict criterion10() {
  Verdict v;
  std::size_t checked = 0;
  double min_margin = kInfinity;
  for (std::size_t n : {4, 16, 64}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      SearchConfig cfg;
      cfg.alpha = 1.5;
      cfg.target_dim = 2;
      cfg.restarts = 2;
      cfg.iterations = n == 64 ? 2000 : 5000;
      cfg.seed = seed;
      const SearchResult r = local_min_distortion(path_space(n), cfg);
      const DistortionReport report = holder_distortion(r.table);
      const bool ok = path_alpha_bound_check(n, 1.5, report);
      v.require(ok, fmt("n = %.0f seed %.0f: A^2 = %.6f", static_cast<double>(n), static_cast<double>(seed),
                        report.constantA * report.constantA));
      min_margin = std::min(min_margin, report.constantA * report.constantA / std::sqrt(static_cast<double>(n)));
      ++checked;
    }
  }
  if (v.pass) v.detail = fmt("%.0f embeddings, min A^2 / n^0.5 = %.4f", static_cast<double>(checked), min_margin);
  return v;
}

// ---------------------------------------------------------------- 11

std::string triple(const NecessaryConditions& c) {
  const auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  return "(" + b(c.exponent_order) + "," + b(c.type_clause) + "," + b(c.cotype_clause) + ")";
}

Verdict criterion11() {
  Verdict v;
  std::vector<std::string> mismatches;
  struct NcRow {
    double r, s, p, q;
    NecessaryConditions listed;
  };
  const NcRow nc_rows[] = {{1, 1, 1, 2, {true, true, true}}, {1, 2, 2, 2, {true, false, true}}, {3, 1, 1, 1, {true, false, false}}};
  for (const auto& row : nc_rows) {
    const NecessaryConditions got = necessary_conditions(row.r, row.s, row.p, row.q);
    if (!(got == row.listed))
      mismatches.push_back(fmt("necessary_conditions(%g,%g,%g,", row.r, row.s, row.p) + fmt("%g) = ", row.q) +
                           triple(got) + " vs listed " + triple(row.listed));
  }
  struct IffRow {
    double r, p, s, q;
    bool listed;
  };
  const IffRow iff_rows[] = {{1, 1, 1, 2, true}, {1, 2, 2, 2, false}, {2, 1, 2, 1, true}};
  for (const auto& row : iff_rows) {
    try {
      if (iff_verdict(row.r, row.p, row.s, row.q) != row.listed)
        mismatches.push_back(fmt("iff_verdict(%g,%g,%g,", row.r, row.p, row.s) + fmt("%g) differs", row.q));
    } catch (const ValidationError& e) {
      mismatches.push_back(fmt("iff_verdict(%g,%g,%g,", row.r, row.p, row.s) + fmt("%g) rejected: ", row.q) + e.what());
    }
  }
  for (const auto& m : mismatches) v.require(false, m);

  std::size_t grid_bad = 0;
  for (int i = 0; i < 20; ++i)
    for (int k = 0; k < 20; ++k) {
      const double r = 1.0 + 0.25 * i, q = 1.0 + 0.25 * k;
      const TypeCotypeProfile flat{std::min(r, 2.0), std::max(r, 2.0)};
      const TypeCotypeProfile nested{std::min({r, q, 2.0}), std::max({r, q, 2.0})};
      if (!(space_profile(SpaceDescriptor::ell(r)) == flat)) ++grid_bad;
      if (!(space_profile(SpaceDescriptor::lebesgue(r)) == flat)) ++grid_bad;
      if (!(space_profile(SpaceDescriptor::ell_of(q, SpaceDescriptor::ell(r))) == nested)) ++grid_bad;
      if (!(space_profile(SpaceDescriptor::ell_of(q, SpaceDescriptor::lebesgue(r))) == nested)) ++grid_bad;
    }
  v.require(grid_bad == 0, fmt("%.0f profile grid mismatches", static_cast<double>(grid_bad)));
  if (v.pass) {
    v.detail = "all example rows and the 20x20 profile grid match";
  } else {
    std::string all;
    for (const auto& m : mismatches) all += m + "; ";
    v.detail = fmt("%.0f of 6 example rows unattainable as listed: ", static_cast<double>(mismatches.size())) + all +
               fmt("profile grid mismatches: %.0f", static_cast<double>(grid_bad));
  }
  return v;
}

// ---------------------------------------------------------------- 12

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct CliRun {
  int code = -1;
  std::string stdout_text;
  std::string output;
  std::string manifest;  // without the wall-clock field
};

CliRun run_cli(const std::filesystem::path& dir, const std::string& args, int threads, const std::string& tag) {
  // Each run gets its own directory with the same file names, so manifests
  // that record paths are comparable.
  const std::filesystem::path run_dir = dir / tag;
  std::filesystem::create_directories(run_dir);
  const std::string cmd = "cd '" + run_dir.string() + "' && SNOWFLAKE_THREADS=" + std::to_string(threads) + " '" +
                          SNOWFLAKE_CLI_PATH + "' " + args + " --out result.out --manifest manifest.json > stdout.txt 2>&1";
  CliRun r;
  const int status = std::system(cmd.c_str());
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.stdout_text = slurp(run_dir / "stdout.txt");
  r.output = slurp(run_dir / "result.out");
  if (std::filesystem::exists(run_dir / "manifest.json")) {
    io::Json m = io::read_json_file((run_dir / "manifest.json").string());
    m.erase("wall_clock_seconds");
    r.manifest = m.dump();
  }
  return r;
}

Verdict criterion12() {
  Verdict v;
  const std::filesystem::path dir = std::filesystem::current_path() / "acceptance_cli";
  std::filesystem::create_directories(dir);
  write_text(dir / "f.json", R"({"values": [0, 0.5, 1, 0.25]})");
  write_text(dir / "g.json", "[1, 0, 0.5, 0.5]");
  write_text(dir / "x.json", "[1, 0, 2, 0.5]");
  write_text(dir / "family.json", "[[0, 1], [1, 0.5, 0.25], [2], [0.1, 0.2, 0.3, 0.4, 0.5]]");
  write_text(dir / "round.json", R"({"first_index": 2, "values": [0.7, 0.2, 0.9]})");
  write_text(dir / "vectors.json", "[[1, 0, 2], [0, 1, -1], [1, 1, 1], [0.5, -2, 0], [3, 0, 0], [1, 2, 3]]");

  const std::vector<std::string> runs = {
      "curve --r 0.3 --samples 1000",
      "extend --r 0.35 --samples 257",
      "line-map --alpha 0.3 --samples 101",
      "lift-lr --f ../f.json --g ../g.json --s 2",
      "lift-c0 --x ../x.json",
      "discretize --family ../family.json --r 2",
      "kuratowski --builtin cycle:5 --recenter shift",
      "round --in ../round.json",
      "type --vectors ../vectors.json --p 1.5 --mode sampled --samples 20000 --seed 4",
      "cotype --vectors ../vectors.json --q 3",
      "metric-type --n-values 1,2,3,4,5,6,7,8,9,10 --generator identity-lp --norm-p 1 --p 2",
      "metric-cotype --n 3 --m-values 2,4,6 --mode sampled --samples 20000 --seed 5",
      "sigma --s 1,3,5 --m 8",
      "profile --space 'l3(L1.5)'",
      "conditions --r 3 --s 1 --p 1 --q 1",
      "verdict --r 1 --p 1 --s 1 --q 2",
      "theta --horizon 200 --plant power:1 --seed 6",
      "scale-family --indices 30 --probe 0.7",
      "verify-family --indices 20 --samples 500 --seed 7",
      "partial-sums --plant power:0.5 --horizon 10000 --seed 8",
      "window --function reciprocal --windows 5 --step 0.01",
      "brute --builtin cycle:4",
      "search --builtin cycle:5 --restarts 8 --iterations 3000 --seed 9",
      "obstruction --n-values 1,2,3,4,5 --p-src 1 --restarts 4 --iterations 500 --seed 10",
  };
  std::size_t identical = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string tag = "run" + std::to_string(i);
    const CliRun a = run_cli(dir, runs[i], 1, tag + "_threads1_a");
    const CliRun b = run_cli(dir, runs[i], 1, tag + "_threads1_b");
    const CliRun c = run_cli(dir, runs[i], 8, tag + "_threads8");
    const std::string name = runs[i].substr(0, runs[i].find(' '));
    v.require(a.code == 0, name + " exited with " + std::to_string(a.code) + ": " + a.stdout_text.substr(0, 200));
    v.require(!a.output.empty(), name + " wrote no output");
    const bool same = a.code == b.code && a.code == c.code && a.output == b.output && a.output == c.output &&
                      a.stdout_text == b.stdout_text && a.stdout_text == c.stdout_text && a.manifest == b.manifest &&
                      a.manifest == c.manifest;
    v.require(same, name + " differs between runs or thread counts");
    if (same) ++identical;
  }
  if (v.pass) v.detail = fmt("%.0f of %.0f subcommands byte-identical (threads 1, 1, 8)", static_cast<double>(identical),
                             static_cast<double>(runs.size()));
  return v;
}

}  // namespace

int main() {
  configure_threads_from_env();
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"Koch anchors", criterion1},
      {"self-similarity and extension agreement", criterion2},
      {"Hölder exponent recovery", criterion3},
      {"hypercube metric type", criterion4},
      {"Rademacher exact values", criterion5},
      {"metric cotype exact value", criterion6},
      {"lift identities", criterion7},
      {"reduction sandwich", criterion8},
      {"search oracle", criterion9},
      {"path chain bound", criterion10},
      {"verdict tables", criterion11},
      {"determinism", criterion12},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failures;
    std::printf("%-4s criterion %2zu (%s): %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
