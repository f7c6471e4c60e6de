#include "snowflake/typecotype.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "snowflake/search.hpp"

namespace snowflake {

namespace {

PointSet flatten(const std::vector<PNormVector>& vectors) {
  PointSet set;
  set.dim = vectors.front().size();
  set.p = vectors.front().p();
  set.block = vectors.front().block();
  set.coords.reserve(set.dim * vectors.size());
  for (const auto& v : vectors) set.coords.insert(set.coords.end(), v.coords().begin(), v.coords().end());
  return set;
}

RatioEstimate rademacher_ratio(const std::vector<PNormVector>& vectors, double exponent, const Mode& mode,
                               const EnumerationLimits& limits, const char* what) {
  require(!vectors.empty(), std::string(what) + ": empty family");
  for (const auto& v : vectors)
    require(v.same_space(vectors.front()), std::string(what) + ": vectors must share exponent and dimension");
  double denominator = 0.0;
  for (const auto& v : vectors) denominator += std::pow(p_norm(v), exponent);
  require(denominator > 0.0, std::string(what) + ": degenerate denominator (all vectors are zero)");
  denominator = std::pow(denominator, 1.0 / exponent);

  const PointSet set = flatten(vectors);
  RatioEstimate out;
  if (std::holds_alternative<ExactMode>(mode)) {
    require(vectors.size() <= limits.max_rademacher_terms,
            std::string(what) + ": exact mode supports at most " + std::to_string(limits.max_rademacher_terms) +
                " vectors");
    const double moment = kernels::rademacher_moment_exact(set, exponent);
    out.value = std::pow(moment, 1.0 / exponent) / denominator;
    out.samples = std::size_t{1} << vectors.size();
    return out;
  }
  const auto& sampled = std::get<SampledMode>(mode);
  require(sampled.count >= 2, std::string(what) + ": sampled mode needs at least two samples");
  const SampleStats stats = kernels::rademacher_moment_sampled(set, exponent, sampled.seed, sampled.count);
  out.value = std::pow(stats.mean, 1.0 / exponent) / denominator;
  out.std_error = stats.mean > 0.0
                      ? std::pow(stats.mean, 1.0 / exponent - 1.0) * stats.std_error / (exponent * denominator)
                      : 0.0;
  out.samples = stats.count;
  return out;
}

std::size_t checked_power(std::size_t base, unsigned e, double limit, const char* what) {
  double approx = 1.0;
  std::size_t exact = 1;
  for (unsigned i = 0; i < e; ++i) {
    approx *= static_cast<double>(base);
    require(approx <= limit, what);
    exact *= base;
  }
  return exact;
}

}  // namespace

RatioEstimate rademacher_type_ratio(const std::vector<PNormVector>& vectors, double p, const Mode& mode,
                                    const EnumerationLimits& limits) {
  require(std::isfinite(p) && p >= 1.0, "rademacher_type_ratio: exponent p must be >= 1");
  return rademacher_ratio(vectors, p, mode, limits, "rademacher_type_ratio");
}

RatioEstimate rademacher_cotype_ratio(const std::vector<PNormVector>& vectors, double q, const Mode& mode,
                                      const EnumerationLimits& limits) {
  require(std::isfinite(q) && q >= 2.0, "rademacher_cotype_ratio: exponent q must be >= 2");
  return rademacher_ratio(vectors, q, mode, limits, "rademacher_cotype_ratio");
}

HypercubeMap::HypercubeMap(unsigned n, std::vector<PNormVector> images) : n_(n), images_(std::move(images)) {
  require(n_ >= 1 && n_ < 63, "HypercubeMap: dimension n must be in 1..62");
  require(images_.size() == (std::size_t{1} << n_), "HypercubeMap: exactly 2^n images required");
  for (const auto& img : images_)
    require(img.same_space(images_.front()), "HypercubeMap: images must share exponent and dimension");
}

HypercubeMap HypercubeMap::identity(unsigned n, double p) {
  require(n >= 1 && n <= 24, "HypercubeMap::identity: n must be in 1..24");
  std::vector<PNormVector> images;
  images.reserve(std::size_t{1} << n);
  for (std::size_t s = 0; s < (std::size_t{1} << n); ++s) {
    std::vector<double> coords(n);
    for (unsigned j = 0; j < n; ++j) coords[j] = static_cast<double>((s >> j) & 1U);
    images.emplace_back(std::move(coords), p);
  }
  return HypercubeMap(n, std::move(images));
}

PointSet HypercubeMap::point_set() const { return flatten(images_); }

double metric_type_ratio(const HypercubeMap& map, double p, const EnumerationLimits& limits) {
  require(std::isfinite(p) && p >= 1.0, "metric_type_ratio: exponent p must be >= 1");
  require(map.n() <= limits.max_hypercube_dimension, "metric_type_ratio: hypercube dimension exceeds the limit");
  const HypercubeSums sums = kernels::hypercube_sums(map.point_set(), map.n());
  require(sums.edge_sq > 0.0, "metric_type_ratio: degenerate map (all edge distances are zero)");
  const double n = static_cast<double>(map.n());
  return std::sqrt(sums.diagonal_sq) / (std::pow(n, 1.0 / p - 0.5) * std::sqrt(sums.edge_sq));
}

GridMap::GridMap(unsigned n, unsigned m, Generator generator) : n_(n), m_(m), generator_(std::move(generator)) {
  require(n_ >= 1, "GridMap: dimension n must be >= 1");
  require(m_ >= 2 && m_ % 2 == 0, "GridMap: modulus m must be even and >= 2");
  require(static_cast<bool>(generator_), "GridMap: empty generator");
}

GridMap GridMap::from_table(unsigned n, unsigned m, std::vector<PNormVector> images) {
  std::size_t expected = 1;
  for (unsigned j = 0; j < n; ++j) expected *= m;
  require(images.size() == expected, "GridMap::from_table: exactly m^n images required");
  for (const auto& img : images)
    require(img.same_space(images.front()), "GridMap::from_table: images must share exponent and dimension");
  auto table = std::make_shared<const std::vector<PNormVector>>(std::move(images));
  return GridMap(n, m, [table, m](const std::vector<unsigned>& s) {
    std::size_t idx = 0;
    for (std::size_t j = s.size(); j-- > 0;) idx = idx * m + s[j];
    return (*table)[idx];
  });
}

GridMap GridMap::sigma(unsigned n, unsigned m, double q) {
  return GridMap(n, m, [m, q](const std::vector<unsigned>& s) { return sigma_embed(s, m, q); });
}

PointSet GridMap::dense() const {
  std::size_t points = 1;
  for (unsigned j = 0; j < n_; ++j) points *= m_;
  const PNormVector first = generator_(std::vector<unsigned>(n_, 0U));
  PointSet set;
  set.dim = first.size();
  set.p = first.p();
  set.block = first.block();
  set.coords.resize(points * set.dim);
  bool consistent = true;
#pragma omp parallel for schedule(static) reduction(&& : consistent)
  for (std::size_t idx = 0; idx < points; ++idx) {
    std::vector<unsigned> s(n_);
    std::size_t rest = idx;
    for (unsigned j = 0; j < n_; ++j) {
      s[j] = static_cast<unsigned>(rest % m_);
      rest /= m_;
    }
    const PNormVector img = generator_(s);
    if (!img.same_space(first)) {
      consistent = false;
      continue;
    }
    std::copy(img.coords().begin(), img.coords().end(), set.coords.begin() + static_cast<std::ptrdiff_t>(idx * set.dim));
  }
  require(consistent, "GridMap: generator images must share exponent and dimension");
  return set;
}

RatioEstimate metric_cotype_ratio(const GridMap& map, double q, const Mode& mode, const EnumerationLimits& limits) {
  require(std::isfinite(q) && q > 0.0, "metric_cotype_ratio: exponent q must be positive");
  const unsigned n = map.n();
  const unsigned m = map.m();
  const double md = static_cast<double>(m);
  RatioEstimate out;
  if (std::holds_alternative<ExactMode>(mode)) {
    checked_power(3 * static_cast<std::size_t>(m), n, limits.max_cotype_evaluations,
                  "metric_cotype_ratio: m^n * 3^n exceeds the exact-mode budget");
    const CotypeSums sums = kernels::cotype_sums_exact(map.dense(), n, m, q);
    out.samples = checked_power(m, n, kInfinity, "");
    if (sums.unit_step == 0.0) return out;
    out.value = std::pow(sums.half_shift / sums.unit_step, 1.0 / q) / md;
    return out;
  }
  const auto& sampled = std::get<SampledMode>(mode);
  require(sampled.count >= 2, "metric_cotype_ratio: sampled mode needs at least two samples");
  const PNormVector probe = map(std::vector<unsigned>(n, 0U));
  const kernels::GridImage image = [&map](std::span<const unsigned> s, std::span<double> dst) {
    const PNormVector v = map(std::vector<unsigned>(s.begin(), s.end()));
    std::copy(v.coords().begin(), v.coords().end(), dst.begin());
  };
  const CotypeSampled est =
      kernels::cotype_sums_sampled(image, probe.size(), probe.p(), probe.block(), n, m, q, sampled.seed, sampled.count);
  out.samples = sampled.count;
  if (est.unit_step.mean == 0.0 || est.half_shift.mean == 0.0) return out;
  out.value = std::pow(est.half_shift.mean / est.unit_step.mean, 1.0 / q) / md;
  const double rel_h = est.half_shift.std_error / est.half_shift.mean;
  const double rel_u = est.unit_step.std_error / est.unit_step.mean;
  out.std_error = out.value * std::sqrt(rel_h * rel_h + rel_u * rel_u) / q;
  return out;
}

PNormVector sigma_embed(const std::vector<unsigned>& s, unsigned m, double q) {
  require(m >= 2, "sigma_embed: modulus m must be >= 2");
  require(!s.empty(), "sigma_embed: empty grid point");
  std::vector<double> coords;
  coords.reserve(2 * s.size());
  for (unsigned k : s) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k % m) / static_cast<double>(m);
    coords.push_back(std::cos(angle));
    coords.push_back(std::sin(angle));
  }
  return PNormVector(std::move(coords), q, 2);
}

SpaceDescriptor SpaceDescriptor::ell(double r) {
  require(std::isfinite(r) && r >= 1.0, "space descriptor: exponent must be >= 1");
  return SpaceDescriptor(Kind::ell, r, nullptr);
}

SpaceDescriptor SpaceDescriptor::lebesgue(double r) {
  require(std::isfinite(r) && r >= 1.0, "space descriptor: exponent must be >= 1");
  return SpaceDescriptor(Kind::L, r, nullptr);
}

SpaceDescriptor SpaceDescriptor::c0() { return SpaceDescriptor(Kind::c0, kInfinity, nullptr); }

SpaceDescriptor SpaceDescriptor::ell_of(double q, SpaceDescriptor inner) {
  require(std::isfinite(q) && q >= 1.0, "space descriptor: exponent must be >= 1");
  return SpaceDescriptor(Kind::ell_of, q, std::make_shared<const SpaceDescriptor>(std::move(inner)));
}

namespace {

SpaceDescriptor parse_descriptor(std::string_view text, std::size_t& pos) {
  const auto fail = [&] {
    throw ValidationError("unknown space descriptor '" + std::string(text) +
                          "' (expected l<r>, L<r>, c0 or l<q>(<inner>))");
  };
  if (pos >= text.size()) fail();
  if (text.substr(pos, 2) == "c0") {
    pos += 2;
    return SpaceDescriptor::c0();
  }
  const char head = text[pos];
  if (head != 'l' && head != 'L') fail();
  ++pos;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
  if (ec != std::errc()) fail();
  pos = static_cast<std::size_t>(ptr - text.data());
  if (head == 'l' && pos < text.size() && text[pos] == '(') {
    ++pos;
    SpaceDescriptor inner = parse_descriptor(text, pos);
    if (pos >= text.size() || text[pos] != ')') fail();
    ++pos;
    return SpaceDescriptor::ell_of(value, std::move(inner));
  }
  return head == 'l' ? SpaceDescriptor::ell(value) : SpaceDescriptor::lebesgue(value);
}

std::string format_exponent(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

SpaceDescriptor SpaceDescriptor::parse(const std::string& text) {
  std::size_t pos = 0;
  SpaceDescriptor out = parse_descriptor(text, pos);
  if (pos != text.size())
    throw ValidationError("unknown space descriptor '" + text + "' (trailing characters)");
  return out;
}

std::string SpaceDescriptor::to_string() const {
  switch (kind_) {
    case Kind::ell: return "l" + format_exponent(exponent_);
    case Kind::L: return "L" + format_exponent(exponent_);
    case Kind::c0: return "c0";
    case Kind::ell_of: return "l" + format_exponent(exponent_) + "(" + inner_->to_string() + ")";
  }
  return {};
}

TypeCotypeProfile space_profile(const SpaceDescriptor& space) {
  switch (space.kind()) {
    case SpaceDescriptor::Kind::ell:
    case SpaceDescriptor::Kind::L:
      return {std::min(space.exponent(), 2.0), std::max(space.exponent(), 2.0)};
    case SpaceDescriptor::Kind::c0:
      return {1.0, kInfinity};
    case SpaceDescriptor::Kind::ell_of: {
      const TypeCotypeProfile inner = space_profile(space.inner());
      return {std::min(inner.p_sup, space.exponent()), std::max(inner.q_inf, space.exponent())};
    }
  }
  throw ValidationError("space_profile: unknown descriptor");
}

NecessaryConditions necessary_conditions(double r, double s, double p, double q) {
  for (double x : {r, s, p, q}) require(std::isfinite(x) && x >= 1.0, "necessary_conditions: arguments must lie in [1, inf)");
  NecessaryConditions c;
  c.exponent_order = p <= q;
  c.type_clause = std::min(r / p, 2.0 / p) >= std::min({s / q, 1.0, 2.0 / q});
  c.cotype_clause = std::max(r, 2.0) <= std::max({s, q, 2.0});
  return c;
}

bool iff_verdict(double r, double p, double s, double q) {
  require(r >= 1.0 && r <= 2.0, "iff_verdict: hypothesis r in [1,2] violated");
  require(s >= 1.0 && s <= 2.0, "iff_verdict: hypothesis s in [1,2] violated");
  require(std::isfinite(p) && p >= 1.0, "iff_verdict: hypothesis p in [1,inf) violated");
  require(std::isfinite(q) && q >= 1.0, "iff_verdict: hypothesis q in [1,inf) violated");
  require(s <= q, "iff_verdict: hypothesis s <= q violated");
  return p <= q && r / p >= s / q;
}

std::vector<ObstructionRow> hypercube_obstruction_experiment(const ObstructionConfig& config) {
  require(config.alpha > 0.0 && config.alpha <= 1.0, "obstruction: alpha must lie in (0, 1]");
  const double type_p = config.type_exponent > 0.0 ? config.type_exponent : std::min(config.p_tgt, 2.0);
  std::vector<ObstructionRow> rows;
  for (unsigned n : config.n_values) {
    require(n >= 1 && n <= 10, "obstruction: n must be in 1..10");
    const HypercubeMap source_cube = HypercubeMap::identity(n, config.p_src);
    const FiniteMetricSpace source = metric_space_from_points(source_cube.images());

    std::vector<std::vector<double>> candidate;
    for (const auto& v : source_cube.images()) candidate.push_back(v.coords());

    SearchConfig search;
    search.target_dim = n;
    search.target_exponent = config.p_tgt;
    search.alpha = config.alpha;
    search.restarts = std::max<std::size_t>(1, config.restarts);
    search.iterations = std::max<std::size_t>(1, config.iterations);
    search.seed = config.seed;
    search.initial = candidate;
    const SearchResult found = local_min_distortion(source, search);

    ObstructionRow row;
    row.n = n;
    row.constantA = found.constantA;
    row.a_squared = found.constantA * found.constantA;
    row.target_metric_type_ratio = metric_type_ratio(HypercubeMap(n, found.table.images()), type_p);
    row.source_metric_type_ratio = metric_type_ratio(source_cube, type_p);
    row.growth = std::pow(static_cast<double>(n), config.alpha / config.p_src - 1.0 / config.p_tgt);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace snowflake
