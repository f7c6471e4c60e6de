#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "snowflake/embeddings.hpp"
#include "snowflake/parallel.hpp"

using namespace snowflake;

namespace {

double dist(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// K^1 and K^2 written directly from their closed forms, on top of koch_eval.
Point2 k1(const KochParams& p, double t) {
  const Point2 z = koch_eval(p, t / 4.0);
  return {z.x / p.r(), z.y / p.r()};
}

Point2 k2(const KochParams& p, double t) {
  const Point2 z = k1(p, (t + 12.0) / 4.0);
  const double r = p.r();
  return {z.x / r - (1.0 / (r * r) - 1.0 / r), z.y / r};
}

StepFunction random_step(std::mt19937_64& gen, std::size_t pieces, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(pieces);
  for (double& x : v) x = u(gen);
  return StepFunction(std::move(v));
}

}  // namespace

TEST_CASE("KochParams validation and apex height") {
  CHECK_THROWS_AS(KochParams::from_ratio(0.25), ValidationError);
  CHECK_THROWS_AS(KochParams::from_ratio(0.5), ValidationError);
  CHECK_THROWS_AS(KochParams::from_alpha(0.5), ValidationError);
  const KochParams p = KochParams::from_ratio(0.3);
  CHECK(p.h() == doctest::Approx(std::sqrt(0.09 - 0.04)).epsilon(1e-15));
  CHECK(p.alpha() == doctest::Approx(std::log(1 / 0.3) / std::log(4.0)).epsilon(1e-15));
  CHECK(KochParams::from_alpha(0.75).r() == doctest::Approx(std::pow(4.0, -0.75)).epsilon(1e-15));
}

TEST_CASE("koch_eval anchors") {
  for (double r : {0.30, 0.35, 0.45}) {
    const KochParams p = KochParams::from_ratio(r);
    const Point2 expected[] = {{0, 0}, {r, 0}, {0.5, p.h()}, {1 - r, 0}, {1, 0}};
    for (int i = 0; i <= 4; ++i) {
      for (int depth : {40, 64}) {
        const Point2 z = koch_eval(p, i / 4.0, depth);
        CHECK(std::abs(z.x - expected[i].x) <= 1e-12);
        CHECK(std::abs(z.y - expected[i].y) <= 1e-12);
      }
    }
  }
}

TEST_CASE("koch_eval self-similarity on random t") {
  const KochParams p = KochParams::from_ratio(0.35);
  const CounterRng rng(0, 100);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double t = rng.uniform(i);
    const Point2 a = koch_eval(p, t / 4.0);
    const Point2 b = koch_eval(p, t);
    CHECK(dist(a, {p.r() * b.x, p.r() * b.y}) <= 1e-10);
  }
}

TEST_CASE("koch_extend reproduces K^1 and K^2 and koch_eval") {
  for (double r : {0.3, 0.4}) {
    const KochParams p = KochParams::from_ratio(r);
    const CounterRng rng(1, 100);
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const double u = rng.uniform(i);
      CHECK(dist(koch_extend(p, u), koch_eval(p, u)) <= 1e-10);
      CHECK(dist(koch_extend(p, 4 * u), k1(p, 4 * u)) <= 1e-10);
      CHECK(dist(koch_extend(p, -12 + 16 * u), k2(p, -12 + 16 * u)) <= 1e-10);
    }
    CHECK(dist(koch_extend(p, 4), {1 / r, 0}) <= 1e-12);
    CHECK(dist(koch_extend(p, -12), {1 / r - 1 / (r * r), 0}) <= 1e-12);
  }
}

TEST_CASE("koch_extend domain errors") {
  const KochParams p = KochParams::from_ratio(0.3);
  CHECK_THROWS_WITH_AS(koch_extend(p, 1e6, 3), doctest::Contains("increase max_steps"), ValidationError);
  CHECK_NOTHROW(koch_extend(p, 1e6, 64));
}

TEST_CASE("extension frames alternate first and last quarters") {
  const KochParams p = KochParams::from_ratio(0.3);
  const ExtensionFrame f1 = extension_frame(p, 1);
  const ExtensionFrame f2 = extension_frame(p, 2);
  CHECK(f1.a == 0);
  CHECK(f2.a == -12);
  CHECK(f2.length() == 16);
  CHECK(extension_frame(p, 3).a == -12);
  CHECK(extension_frame(p, 4).a == -12 - 3 * 64);
}

TEST_CASE("HolderLineMap stages and dimension") {
  CHECK(HolderLineMap(1.0)(7.0) == std::vector<double>{7.0});
  const HolderLineMap m3(0.3);
  CHECK(m3.stages() == 2);
  CHECK(m3.dimension() == 4);
  CHECK(m3(0.4).size() == 4);
  CHECK(HolderLineMap(0.75).stages() == 1);
  CHECK(HolderLineMap(0.5).stages() == 2);
  CHECK_THROWS_AS(HolderLineMap(0.0), ValidationError);
  CHECK_THROWS_AS(HolderLineMap(1.2), ValidationError);
}

TEST_CASE("Hölder sandwich and slope on sampled pairs") {
  const auto pairs = sample_pairs(4000, 0.0, 1.0, 1e-6, 3);
  const KochParams p = KochParams::from_ratio(0.35);
  std::vector<double> din, dout;
  double hi = 0, lo = kInfinity;
  for (auto [a, b] : pairs) {
    const double d = std::abs(a - b);
    const double e = dist(koch_eval(p, a), koch_eval(p, b));
    din.push_back(d);
    dout.push_back(e);
    hi = std::max(hi, e / std::pow(d, p.alpha()));
    lo = std::min(lo, e / std::pow(d, p.alpha()));
  }
  const double A = std::max(hi, 1 / lo);
  for (std::size_t i = 0; i < din.size(); ++i) {
    CHECK(dout[i] <= A * std::pow(din[i], p.alpha()) * (1 + 1e-12));
    CHECK(dout[i] >= std::pow(din[i], p.alpha()) / A * (1 - 1e-12));
  }
  CHECK(A < 10);
  CHECK(std::abs(fit_log_slope(din, dout) - p.alpha()) <= 0.03);
}

TEST_CASE("fit_log_slope recovers exact power laws") {
  std::vector<double> x{0.001, 0.01, 0.1, 1.0}, y;
  for (double v : x) y.push_back(3 * std::pow(v, 0.6));
  CHECK(fit_log_slope(x, y) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("TabulatedMap lookups") {
  TabulatedMap m = TabulatedMap::on_grid({0.0, 0.1, 11}, [](double t) { return std::vector<double>{t, -t}; });
  CHECK(m.defined_at(0.3));
  CHECK(m.at(0.30000000000001)[1] == doctest::Approx(-0.3));
  CHECK_FALSE(m.defined_at(0.35));
  CHECK_THROWS_AS(m.at(0.35), ValidationError);
  const TabulatedMap back = TabulatedMap::from_json(m.to_json());
  CHECK(back.size() == 11);
  CHECK(back.dimension() == 2);
}

TEST_CASE("lift_lr examples") {
  const std::vector<double> xs{0.0, 0.5, 1.0, 2.0};
  const TabulatedMap id = TabulatedMap::at_points(xs, [](double t) { return std::vector<double>{t}; });
  const StepFunction f({0.0, 1.0, 2.0, 0.5});
  CHECK(lift_lr(id, f, 2, 2).values() == f.values());
  const TabulatedMap two = TabulatedMap::at_points(xs, [](double t) { return std::vector<double>{t, t * t}; });
  CHECK(lr_distance(lift_lr(two, f, 1, 2), lift_lr(two, f, 1, 2), 2) == 0);
  SUBCASE("constants give the target norm of T(a) - T(b)") {
    const double s = 1.5;
    const double got = lr_distance(lift_lr(two, StepFunction({2.0}), 1, s), lift_lr(two, StepFunction({0.5}), 1, s), s);
    const double oracle = std::pow(std::pow(1.5, s) + std::pow(3.75, s), 1 / s);
    CHECK(got == doctest::Approx(oracle).epsilon(1e-13));
  }
  CHECK_THROWS_AS(lift_lr(two, StepFunction({0.25}), 1, 2), ValidationError);
}

TEST_CASE("lift_lr norm identity on random step pairs") {
  std::mt19937_64 gen(21);
  const HolderLineMap line(0.75);
  for (int trial = 0; trial < 100; ++trial) {
    const StepFunction f = random_step(gen, 1 + trial % 5, -2, 2);
    const StepFunction g = random_step(gen, 1 + trial % 3, -2, 2);
    std::vector<double> inputs = f.values();
    inputs.insert(inputs.end(), g.values().begin(), g.values().end());
    const TabulatedMap map = TabulatedMap::at_points(inputs, [&](double t) { return line(t); });
    for (double s : {1.0, 2.0, 3.0}) {
      const double lhs = std::pow(lr_distance(lift_lr(map, f, 1, s), lift_lr(map, g, 1, s), s), s);
      const double rhs = lift_lr_integrand(map, f, g, s);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, rhs));
    }
  }
}

TEST_CASE("lift_c0 examples") {
  const std::vector<double> xs{0.0, 1.0, 3.0};
  const TabulatedMap id = TabulatedMap::at_points(xs, [](double t) { return std::vector<double>{t}; });
  CHECK(lift_c0(id, xs) == xs);
  // u -> (u, 2u) is bi-Lipschitz with A = 2 in sup norm.
  const TabulatedMap lin = TabulatedMap::at_points(xs, [](double t) { return std::vector<double>{t, 2 * t}; });
  const std::vector<double> x{1.0, 0.0}, y{0.0, 0.0};
  const auto tx = lift_c0(lin, x), ty = lift_c0(lin, y);
  double sup = 0;
  for (std::size_t i = 0; i < tx.size(); ++i) sup = std::max(sup, std::abs(tx[i] - ty[i]));
  CHECK(sup >= 0.5);
  CHECK(sup <= 2.0);
  CHECK(tx[c0_pair_index(0, 2, 2)] == 2.0);
  const auto same = lift_c0(lin, x);
  CHECK(same == tx);
}

TEST_CASE("discretize_lr on common grids preserves distances exactly") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<StepFunction> family;
    for (int i = 0; i < 4; ++i) family.push_back(random_step(gen, std::size_t{1} << (i % 4), -3, 3).refined(8 >> (i % 4)));
    for (double r : {1.0, 2.0}) {
      const auto v = discretize_lr(family, r, 8);
      for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = i + 1; j < family.size(); ++j) {
          const double exact = lr_distance(family[i], family[j], r);
          if (exact > 0) CHECK(p_distance(v[i], v[j]) / exact == doctest::Approx(1).epsilon(1e-15));
        }
    }
  }
  const auto c = discretize_lr({StepFunction({2}), StepFunction({-1})}, 3, 7);
  CHECK(p_distance(c[0], c[1]) == doctest::Approx(3).epsilon(1e-15));
  CHECK_THROWS_AS(discretize_lr({StepFunction({1})}, 1, 0), ValidationError);
}

TEST_CASE("discretize_lr above the threshold stays within a factor of 2") {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<StepFunction> family{random_step(gen, 3, 0, 1), random_step(gen, 5, 0, 1), random_step(gen, 7, 0, 1)};
    for (double r : {1.0, 2.0}) {
      const std::size_t m = discretization_threshold(family, r);
      const auto v = discretize_lr(family, r, m);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) {
          const double ratio = p_distance(v[i], v[j]) / lr_distance(family[i], family[j], r);
          CHECK(ratio >= 0.5);
          CHECK(ratio <= 2.0);
        }
    }
  }
}

TEST_CASE("kuratowski_embed is an isometry into sup norm") {
  const FiniteMetricSpace two({"a", "b"}, {{0, 5}, {5, 0}});
  const EmbeddingTable t2 = kuratowski_embed(two);
  CHECK(t2.image("a").coords() == std::vector<double>{0, 5});
  CHECK(t2.image("b").coords() == std::vector<double>{5, 0});
  const FiniteMetricSpace path({"a", "b", "c"}, {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
  const EmbeddingTable tp = kuratowski_embed(path);
  CHECK(tp.image("b").coords() == std::vector<double>{1, 0, 1});
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<PNormVector> pts;
    for (int i = 0; i < 9; ++i) pts.emplace_back(std::vector<double>{u(gen), u(gen), u(gen)}, trial % 3 == 0 ? 1.0 : 2.0);
    const FiniteMetricSpace m = metric_space_from_points(pts);
    for (Recenter rc : {Recenter::none, Recenter::shift}) {
      const EmbeddingTable t = kuratowski_embed(m, rc);
      for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) CHECK(p_distance(t.image(i), t.image(j)) == doctest::Approx(m.distance(i, j)).epsilon(1e-15));
      if (rc == Recenter::shift)
        for (const auto& v : t.images())
          for (double c : v.coords()) CHECK((c >= 0 && c <= m.diameter()));
    }
    CHECK(holder_distortion(m, kuratowski_embed(m)).constantA == doctest::Approx(1).epsilon(1e-15));
  }
}

TEST_CASE("dyadic_round examples") {
  CHECK(dyadic_round(0.7, 2) == 0.5);
  CHECK(dyadic_round(0.0, 5) == 0.0);
  CHECK(dyadic_round(1.0, 3) == 1.0);
  CHECK_THROWS_AS(dyadic_round(1.5, 1), ValidationError);
  const std::vector<double> x{0.9, 0.9, 0.9};
  CHECK(dyadic_round(x, 1) == std::vector<double>{0.5, 0.75, 0.875});
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t n = 0; n < 60; ++n) {
    const double v = u(gen);
    const double w = dyadic_round(v, n);
    CHECK(w <= v);
    CHECK(v - w < std::ldexp(1.0, -static_cast<int>(n)));
  }
}

TEST_CASE("curve CSV has anchors and the requested rows") {
  std::ostringstream s;
  write_curve_csv(s, KochParams::from_ratio(0.3), 1000);
  std::istringstream in(s.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x,y");
  std::size_t rows = 0;
  std::vector<double> ts;
  while (std::getline(in, line)) {
    ++rows;
    ts.push_back(std::stod(line.substr(0, line.find(','))));
  }
  CHECK(rows == 1000);
  for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) CHECK(std::find(ts.begin(), ts.end(), a) != ts.end());
}
