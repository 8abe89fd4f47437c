#include <doctest.h>

#include <cmath>
#include <random>

#include "dinterp/error.hpp"
#include "dinterp/grid1d.hpp"
#include "test_util.hpp"

using namespace dinterp;

TEST_CASE("grid construction validates edges") {
  CHECK_THROWS_AS(Grid1D({0.0}), Error);
  CHECK_THROWS_AS(Grid1D({0.0, 0.5, 0.5}), Error);
  const Grid1D g = Grid1D::uniform(0.0, 1.0, 4);
  CHECK(g.cells() == 4);
  CHECK(g.edge(2) == 0.5);
  CHECK(g.right() == 1.0);
  CHECK(g.is_uniform());
  CHECK_FALSE(Grid1D({0.0, 0.1, 1.0}).is_uniform());
}

TEST_CASE("cdf of the unit indicator on four cells") {
  const PwcFunction1D u(Grid1D::uniform(0.0, 1.0, 4), {1.0, 1.0, 1.0, 1.0});
  const PwlCdf c = cdf(u);
  REQUIRE(c.size() == 5);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(c.x(j) == 0.25 * static_cast<double>(j));
    CHECK(c.value(j) == doctest::Approx(0.25 * static_cast<double>(j)));
  }
  CHECK(c.total_mass() == doctest::Approx(1.0));
  const QuantileCurve q = pseudo_inverse(c);
  CHECK(q.jumps().empty());
  for (double y : {0.0, 0.1, 0.5, 0.9, 1.0}) CHECK(q.left_limit(y) == doctest::Approx(y).epsilon(1e-15));
}

TEST_CASE("cdf rejects empty or negative densities and clips roundoff") {
  const Grid1D g = Grid1D::uniform(0.0, 1.0, 4);
  CHECK_THROWS_WITH_AS(cdf(PwcFunction1D::zeros(g)), doctest::Contains("ZeroMass"), Error);
  CHECK_THROWS_WITH_AS(cdf(PwcFunction1D(g, {1.0, -1e-3, 1.0, 1.0})), doctest::Contains("NegativeValue"), Error);
  const PwlCdf c = cdf(PwcFunction1D(g, {1.0, -1e-13, 1.0, 1.0}));
  CHECK(c.value(2) == doctest::Approx(0.25));
}

TEST_CASE("hat quantile has boundary jumps of the plateau lengths") {
  const double w = 0.05;
  const auto u = test::hat_cells(w, 3 * w, Grid1D::uniform(0.0, 1.0, 1000));
  const PwlCdf c = cdf(u);
  CHECK(c.evaluate(0.1) == 0.0);
  CHECK(c.evaluate(0.2) == doctest::Approx(1.0));
  CHECK(c.evaluate(0.5) == doctest::Approx(1.0));
  const auto jumps = pseudo_inverse(c).jumps();
  REQUIRE(jumps.size() == 2);
  CHECK(jumps[0].y == 0.0);
  CHECK(jumps[0].length() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(jumps[1].y == 1.0);
  CHECK(jumps[1].length() == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("left and right limits at an interior jump") {
  const QuantileCurve q({0.0, 0.5, 0.5, 1.0}, {0.0, 0.3, 0.5, 0.8});
  CHECK(q.left_limit(0.5) == 0.3);
  CHECK(q.right_limit(0.5) == 0.5);
  CHECK(q.left_limit(0.25) == doctest::Approx(0.15));
  CHECK(q.right_limit(0.75) == doctest::Approx(0.65));
  CHECK_THROWS_AS(q.left_limit(1.5), Error);
  CHECK_THROWS_AS(QuantileCurve({0.0, 0.6, 0.5, 1.0}, {0.0, 0.1, 0.2, 0.3}), Error);
}

TEST_CASE("quantile round trip is bit exact") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> edges{0.0};
    std::vector<double> values;
    for (int j = 0; j < 30; ++j) {
      edges.push_back(edges.back() + 0.01 + dist(rng));
      values.push_back(trial % 3 == 0 && j % 4 == 1 ? 0.0 : dist(rng));
    }
    const PwlCdf c = cdf(PwcFunction1D(Grid1D(edges), values));
    const PwlCdf back = quantile_to_cdf(pseudo_inverse(c), c.total_mass());
    CHECK(back == c);
  }
}

TEST_CASE("density_from_cdf inverts cdf and rejects atoms") {
  const Grid1D g = Grid1D::uniform(-1.0, 2.0, 7);
  const PwcFunction1D u(g, {0.5, 0.0, 2.0, 3.0, 0.0, 0.0, 1.0});
  const PwcFunction1D back = density_from_cdf(cdf(u));
  REQUIRE(back.grid() == g);
  for (std::size_t j = 0; j < g.cells(); ++j) CHECK(back.value(j) == doctest::Approx(u.value(j)).epsilon(1e-14));
  CHECK(back.mass() == doctest::Approx(cdf(u).total_mass()).epsilon(1e-14));

  const PwlCdf flat({0.0, 0.2, 0.4, 1.0}, {0.0, 0.5, 0.5, 1.0}, 1.0);
  const auto d = density_from_cdf(flat);
  CHECK(d.evaluate(0.3) == 0.0);
  CHECK(d.evaluate(0.1) == doctest::Approx(2.5));

  const PwlCdf atom({0.0, 0.5, 0.5, 1.0}, {0.0, 0.25, 0.75, 1.0}, 1.0);
  CHECK_THROWS_WITH_AS(density_from_cdf(atom), doctest::Contains("PointMass"), Error);
}

TEST_CASE("combine: identity, fixed point and weight validation") {
  const QuantileCurve id = QuantileCurve::identity();
  std::vector<QuantileCurve> one{id};
  std::vector<double> w1{1.0};
  CHECK(combine(one, w1) == id);

  std::vector<QuantileCurve> two{id, id};
  std::vector<double> half{0.5, 0.5};
  const auto c = combine(two, half);
  for (double y : {0.0, 0.3, 1.0}) CHECK(c.left_limit(y) == doctest::Approx(y).epsilon(1e-15));

  std::vector<double> bad{0.7, 0.7};
  CHECK_THROWS_WITH_AS(combine(two, bad), doctest::Contains("WeightSum"), Error);
  std::vector<double> neg{1.5, -0.5};
  CHECK_THROWS_AS(combine(two, neg), Error);
}

TEST_CASE("combine of copies is a fixed point for any weights") {
  const auto u = test::hat_cells(0.05, 0.4, Grid1D::uniform(0.0, 1.0, 200));
  const QuantileCurve q = pseudo_inverse(cdf(u));
  std::vector<QuantileCurve> copies(4, q);
  std::vector<double> w{0.1, 0.2, 0.3, 0.4};
  const QuantileCurve c = combine(copies, w);
  // Interior nodes of a flat run carry no information and are dropped; every
  // remaining node sits on one of the input's nodes.
  std::vector<double> canonical_y;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const bool interior = i > 0 && i + 1 < q.size() && q.ys()[i - 1] == q.ys()[i] && q.ys()[i + 1] == q.ys()[i];
    if (!interior) canonical_y.push_back(q.ys()[i]);
  }
  REQUIRE(c.size() == canonical_y.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c.ys()[i] == canonical_y[i]);
    CHECK(c.left_limit(c.ys()[i]) == doctest::Approx(q.left_limit(c.ys()[i])).epsilon(1e-15));
    CHECK(c.right_limit(c.ys()[i]) == doctest::Approx(q.right_limit(c.ys()[i])).epsilon(1e-15));
  }
}

TEST_CASE("combine of translated hats adds a jump at y = 0") {
  const double w = 0.05;
  const Grid1D g = Grid1D::uniform(0.0, 1.0, 1000);
  const auto q1 = pseudo_inverse(cdf(test::hat_cells(w, 3 * w, g)));
  const auto q6 = pseudo_inverse(cdf(test::hat_cells(w, 3 * w + 15 * w, g)));
  for (double lambda : {0.2, 0.5, 0.9}) {
    std::vector<QuantileCurve> pair{q1, q6};
    std::vector<double> wts{1.0 - lambda, lambda};
    const QuantileCurve c = combine(pair, wts);
    const auto jumps = c.jumps();
    REQUIRE(!jumps.empty());
    CHECK(jumps.front().y == 0.0);
    CHECK(jumps.front().length() == doctest::Approx(0.1 + 15 * w * lambda).epsilon(1e-12));
    for (double y : {0.1, 0.37, 0.5, 0.81}) {
      CHECK(c.left_limit(y) == doctest::Approx(q1.left_limit(y) + 15 * w * lambda).epsilon(1e-12));
    }
  }
}

TEST_CASE("combine is associative at the value level") {
  const Grid1D g = Grid1D::uniform(0.0, 1.0, 64);
  const auto a = pseudo_inverse(cdf(test::hat_cells(0.07, 0.2, g)));
  const auto b = pseudo_inverse(cdf(test::hat_cells(0.1, 0.5, g)));
  const auto c = pseudo_inverse(cdf(test::hat_cells(0.03, 0.8, g)));
  const std::vector<double> w{0.2, 0.5, 0.3};
  std::vector<QuantileCurve> all{a, b, c};
  const auto direct = combine(all, w);
  std::vector<QuantileCurve> ab{a, b};
  std::vector<double> wab{0.2 / 0.7, 0.5 / 0.7};
  std::vector<QuantileCurve> nested{combine(ab, wab), c};
  std::vector<double> wn{0.7, 0.3};
  const auto two_step = combine(nested, wn);
  for (int k = 0; k <= 1000; ++k) {
    const double y = k / 1000.0;
    CHECK(direct.left_limit(y) == doctest::Approx(two_step.left_limit(y)).epsilon(1e-14).scale(1.0));
    CHECK(direct.right_limit(y) == doctest::Approx(two_step.right_limit(y)).epsilon(1e-14).scale(1.0));
  }
}

TEST_CASE("quantile_to_cdf of the identity is the uniform CDF") {
  const PwlCdf c = quantile_to_cdf(QuantileCurve::identity(), 1.0);
  CHECK(c.evaluate(0.3) == doctest::Approx(0.3));
  const auto d = density_from_cdf(c);
  CHECK(d.cells() == 1);
  CHECK(d.value(0) == 1.0);
  CHECK_THROWS_AS(quantile_to_cdf(QuantileCurve::identity(), 0.0), Error);
}

TEST_CASE("resample preserves values and mass") {
  const Grid1D g = Grid1D::uniform(0.0, 1.0, 100);
  const auto u = test::hat_cells(0.1, 0.5, g);
  CHECK(resample(u, g) == u);

  const auto fine = resample(u, Grid1D::uniform(0.0, 1.0, 200));
  const auto back = resample(fine, g);
  for (std::size_t j = 0; j < g.cells(); ++j) CHECK(back.value(j) == doctest::Approx(u.value(j)).epsilon(1e-14));

  const auto coarse = resample(u, Grid1D::uniform(0.0, 1.0, 50));
  CHECK(std::abs(coarse.mass() - u.mass()) <= 1e-14 * u.mass());

  CHECK_THROWS_WITH_AS(resample(u, Grid1D::uniform(0.0, 0.5, 10)), doctest::Contains("DomainMismatch"), Error);
  const auto wider = resample(u, Grid1D::uniform(-1.0, 2.0, 30));
  CHECK(wider.mass() == doctest::Approx(u.mass()).epsilon(1e-14));
}

TEST_CASE("linear combination on the union grid") {
  const PwcFunction1D u(Grid1D({0.0, 0.5, 1.0}), {1.0, 2.0});
  const PwcFunction1D v(Grid1D({0.25, 0.75}), {4.0});
  const auto s = linear_combination(1.0, u, -0.5, v);
  REQUIRE(s.cells() == 4);
  CHECK(s.value(0) == 1.0);
  CHECK(s.value(1) == -1.0);
  CHECK(s.value(2) == 0.0);
  CHECK(s.value(3) == 2.0);
  CHECK(s.mass() == doctest::Approx(u.mass() - 0.5 * v.mass()));
}
