#include <doctest.h>

#include <Eigen/QR>
#include <random>

#include "dinterp/error.hpp"
#include "dinterp/lowrank.hpp"
#include "dinterp/scenarios.hpp"

using namespace dinterp;

namespace {

Eigen::MatrixXd random_orthonormal(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

}  // namespace

TEST_CASE("interior levels are cell midpoints") {
  const auto y = interior_levels(4);
  CHECK(y == std::vector<double>{0.125, 0.375, 0.625, 0.875});
  CHECK_THROWS_AS(interior_levels(0), Error);
}

TEST_CASE("quantile sampling validates levels") {
  const QuantileCurve q({0.0, 1.0}, {2.0, 4.0});
  const std::vector<double> ok{0.25, 0.5};
  CHECK(sample_quantile(q, ok) == std::vector<double>{2.5, 3.0});
  const std::vector<double> edge{0.0};
  CHECK_THROWS_AS(sample_quantile(q, edge), Error);
  const std::vector<double> unsorted{0.5, 0.25};
  CHECK_THROWS_AS(sample_quantile(q, unsorted), Error);
}

TEST_CASE("Jacobi SVD recovers a known spectrum") {
  const Eigen::MatrixXd u = random_orthonormal(7, 3, 1), v = random_orthonormal(3, 3, 2);
  const Eigen::MatrixXd a = u * Eigen::Vector3d(3, 2, 1).asDiagonal() * v.transpose();
  const SvdResult r = jacobi_svd(a);
  REQUIRE(r.singular_values.size() == 3);
  CHECK(r.singular_values[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.singular_values[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.singular_values[2] == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::VectorXd s(3);
  for (int i = 0; i < 3; ++i) s[i] = r.singular_values[i];
  CHECK((r.u * s.asDiagonal() * r.v.transpose() - a).norm() <= 1e-10);
  CHECK((r.u.transpose() * r.u - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-12);
  for (int k = 0; k < 3; ++k) {
    Eigen::Index i;
    r.u.col(k).cwiseAbs().maxCoeff(&i);
    CHECK(r.u(i, k) > 0.0);
  }
}

TEST_CASE("Jacobi SVD handles rank deficiency and rejects wide matrices") {
  Eigen::MatrixXd a(4, 3);
  a << 1, 2, 3, 2, 4, 6, 0, 0, 0, 1, 2, 3;
  const SvdResult r = jacobi_svd(a);
  CHECK(r.singular_values[1] <= 1e-12);
  CHECK((r.u.transpose() * r.u - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-12);
  CHECK_THROWS_AS(jacobi_svd(Eigen::MatrixXd::Ones(2, 3)), Error);
}

TEST_CASE("Jacobi SVD agrees with Eigen on a random matrix") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1, 1);
  Eigen::MatrixXd a(20, 8);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = d(rng);
  const SvdResult r = jacobi_svd(a);
  const Eigen::JacobiSVD<Eigen::MatrixXd> ref(a);
  for (int k = 0; k < 8; ++k) CHECK(r.singular_values[k] == doctest::Approx(ref.singularValues()[k]).epsilon(1e-12));
}

TEST_CASE("snapshot matrix of identical curves is rejected") {
  const QuantileCurve q({0.0, 1.0}, {0.0, 1.0});
  const std::vector<QuantileCurve> same{q, q, q};
  const auto levels = interior_levels(8);
  try {
    build_snapshots(same, levels);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllIdentical);
  }
  const std::vector<QuantileCurve> one{q};
  CHECK_THROWS_AS(build_snapshots(one, levels), Error);
}

TEST_CASE("random hats have two dominant transport modes") {
  const Grid1D g = Grid1D::uniform(0, 1, 1000);
  const auto hats = random_hats(50, 42, g);
  std::vector<QuantileCurve> curves;
  for (const auto& h : hats) curves.push_back(pseudo_inverse(cdf(h)));
  const SnapshotMatrix s = build_snapshots(curves, interior_levels(512));
  const ModeBasis b = svd(s);
  CHECK(b.singular_values[2] / b.singular_values[0] <= 1e-2);
  CHECK(b.singular_values[1] / b.singular_values[0] >= 1e-2);
  for (Eigen::Index k = 0; k < s.data.cols(); ++k) CHECK(s.data.col(k).norm() == doctest::Approx(1.0));
}

TEST_CASE("reconstruction at full rank reproduces a member") {
  const Grid1D g = Grid1D::uniform(0, 1, 400);
  const auto hats = random_hats(6, 9, g);
  std::vector<QuantileCurve> curves;
  for (const auto& h : hats) curves.push_back(pseudo_inverse(cdf(h)));
  const auto levels = interior_levels(64);
  const ModeBasis b = svd(build_snapshots(curves, levels));
  const QuantileCurve r = reconstruct(b, InterpWeights::vertex(3, 6), curves, b.modes.cols());
  const auto want = sample_quantile(curves[3], levels);
  const auto got = sample_quantile(r, levels);
  for (std::size_t q = 0; q < levels.size(); ++q) CHECK(got[q] == doctest::Approx(want[q]).epsilon(1e-10));
  try {
    reconstruct(b, InterpWeights::vertex(0, 6), curves, b.modes.cols() + 1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankTooLarge);
  }
}

TEST_CASE("isotonic fit pools adjacent violators") {
  const std::vector<double> v{1, 3, 2, 4, 0};
  const auto f = isotonic_fit(v);
  const std::vector<double> want{1, 2.25, 2.25, 2.25, 2.25};
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(f[i] == doctest::Approx(want[i]));
  const std::vector<double> sorted{0, 1, 1, 5};
  CHECK(isotonic_fit(sorted) == sorted);
}

TEST_CASE("singular statistics use the population convention") {
  const SingularStats s = singular_stats({{1.0, 2.0}, {3.0, 2.0}});
  CHECK(s.means == std::vector<double>{2.0, 2.0});
  CHECK(s.stds[0] == doctest::Approx(1.0));
  CHECK(s.stds[1] == 0.0);
  CHECK_THROWS_AS(singular_stats({}), Error);
  CHECK_THROWS_AS(singular_stats({{1.0}, {1.0, 2.0}}), Error);
}
