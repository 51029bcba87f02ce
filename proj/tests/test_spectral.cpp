#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "kmsgraph/spectral.hpp"
#include "support/test_graphs.hpp"

using namespace kmsgraph;

namespace {

Eigen::MatrixXd random_irreducible(std::mt19937& rng, int max_n = 8,
                                   int max_mult = 3) {
  std::uniform_int_distribution<int> size_dist(1, max_n);
  std::uniform_int_distribution<int> mult_dist(1, max_mult);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const int n = size_dist(rng);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  // a full cycle guarantees strong connectivity, extra edges add texture
  for (int i = 0; i < n; ++i) a(i, (i + 1) % n) = mult_dist(rng);
  if (n == 1) a(0, 0) = mult_dist(rng);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (coin(rng) < 0.3) a(i, j) += mult_dist(rng);
  return a;
}

double eigen_solver_radius(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 0.0;
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("spectral radius of simple matrices") {
  Eigen::MatrixXd one(1, 1);
  one << 2.0;
  REQUIRE(spectral_radius(one) == 2.0);

  Eigen::MatrixXd cycle(2, 2);
  cycle << 0, 2, 1, 0;
  REQUIRE_THAT(spectral_radius(cycle),
               Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-12));

  const auto chains = kmstest::load_fixture("parallel_chains.graph");
  REQUIRE_THAT(spectral_radius(chains.adjacency_real()),
               Catch::Matchers::WithinAbs(2.0, 1e-12));
}

TEST_CASE("spectral radius of nilpotent matrices is exactly zero") {
  REQUIRE(spectral_radius(Eigen::MatrixXd::Zero(4, 4)) == 0.0);
  Eigen::MatrixXd upper = Eigen::MatrixXd::Zero(5, 5);
  upper(0, 2) = 3.0;
  upper(1, 4) = 1.0;
  upper(2, 3) = 2.0;
  REQUIRE(spectral_radius(upper) == 0.0);
}

TEST_CASE("spectral radius input validation") {
  REQUIRE_THROWS(spectral_radius(Eigen::MatrixXd::Zero(2, 3)));
  Eigen::MatrixXd neg(1, 1);
  neg << -1.0;
  REQUIRE_THROWS(spectral_radius(neg));
}

TEST_CASE("spectral radius equals the max over strongly connected blocks") {
  std::mt19937 rng(31337);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = kmstest::random_graph(rng, 9);
    const Eigen::MatrixXd a = g.adjacency_real();
    const double rho = spectral_radius(a);

    double block_max = 0.0;
    for (const auto& comp : kmstest::closure_components(g)) {
      const auto k = static_cast<Eigen::Index>(comp.size());
      Eigen::MatrixXd block(k, k);
      for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
          block(i, j) = a(comp[static_cast<std::size_t>(i)],
                          comp[static_cast<std::size_t>(j)]);
      block_max = std::max(block_max, spectral_radius(block));
    }
    REQUIRE_THAT(rho, Catch::Matchers::WithinAbs(block_max, 1e-10));
    REQUIRE_THAT(rho, Catch::Matchers::WithinAbs(eigen_solver_radius(a), 1e-8));
  }
}

TEST_CASE("perron_data on a 1x1 matrix") {
  Eigen::MatrixXd a(1, 1);
  a << 2.0;
  const auto pd = perron_data(a);
  REQUIRE(pd.rho == 2.0);
  REQUIRE(pd.left(0) == 1.0);
  REQUIRE(pd.right(0) == 1.0);
  REQUIRE(pd.projection(0, 0) == 1.0);
}

TEST_CASE("perron_data on the weighted 2-cycle") {
  Eigen::MatrixXd a(2, 2);
  a << 0, 2, 1, 0;
  const auto pd = perron_data(a);
  const double r2 = std::sqrt(2.0);
  REQUIRE_THAT(pd.rho, Catch::Matchers::WithinAbs(r2, 1e-12));
  // left eigenvector proportional to (sqrt 2, 1)
  REQUIRE_THAT(pd.left(0) / pd.left(1), Catch::Matchers::WithinAbs(r2, 1e-10));
  // right eigenvector proportional to (1, sqrt 2)
  REQUIRE_THAT(pd.right(1) / pd.right(0), Catch::Matchers::WithinAbs(r2, 1e-10));
  REQUIRE_THAT(pd.right.dot(pd.left), Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("perron_data invariants on random irreducible matrices") {
  std::mt19937 rng(271828);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::MatrixXd a = random_irreducible(rng);
    const auto pd = perron_data(a);
    const double scale_l = pd.left.cwiseAbs().maxCoeff();
    REQUIRE((a * pd.left - pd.rho * pd.left).cwiseAbs().maxCoeff() <=
            1e-10 * pd.rho * scale_l);
    REQUIRE((a.transpose() * pd.right - pd.rho * pd.right).cwiseAbs().maxCoeff() <=
            1e-10 * pd.rho * pd.right.cwiseAbs().maxCoeff());
    REQUIRE(pd.left.minCoeff() > 0.0);
    REQUIRE(pd.right.minCoeff() > 0.0);
    REQUIRE_THAT(pd.left.sum(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    const Eigen::MatrixXd& p = pd.projection;
    REQUIRE((p * p - p).cwiseAbs().maxCoeff() <= 1e-9);
    REQUIRE((a * p - pd.rho * p).cwiseAbs().maxCoeff() <= 1e-9 * pd.rho);
    REQUIRE((p * a - pd.rho * p).cwiseAbs().maxCoeff() <= 1e-9 * pd.rho);
  }
}

TEST_CASE("perron_data of a symmetric matrix has matching eigenvectors") {
  Eigen::MatrixXd a(3, 3);
  a << 1, 2, 0, 2, 0, 1, 0, 1, 3;
  const auto pd = perron_data(a);
  const Eigen::VectorXd r = pd.right / pd.right.sum();
  REQUIRE((pd.left - r).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("perron_data rejects reducible and nilpotent input") {
  Eigen::MatrixXd reducible(2, 2);
  reducible << 1, 1, 0, 1;
  REQUIRE_THROWS_WITH(perron_data(reducible),
                      Catch::Matchers::ContainsSubstring("not irreducible"));
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  REQUIRE_THROWS(perron_data(zero));
}

TEST_CASE("resolvent closed forms") {
  Eigen::MatrixXd a(1, 1);
  a << 2.0;
  REQUIRE_THAT(resolvent(a, 0.25)(0, 0), Catch::Matchers::WithinAbs(2.0, 1e-12));

  Eigen::MatrixXd cycle(2, 2);
  cycle << 0, 2, 1, 0;
  const Eigen::MatrixXd r = resolvent(cycle, 0.5);
  Eigen::MatrixXd expected(2, 2);
  expected << 2, 2, 1, 2;
  REQUIRE((r - expected).cwiseAbs().maxCoeff() <= 1e-12);

  REQUIRE((resolvent(cycle, 0.0) - Eigen::MatrixXd::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("resolvent refuses evaluation at or beyond the pole") {
  Eigen::MatrixXd a(1, 1);
  a << 2.0;
  REQUIRE_THROWS_WITH(resolvent(a, 0.5),
                      Catch::Matchers::ContainsSubstring("pole"));
  REQUIRE_THROWS(resolvent(a, 0.7));
}

TEST_CASE("resolvent entries are nonnegative with unit-dominated diagonal") {
  std::mt19937 rng(5150);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd a = random_irreducible(rng);
    const double z = 0.9 / spectral_radius(a);
    const Eigen::MatrixXd r = resolvent(a, z);
    REQUIRE(r.minCoeff() >= 0.0);
    REQUIRE(r.diagonal().minCoeff() >= 1.0);
  }
}

TEST_CASE("truncated Neumann sums approach the resolvent geometrically") {
  Eigen::MatrixXd a(3, 3);
  a << 1, 1, 0, 0, 0, 2, 1, 0, 0;
  const double rho = spectral_radius(a);
  const double z = 0.8 / rho;
  const Eigen::MatrixXd r = resolvent(a, z);

  Eigen::MatrixXd partial = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(3, 3);
  const int cap = 60;
  for (int n = 1; n <= cap; ++n) {
    term = z * (a * term);
    partial += term;
  }
  // geometric tail bound with a certified constant: A u <= s u
  Eigen::VectorXd u = Eigen::VectorXd::Ones(3);
  for (int sweep = 0; sweep < 300; ++sweep) {
    Eigen::VectorXd next = a * u + u;
    u = next / next.maxCoeff();
  }
  double s = 0.0;
  const Eigen::VectorXd au = a * u;
  for (int i = 0; i < 3; ++i) s = std::max(s, au(i) / u(i));
  const double q = z * s;
  const double constant = u.maxCoeff() / u.minCoeff();
  const double bound = constant * std::pow(q, cap + 1) / (1.0 - q);
  REQUIRE((r - partial).cwiseAbs().maxCoeff() <= bound);
}

TEST_CASE("pole residue of the one-loop-doubled vertex") {
  Eigen::MatrixXd a(1, 1);
  a << 2.0;
  REQUIRE_THAT(pole_residue(a, 0, 0), Catch::Matchers::WithinAbs(-0.5, 1e-12));
}

TEST_CASE("pole residue matches the numeric limit") {
  Eigen::MatrixXd a(2, 2);
  a << 0, 2, 1, 0;
  const double lambda = std::sqrt(2.0);
  const double predicted = pole_residue(a, 0, 1);
  // (z - 1/lambda) * [(I - zA)^{-1}]_{0,1} as z -> 1/lambda from below,
  // extrapolated linearly from two offsets
  auto probe = [&](double delta) {
    const double z = (1.0 - delta) / lambda;
    return (z - 1.0 / lambda) * resolvent(a, z)(0, 1);
  };
  const double f1 = probe(1e-5);
  const double f2 = probe(5e-6);
  const double limit = 2.0 * f2 - f1;
  REQUIRE_THAT(predicted, Catch::Matchers::WithinAbs(limit, 1e-6));
}

TEST_CASE("pole residue is strictly negative on random irreducible matrices") {
  std::mt19937 rng(161803);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::MatrixXd a = random_irreducible(rng, 6);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(a.rows()) - 1);
    REQUIRE(pole_residue(a, pick(rng), pick(rng)) < 0.0);
  }
}
