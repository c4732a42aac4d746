#include "doctest.h"
#include "oracles.hpp"

#include "pcparam/boltzmann.hpp"

using namespace pcparam;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), x.data());
  return x;
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double lo = -1, double hi = 1) {
  return oracle::uniform(rng, n, 1, lo, hi).col(0);
}

Eigen::VectorXd fd(const Eigen::VectorXd& x, double alpha, double step) {
  return oracle::fd_gradient([&](const Eigen::VectorXd& v) { return boltzmann(v, alpha); }, x, step);
}

}  // namespace

TEST_CASE("defining values") {
  for (double alpha : {-50.0, -1.0, 0.0, 3.0, 100.0}) CHECK(boltzmann(vec({0.7, 0.7, 0.7, 0.7}), alpha) == doctest::Approx(0.7));
  CHECK(boltzmann(vec({0, 1}), 1.0) == doctest::Approx(std::exp(1.0) / (1 + std::exp(1.0))).epsilon(1e-14));
  CHECK(boltzmann(vec({0, 1}), 10.0) == doctest::Approx(std::exp(10.0) / (1 + std::exp(10.0))).epsilon(1e-14));
  CHECK(boltzmann(vec({0, 1}), 1.0) == doctest::Approx(0.7310586).epsilon(1e-7));
  CHECK(boltzmann(vec({0, 1}), 10.0) == doctest::Approx(0.9999546).epsilon(1e-7));
  CHECK(boltzmann(vec({1, 2, 6}), 0.0) == doctest::Approx(3.0));
}

TEST_CASE("matches the unshifted formula where it does not overflow") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const Eigen::VectorXd x = random_vector(rng, 1 + t % 20, -3, 3);
    const double alpha = std::uniform_real_distribution<double>(-20, 20)(rng);
    CHECK(boltzmann(x, alpha) ==
          doctest::Approx(static_cast<double>(oracle::boltzmann({x.data(), x.data() + x.size()}, alpha))).epsilon(1e-12));
  }
}

TEST_CASE("large exponents stay finite") {
  const Eigen::VectorXd x = vec({1000, 999, -1000});
  CHECK(boltzmann(x, 100.0) == doctest::Approx(1000.0));
  CHECK(boltzmann(x, -100.0) == doctest::Approx(-1000.0));
  CHECK(boltzmann_gradient(x, 100.0).allFinite());
}

TEST_CASE("input errors") {
  CHECK_THROWS_AS(boltzmann(Eigen::VectorXd(0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(boltzmann_gradient(Eigen::VectorXd(0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(boltzmann(vec({1, 2}), std::numeric_limits<double>::infinity()), std::invalid_argument);
  CHECK_THROWS_AS(audit_boltzmann_bound(vec({2, 2, 2}), 1.0), std::invalid_argument);
}

TEST_CASE("gradient") {
  CHECK((boltzmann_gradient(vec({4, 4, 4}), 7.0) - Eigen::Vector3d::Constant(1.0 / 3)).norm() < 1e-15);

  const Eigen::VectorXd two = vec({0, 1});
  CHECK(oracle::rel_error(boltzmann_gradient(two, 1.0), fd(two, 1.0, 1e-6)) < 1e-5);

  std::mt19937_64 rng(12);
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd x = random_vector(rng, 8);
    const double alpha = t == 0 ? 5.0 : std::uniform_real_distribution<double>(-30, 30)(rng);
    const Eigen::VectorXd g = boltzmann_gradient(x, alpha), f = fd(x, alpha, 1e-6);
    for (int i = 0; i < 8; ++i) CHECK(g(i) == doctest::Approx(f(i)).epsilon(1e-5).scale(1e-3));
    const auto both = boltzmann_with_gradient(x, alpha);
    CHECK(both.value == doctest::Approx(boltzmann(x, alpha)).epsilon(1e-15));
    CHECK((both.gradient - g).norm() == 0.0);
    // Shift equivariance implies the gradient sums to one.
    CHECK(g.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("properties on random vectors") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> a(-60, 60), c(-100, 100);
  for (int t = 0; t < 500; ++t) {
    const Eigen::Index n = 1 + t % 40;
    const Eigen::VectorXd x = random_vector(rng, n, -5, 5);
    const double alpha = a(rng);
    const double b = boltzmann(x, alpha);
    CHECK(b >= x.minCoeff());
    CHECK(b <= x.maxCoeff());

    // Permutation
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::VectorXd px(n);
    for (Eigen::Index i = 0; i < n; ++i) px(i) = x(perm[static_cast<std::size_t>(i)]);
    CHECK(boltzmann(px, alpha) == doctest::Approx(b).epsilon(1e-13));
    const Eigen::VectorXd g = boltzmann_gradient(x, alpha), pg = boltzmann_gradient(px, alpha);
    for (Eigen::Index i = 0; i < n; ++i) CHECK(pg(i) == doctest::Approx(g(perm[static_cast<std::size_t>(i)])).epsilon(1e-12));

    const double shift = c(rng);
    CHECK(std::abs(boltzmann(Eigen::VectorXd(x.array() + shift), alpha) - (b + shift)) <= 1e-10);
    CHECK(std::abs(boltzmann(x, -alpha) + boltzmann(Eigen::VectorXd(-x), alpha)) <= 1e-12);
  }
}

TEST_CASE("error bound for the soft extrema") {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 300; ++t) {
    const Eigen::Index n = 2 + t % 30;
    Eigen::VectorXd x = random_vector(rng, n);
    const int m = 1 + t % 3;
    for (int i = 0; i < m && i < n - 1; ++i) x(i) = 1.0;
    std::shuffle(x.data(), x.data() + n, rng);
    for (double alpha : {1.0, 2.0, 5.0, 10.0, 50.0}) {
      const BoltzmannBoundAudit r = audit_boltzmann_bound(x, alpha);
      CHECK(r.holds());
      CHECK(r.max_multiplicity == std::count(x.data(), x.data() + n, x.maxCoeff()));
      CHECK(std::abs(r.max_error - (x.maxCoeff() - boltzmann(x, alpha))) < 1e-15);
      CHECK(std::abs(r.min_error - (boltzmann(x, -alpha) - x.minCoeff())) < 1e-15);
    }
  }
}

TEST_CASE("soft maximum approaches the maximum monotonically") {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd x = random_vector(rng, 2 + t % 20);
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha = 1; alpha <= 128; alpha *= 2) {
      const double err = std::abs(boltzmann(x, alpha) - x.maxCoeff());
      CHECK(err <= prev);
      prev = err;
    }
  }
}
