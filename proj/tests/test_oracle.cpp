#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ddestab/oracle.hpp"
#include "ddestab/simulator.hpp"
#include "fixtures.hpp"

using namespace ddestab;
using fixtures::term;

namespace {

double eigen_radius(const Equation& eq) {
  const auto d = static_cast<Eigen::Index>(eq.T() + 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  A(0, 0) = 1.0;
  for (std::size_t l = 0; l < eq.size(); ++l) A(0, eq.term(l).delay.max_lag()) -= eq.coeff(l, 0);
  for (Eigen::Index i = 1; i < d; ++i) A(i, i - 1) = 1.0;
  return A.eigenvalues().cwiseAbs().maxCoeff();
}

RandomEquationOptions autonomous_options(Index T_max) {
  RandomEquationOptions o;
  o.autonomous = true;
  o.T_max = T_max;
  o.m_max = 4;
  return o;
}

}  // namespace

TEST_CASE("closed-form companion radii") {
  const std::pair<double, Index> double_root[] = {{0.25, 1}};
  const auto r = companion_radius(double_root);
  CHECK(r.radius == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.dimension == 2);

  const std::pair<double, Index> identity[] = {{0.0, 0}};
  CHECK(companion_radius(identity).radius == 1.0);
  CHECK(companion_radius(identity).dimension == 1);

  const auto growth = companion_radius(fixtures::unstable_pair());
  CHECK(std::fabs(growth.radius - (3.0 + std::sqrt(0.2)) / 2.0) < 1e-12);
  CHECK(growth.error_bound < 1e-6);

  // Cubic: (lambda - 0.5)(lambda^2 + 0.36) = lambda^3 - 0.5 lambda^2 + 0.36 lambda - 0.18.
  const std::pair<double, Index> cubic[] = {{0.5, 0}, {0.36, 1}, {-0.18, 2}};
  CHECK(companion_radius(cubic).radius == doctest::Approx(0.6).epsilon(1e-12));

  CHECK_THROWS_AS((void)companion_radius(fixtures::sin_cos_pair()), std::invalid_argument);
}

TEST_CASE("companion radius agrees with a dense eigensolver") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto eq = random_equation(seed, autonomous_options(9));
    const auto r = companion_radius(eq);
    const double ref = eigen_radius(eq);
    CHECK(r.dimension == eq.T() + 1);
    CHECK(r.radius >= 0.0);
    CHECK(std::fabs(r.radius - ref) <= std::max(r.error_bound, 1e-9));
    CHECK(std::fabs(r.radius - ref) < 1e-3);
  }
}

TEST_CASE("decay fits") {
  std::vector<double> geometric(300);
  for (std::size_t i = 0; i < geometric.size(); ++i) geometric[i] = std::pow(0.8, static_cast<double>(i));
  const auto g = fit_decay(geometric, 20);
  CHECK(std::fabs(g.mu_hat - 0.8) < 1e-9);
  CHECK_FALSE(g.super_exponential);
  CHECK(g.window.start == 20);
  CHECK(g.window.end == 299);

  const auto factorial = fit_decay(fundamental(fixtures::factorial_decay(), 0, 120), 20);
  CHECK(factorial.super_exponential);
  CHECK(factorial.mu_hat < 0.05);

  const auto defective = fit_decay(fundamental(fixtures::autonomous({{0.25, 1}}), 0, 400), 20);
  CHECK(std::fabs(defective.mu_hat - 0.5) < 1e-2);
  CHECK_FALSE(defective.super_exponential);

  const std::vector<double> zeros(100, 0.0);
  const auto z = fit_decay(zeros, 10);
  CHECK(z.degenerate);
  CHECK(z.mu_hat == 0.0);
  CHECK(z.decays());

  CHECK_THROWS_AS((void)fit_decay(geometric, 260), std::invalid_argument);
}

TEST_CASE("fitted envelope bounds the column") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto eq = random_equation(seed);
    const auto column = fundamental(eq, 0, 400);
    const auto fit = fit_decay(column, default_skip(eq));
    if (fit.degenerate) continue;
    for (Index i = fit.window.start; i <= fit.window.end; ++i) {
      const double bound = fit.L_hat * std::pow(fit.mu_hat, static_cast<double>(i - fit.window.start));
      CHECK(std::fabs(column[static_cast<std::size_t>(i)]) <= bound * (1 + 1e-9));
    }
  }
}

TEST_CASE("log-domain fit handles overflow") {
  const auto eq = fixtures::unstable_pair();
  const auto fit = fit_decay_log(fundamental_log_magnitude(eq, 0, 3000), default_skip(eq));
  CHECK(std::fabs(fit.mu_hat - (3.0 + std::sqrt(0.2)) / 2.0) < 1e-3);
  CHECK_FALSE(fit.decays());
}

TEST_CASE("fitted rate matches the spectral radius") {
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const auto eq = random_equation(seed, autonomous_options(5));
    const double radius = companion_radius(eq).radius;
    if (radius < 0.2 || radius > 0.98) continue;
    const auto fit = fit_decay_log(fundamental_log_magnitude(eq, 0, 2000), default_skip(eq));
    CHECK(std::fabs(fit.mu_hat - radius) <= 0.02);
    ++compared;
  }
  CHECK(compared >= 50);
}

TEST_CASE("tail equivalence") {
  const auto stable = fixtures::autonomous({{0.2, 1}});
  const std::vector<SeqExpr> garbage{SeqExpr::parse("3*sin(n)+2")};
  CHECK(tail_equivalence_test(stable, 10, garbage, 600));

  const auto growth = fixtures::unstable_pair();
  const std::vector<SeqExpr> zero{SeqExpr::constant(0.0), SeqExpr::constant(0.0)};
  CHECK(tail_equivalence_test(growth, 10, zero, 600));
  CHECK(tail_equivalence_test(growth, 0, zero, 600));

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto eq = random_equation(seed);
    std::vector<SeqExpr> prefix;
    for (std::size_t l = 0; l < eq.size(); ++l) prefix.push_back(SeqExpr::parse("2*cos(3*n)"));
    CHECK(tail_equivalence_test(eq, 15, prefix, 800));
  }
}

TEST_CASE("random equations") {
  const auto eq = random_equation(0);
  REQUIRE(eq.size() == 1);
  CHECK(eq.term(0).coeff.to_string() == "per(0.5974946626946717, 0.05715979146532357, 0.42357052985381305)");
  CHECK(eq.term(0).delay == DelaySpec::constant(5));

  RandomEquationOptions scalar;
  scalar.m_max = 1;
  scalar.T_max = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_equation(seed, scalar);
    CHECK(s.size() == 1);
    CHECK(s.T() == 0);
  }

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = random_equation(seed);
    const auto b = random_equation(seed);
    REQUIRE(a.size() == b.size());
    for (std::size_t l = 0; l < a.size(); ++l) {
      CHECK(a.term(l).coeff.to_string() == b.term(l).coeff.to_string());
      CHECK(a.term(l).delay == b.term(l).delay);
    }
    CHECK(a.K() <= 1.0);
    CHECK(a.T() <= 5);
    CHECK(a.size() <= 3);
    CHECK(random_equation(seed, autonomous_options(5)).is_autonomous());
  }
  RandomEquationOptions bad;
  bad.K_max = 0.0;
  CHECK_THROWS_AS((void)random_equation(1, bad), std::invalid_argument);
}
