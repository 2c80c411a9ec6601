#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mtmusic/error.hpp"
#include "mtmusic/influence.hpp"
#include "test_util.hpp"

using namespace mtmusic;
using testutil::EMat;
using testutil::Rand;

TEST_CASE("gaussian_analytic_mt_moments") {
  const double s2 = 2.0, tau = 1.5;
  const auto m = gaussian_analytic_mt_moments(s2 * ComplexMatrix::identity(3), tau);
  const double ref = s2 * tau * tau / (s2 + tau * tau);
  CHECK(testutil::abs_frob(m.mt_cov, ref * ComplexMatrix::identity(3)) < 1e-13);
  for (auto v : m.mt_mean) CHECK(v == cdouble(0.0));

  Rand r(71);
  const auto sigma = r.random_hpd(4, 0.5);
  const auto big = gaussian_analytic_mt_moments(sigma, 1e6);
  CHECK(testutil::rel_frob(big.mt_cov, sigma) < 1e-5);

  // Oracle: (Sigma^{-1} + tau^{-2} I)^{-1} with Eigen.
  const auto g = gaussian_analytic_mt_moments(sigma, 0.8);
  const EMat oracle = (testutil::to_eigen(sigma).inverse() + EMat::Identity(4, 4) / 0.64).inverse();
  CHECK((testutil::to_eigen(g.mt_cov) - oracle).norm() < 1e-12 * oracle.norm());

  const auto one = gaussian_analytic_mt_moments(ComplexMatrix::identity(1), 1.0);
  CHECK(one.eu == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));

  CHECK_THROWS_AS(gaussian_analytic_mt_moments(-1.0 * ComplexMatrix::identity(2), 1.0), Error);
}

TEST_CASE("E[u] matches a Monte Carlo average") {
  Rand r(72);
  const auto sigma = r.random_hpd(2, 0.5);
  const auto x = r.complex_normal_batch(sigma, 200000);
  const auto u = MtFunctionSpec::gaussian(1.3, 2);
  double acc = 0.0;
  for (std::size_t n = 0; n < x.cols(); ++n) acc += u.evaluate(x.col(n));
  acc /= static_cast<double>(x.cols());
  CHECK(gaussian_analytic_mt_moments(sigma, 1.3).eu == doctest::Approx(acc).epsilon(0.02));
}

TEST_CASE("influence_mt") {
  Rand r(73);
  const auto sigma = r.random_hpd(3, 0.5);
  MtMoments unit{ComplexVector(3), sigma, 1.0, 0.0};
  const ComplexVector y = {cdouble(1.0, -2.0), cdouble(0.5), cdouble(0.0, 3.0)};
  const auto inf = influence_mt(y, unit, MtFunctionSpec::unit());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::abs(inf(i, j) - (y[i] * std::conj(y[j]) - sigma(i, j))) < 1e-13);

  const auto m = gaussian_analytic_mt_moments(sigma, 1.0);
  const auto u = MtFunctionSpec::gaussian(1.0, 3);
  const auto at_mean = influence_mt(m.mt_mean, m, u);
  auto expected = m.mt_cov;
  expected *= -u.evaluate(m.mt_mean) / m.eu;
  CHECK(testutil::abs_frob(at_mean, expected) < 1e-12 * frob_norm(expected));
  CHECK(hermitian_defect(influence_mt(y, m, u)) <= 1e-12);

  // Redescending: ||y|| = 20 vs ||y|| = 1 along the same direction, tau = 1.
  const auto m2 = gaussian_analytic_mt_moments(ComplexMatrix::identity(2), 1.0);
  const auto u2 = MtFunctionSpec::gaussian(1.0, 2);
  const double near = frob_norm(influence_mt(ComplexVector{1.0, 0.0}, m2, u2));
  const double far = frob_norm(influence_mt(ComplexVector{20.0, 0.0}, m2, u2));
  CHECK(far < 1e-100 * near);
}

TEST_CASE("influence_mt stays finite when E[u] underflows") {
  const std::size_t p = 64;
  const double tau = 1e3;
  const auto m = gaussian_analytic_mt_moments(ComplexMatrix::identity(p), tau);
  CHECK(m.eu == 0.0);
  CHECK(std::isfinite(m.log_eu));
  ComplexVector y(p);
  y[0] = 1.0;
  const auto inf = influence_mt(y, m, MtFunctionSpec::gaussian(tau, p));
  for (auto v : inf.entries()) CHECK(std::isfinite(std::abs(v)));
}

TEST_CASE("empirical_influence: SCM matches its analytic influence") {
  const auto base = standard_normal_batch(2, 20000, 3);
  const auto scm = sample_covariance(base).sigma;
  const ComplexVector y = {cdouble(3.0, 0.0), cdouble(0.0, -1.0)};
  const auto num = empirical_influence("scm", y, base, 0.01);
  ComplexMatrix ref(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) ref(i, j) = y[i] * std::conj(y[j]) - scm(i, j);
  CHECK(testutil::rel_frob(num, ref) < 0.10);
}

TEST_CASE("empirical_influence: mt-gauss matches influence_mt with empirical moments") {
  const auto base = standard_normal_batch(2, 20000, 4);
  const double tau = 1.5;
  const auto u = MtFunctionSpec::gaussian(tau, 2);
  const auto est = empirical_mt_covariance(u, base);
  double eu = 0.0;
  for (std::size_t n = 0; n < base.snapshots(); ++n) eu += u.evaluate(base.x.col(n));
  eu /= static_cast<double>(base.snapshots());
  const MtMoments emp{est.mu, est.sigma, eu, std::log(eu)};
  EstimatorOptions opts;
  opts.fixed_tau = tau;
  for (double r : {0.5, 2.0}) {
    const ComplexVector y = {cdouble(r, 0.0), cdouble(0.0)};
    const auto num = empirical_influence("mt-gauss", y, base, 0.01, opts);
    const auto ana = influence_mt(y, emp, u);
    CHECK(testutil::rel_frob(num, ana) < 0.10);
  }
}

TEST_CASE("empirical_influence: preconditions") {
  const auto base = standard_normal_batch(2, 1000, 5);
  const ComplexVector y = {1.0, 0.0};
  CHECK_THROWS_AS(empirical_influence("scm", y, base, 0.0), Error);
  CHECK_THROWS_AS(empirical_influence("scm", y, base, 0.06), Error);
  CHECK_THROWS_AS(empirical_influence("scm", y, standard_normal_batch(2, 999, 5), 0.01), Error);
  CHECK_THROWS_AS(empirical_influence("nope", y, base, 0.01), Error);
}

TEST_CASE("fisher_ratio_bounds") {
  const auto eye = fisher_ratio_bounds(ComplexMatrix::identity(3), std::sqrt(5.0));
  CHECK(eye.lower == doctest::Approx(25.0 / 36.0).epsilon(1e-14));
  CHECK(eye.upper == doctest::Approx(25.0 / 36.0).epsilon(1e-14));
  const auto inf = fisher_ratio_bounds(ComplexMatrix::identity(2), 1e8);
  CHECK(inf.lower == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<double> d = {4.0, 1.0};
  const auto b = fisher_ratio_bounds(ComplexMatrix::diagonal(d), 2.0);
  CHECK(b.lower == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(b.upper == doctest::Approx(0.64).epsilon(1e-14));
  Rand r(74);
  for (int rep = 0; rep < 20; ++rep) {
    const auto f = fisher_ratio_bounds(r.random_hpd(4), r.uniform(0.1, 5.0));
    CHECK(f.lower > 0.0);
    CHECK(f.lower <= f.upper);
    CHECK(f.upper <= 1.0);
  }
  CHECK_THROWS_AS(fisher_ratio_bounds(ComplexMatrix(2, 2), 1.0), Error);
}

TEST_CASE("influence curve: shape and qualitative behaviour") {
  IfCurveOptions opts;
  opts.base_snapshots = 20000;
  opts.baselines = {"scm"};
  const std::vector<double> norms = {1.0, 2.0, 5.0, 10.0};
  const auto curve = influence_curve(norms, opts);
  REQUIRE(curve.series.size() == 4);
  for (const auto& [label, vals] : curve.series) CHECK(vals.size() == norms.size());
  CHECK(curve.series[0].first == "mt-gauss:tau=1");
  // Smaller tau decays faster: at ||y|| = 5, tau = 1 below tau = 2.
  CHECK(curve.series[0].second[2] < curve.series[2].second[2]);
  const auto& scm = curve.series[3].second;
  CHECK(scm[3] > scm[2]);
  CHECK(scm[2] > scm[1]);
  const auto csv = if_curve_to_csv(curve);
  CHECK(csv.rfind("norm,mt-gauss:tau=1,mt-gauss:tau=1.5,mt-gauss:tau=2,scm\n", 0) == 0);
}

TEST_CASE("influence curve: direction does not matter for a spherical base") {
  IfCurveOptions opts;
  opts.base_snapshots = 20000;
  opts.baselines = {"tyler"};
  const std::vector<double> norms = {3.0};
  const auto a = influence_curve(norms, opts);
  opts.direction_axis = 1;
  const auto b = influence_curve(norms, opts);
  for (std::size_t s = 0; s < a.series.size(); ++s) {
    CHECK(std::abs(a.series[s].second[0] - b.series[s].second[0]) <= 0.05 * a.series[s].second[0]);
  }
}

TEST_CASE("default_if_norms") {
  const auto n = default_if_norms();
  CHECK(n.size() == 64);
  CHECK(n.front() == doctest::Approx(0.1));
  CHECK(n.back() == 20.0);
  for (std::size_t i = 1; i < n.size(); ++i) CHECK(n[i] > n[i - 1]);
}
