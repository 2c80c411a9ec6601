#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mtmusic/estimators.hpp"

namespace mtmusic {

/// Moments of the data under the transformed measure, plus E[u(X)].
struct MtMoments {
  ComplexVector mt_mean;
  ComplexMatrix mt_cov;
  double eu = 0.0;
  double log_eu = 0.0;
};

/// Closed-form moments for zero-mean proper complex normal data with
/// covariance sigma under the Gaussian MT-function:
/// mean 0, covariance (sigma^{-1} + tau^{-2} I)^{-1}, E[u] = (pi tau^2)^{-p} / det(I + sigma / tau^2).
MtMoments gaussian_analytic_mt_moments(const ComplexMatrix& sigma, double tau);

/// u(y) [(y - mu)(y - mu)^H - Sigma^(u)] / E[u].
ComplexMatrix influence_mt(std::span<const cdouble> y, const MtMoments& moments,
                           const MtFunctionSpec& u);

/// Finite-contamination influence (H[(1 - e) P + e delta_y] - H[P]) / e, with
/// ceil(epsilon N) copies of y appended to the base batch and e the realized fraction.
ComplexMatrix empirical_influence(const std::string& estimator_id, std::span<const cdouble> y,
                                  const SnapshotBatch& base, double epsilon,
                                  const EstimatorOptions& opts = {});

struct FisherRatioBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// tau^4 / (lambda_max + tau^2)^2 <= F_Q / F_P <= tau^4 / (lambda_min + tau^2)^2.
FisherRatioBounds fisher_ratio_bounds(const ComplexMatrix& sigma, double tau);

struct IfCurve {
  std::vector<double> norms;
  /// Series in insertion order: (label, Frobenius norms per entry of `norms`).
  std::vector<std::pair<std::string, std::vector<double>>> series;
};

struct IfCurveOptions {
  std::size_t dimension = 2;
  std::vector<double> taus = {1.0, 1.5, 2.0};
  std::vector<std::string> baselines = {"tyler", "sign", "scm"};
  std::size_t base_snapshots = 100000;
  double epsilon = 0.01;
  std::uint64_t seed = 1;
  std::size_t direction_axis = 0;
};

/// 64 log-spaced contamination norms in [0.1, 20].
std::vector<double> default_if_norms();

/// Standard complex normal base batch used by the influence curves.
SnapshotBatch standard_normal_batch(std::size_t p, std::size_t n, std::uint64_t seed);

/// Influence-function Frobenius norms versus contamination norm for a
/// standard complex normal base: analytic for the Gaussian MT-covariance at
/// each tau, finite-contamination for each baseline estimator.
IfCurve influence_curve(const std::vector<double>& norms, const IfCurveOptions& opts = {});

std::string if_curve_to_csv(const IfCurve& curve);

/// Empirical E[u^2] and E[||x||^4 u^2], finite whenever u and ||x||^4 u^2 are bounded.
struct ConsistencyMoments {
  double eu2 = 0.0;
  double ex4u2 = 0.0;
};
ConsistencyMoments consistency_moments(const MtFunctionSpec& u, const SnapshotBatch& x);

}  // namespace mtmusic
