#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mtmusic/linalg.hpp"
#include "mtmusic/scenario.hpp"

namespace mtmusic {

/// MT-function u(x): identically one, or the Gaussian kernel
/// (pi tau^2)^{-p} exp(-||x||^2 / tau^2).
struct MtFunctionSpec {
  enum class Kind { Unit, Gaussian };
  Kind kind = Kind::Unit;
  double tau = 1.0;
  std::size_t dimension = 1;

  static MtFunctionSpec unit() { return {}; }
  static MtFunctionSpec gaussian(double tau, std::size_t dimension) {
    return {Kind::Gaussian, tau, dimension};
  }

  double evaluate(std::span<const cdouble> x) const;
  /// log u(x); finite even where evaluate() underflows.
  double log_evaluate(std::span<const cdouble> x) const;
};

struct CovarianceEstimate {
  ComplexMatrix sigma;
  ComplexVector mu;
  std::string estimator_id;
  std::optional<double> tau_used;
  std::optional<int> iterations;
  std::optional<bool> converged;
  /// Snapshots dropped by the estimator (sign covariance at the location).
  std::size_t skipped = 0;
};

struct TauSelection {
  double c = 5.0;
  int max_iters = 100;
  double rel_tol = 1e-6;
  double init_factor = 5.0;
};

struct TauResult {
  double tau = 0.0;
  int iterations = 0;
  bool converged = false;
};

enum class SignLocation { Zero, SpatialMedian };

namespace estimator_ids {
inline constexpr const char* kScm = "scm";
inline constexpr const char* kMtGauss = "mt-gauss";
inline constexpr const char* kSign = "sign";
inline constexpr const char* kTyler = "tyler";
inline constexpr const char* kZmnl = "zmnl";
}  // namespace estimator_ids

const std::vector<std::string>& known_estimators();
bool is_known_estimator(const std::string& id);

/// Normalized empirical weights u(x_n) / sum_m u(x_m).
std::vector<double> mt_weights(const MtFunctionSpec& u, const SnapshotBatch& x);

/// Weighted (biased) MT-covariance and MT-mean.
CovarianceEstimate empirical_mt_covariance(const MtFunctionSpec& u, const SnapshotBatch& x);

/// Unbiased sample covariance, sample-mean centred.
CovarianceEstimate sample_covariance(const SnapshotBatch& x);

/// gamma^2 [MAD(Re)^2 + MAD(Im)^2] with gamma = 1 / erfinv(3/4).
double mad_variance(std::span<const cdouble> samples);
/// 1 / erfinv(3/4).
double mad_gamma();

/// Fixed point of tau^2 = (c + 1) lambda_max(Sigma^(uG)(tau)), optionally on
/// the forward/backward smoothed matrix of the given subarray size.
TauResult select_tau(const SnapshotBatch& x, const TauSelection& sel,
                     std::optional<std::size_t> smoothing_subarray = std::nullopt);

/// Inverts the Gaussian relation: tau^2 S (tau^2 I - S)^{-1}.
ComplexMatrix sigma_from_mt(const ComplexMatrix& mt_cov, double tau);

CovarianceEstimate sign_covariance(const SnapshotBatch& x,
                                   SignLocation location = SignLocation::SpatialMedian);

/// Weiszfeld spatial median of the snapshots.
ComplexVector spatial_median(const ComplexMatrix& x, int max_iters = 100, double rel_tol = 1e-9);

CovarianceEstimate tyler_m_estimator(const SnapshotBatch& x, int max_iters = 100,
                                     double rel_tol = 1e-6);

/// Hard amplitude clip x_n * min(1, kappa / ||x_n||), kappa = clip_factor * median ||x_n||.
struct ClippedBatch {
  ComplexMatrix x;
  double kappa = 0.0;
};
ClippedBatch zmnl_clip(const ComplexMatrix& x, double clip_factor = 3.0);

CovarianceEstimate zmnl_covariance(const SnapshotBatch& x, double clip_factor = 3.0);

/// Options for estimate_by_id; tau is used by "mt-gauss" when selection is off.
struct EstimatorOptions {
  TauSelection tau_selection;
  std::optional<double> fixed_tau;
  std::optional<std::size_t> smoothing_subarray;
  SignLocation sign_location = SignLocation::SpatialMedian;
  double zmnl_clip_factor = 3.0;
};

/// Dispatches on the estimator identity string. Throws UnknownEstimator.
CovarianceEstimate estimate_by_id(const std::string& id, const SnapshotBatch& x,
                                  const EstimatorOptions& opts = {});

}  // namespace mtmusic
