#include "mtmusic/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mtmusic/error.hpp"
#include "mtmusic/kernels.hpp"
#include "mtmusic/subspace.hpp"

namespace mtmusic {

namespace {

void require_snapshots(const SnapshotBatch& x, std::size_t min_n, const char* who) {
  if (x.snapshots() < min_n || x.sensors() == 0) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(who) + ": needs at least " + std::to_string(min_n) + " snapshots");
  }
}

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

double mad(std::vector<double> v) {
  const double med = median_of(v);
  for (double& e : v) e = std::abs(e - med);
  return median_of(std::move(v));
}

// Normalized Gaussian MT weights from precomputed squared norms. The common
// factor exp(-min ||x||^2 / tau^2) and the (pi tau^2)^{-p} prefactor cancel.
std::vector<double> gaussian_weights(std::span<const double> sq_norms, double tau) {
  const double inv_tau2 = 1.0 / (tau * tau);
  const double shift = *std::min_element(sq_norms.begin(), sq_norms.end());
  std::vector<double> w(sq_norms.size());
  double total = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    w[n] = std::exp(-(sq_norms[n] - shift) * inv_tau2);
    total += w[n];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorKind::DegenerateWeights, "MT weight sum is zero or non-finite");
  }
  for (double& e : w) e /= total;
  return w;
}

ComplexVector weighted_mean(const ComplexMatrix& x, std::span<const double> w) {
  ComplexVector mu(x.rows());
  for (std::size_t j = 0; j < x.rows(); ++j) {
    const auto row = x.row(j);
    cdouble acc{};
    for (std::size_t n = 0; n < x.cols(); ++n) acc += w[n] * row[n];
    mu[j] = acc;
  }
  return mu;
}

struct GaussianMtResult {
  ComplexMatrix sigma;
  ComplexVector mu;
};

GaussianMtResult gaussian_mt_from_norms(const ComplexMatrix& x, std::span<const double> sq_norms,
                                        double tau) {
  const auto w = gaussian_weights(sq_norms, tau);
  auto mu = weighted_mean(x, w);
  auto sigma = kernels::weighted_scatter(x, w, mu);
  return {std::move(sigma), std::move(mu)};
}

}  // namespace

// ---------------------------------------------------------------------------

double MtFunctionSpec::log_evaluate(std::span<const cdouble> x) const {
  if (kind == Kind::Unit) return 0.0;
  const double tau2 = tau * tau;
  return -static_cast<double>(dimension) * std::log(std::numbers::pi * tau2) -
         squared_norm(x) / tau2;
}

double MtFunctionSpec::evaluate(std::span<const cdouble> x) const {
  if (kind == Kind::Unit) return 1.0;
  return std::exp(log_evaluate(x));
}

const std::vector<std::string>& known_estimators() {
  static const std::vector<std::string> ids = {estimator_ids::kScm, estimator_ids::kMtGauss,
                                               estimator_ids::kSign, estimator_ids::kTyler,
                                               estimator_ids::kZmnl};
  return ids;
}

bool is_known_estimator(const std::string& id) {
  const auto& ids = known_estimators();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::vector<double> mt_weights(const MtFunctionSpec& u, const SnapshotBatch& x) {
  require_snapshots(x, 1, "mt_weights");
  const std::size_t n = x.snapshots();
  if (u.kind == MtFunctionSpec::Kind::Unit) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
  }
  if (!(u.tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be positive");
  const auto norms = kernels::column_sq_norms(x.x);
  for (double v : norms) {
    // An overflowing norm just gets zero weight; NaN data is an error.
    if (std::isnan(v)) throw Error(ErrorKind::DegenerateWeights, "NaN snapshot norm");
  }
  return gaussian_weights(norms, u.tau);
}

CovarianceEstimate empirical_mt_covariance(const MtFunctionSpec& u, const SnapshotBatch& x) {
  require_snapshots(x, 2, "empirical_mt_covariance");
  const auto w = mt_weights(u, x);
  CovarianceEstimate est;
  est.mu = weighted_mean(x.x, w);
  est.sigma = kernels::weighted_scatter(x.x, w, est.mu);
  est.estimator_id = u.kind == MtFunctionSpec::Kind::Unit ? "mt-unit" : estimator_ids::kMtGauss;
  if (u.kind == MtFunctionSpec::Kind::Gaussian) est.tau_used = u.tau;
  return est;
}

CovarianceEstimate sample_covariance(const SnapshotBatch& x) {
  require_snapshots(x, 2, "sample_covariance");
  const std::size_t n = x.snapshots();
  ComplexVector mean(x.sensors());
  for (std::size_t j = 0; j < x.sensors(); ++j) {
    cdouble acc{};
    for (const auto& v : x.x.row(j)) acc += v;
    mean[j] = acc / static_cast<double>(n);
  }
  const std::vector<double> w(n, 1.0 / static_cast<double>(n - 1));
  CovarianceEstimate est;
  est.sigma = kernels::weighted_scatter(x.x, w, mean);
  est.mu = std::move(mean);
  est.estimator_id = estimator_ids::kScm;
  return est;
}

double mad_gamma() {
  // 75th percentile of the standard normal, so that gamma * MAD estimates the
  // standard deviation of Gaussian data.
  constexpr double kNormalQ75 = 0.6744897501960817;
  return 1.0 / kNormalQ75;
}

double mad_variance(std::span<const cdouble> samples) {
  if (samples.size() < 2) throw Error(ErrorKind::InvalidArgument, "mad_variance needs 2 samples");
  std::vector<double> re(samples.size()), im(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    re[i] = samples[i].real();
    im[i] = samples[i].imag();
  }
  const double g = mad_gamma();
  const double mr = mad(std::move(re));
  const double mi = mad(std::move(im));
  return g * g * (mr * mr + mi * mi);
}

TauResult select_tau(const SnapshotBatch& x, const TauSelection& sel,
                     std::optional<std::size_t> smoothing_subarray) {
  require_snapshots(x, 2, "select_tau");
  const std::size_t p = x.sensors();
  const std::size_t n = x.snapshots();

  double mean_var = 0.0;
  for (std::size_t k = 0; k < p; ++k) mean_var += mad_variance(x.x.row(k));
  mean_var /= static_cast<double>(p);

  const auto sq_norms = kernels::column_sq_norms(x.x);
  double mean_power = 0.0;
  for (double v : sq_norms) mean_power += v;
  mean_power /= static_cast<double>(n);

  double tau0 = sel.init_factor * std::sqrt(mean_var);
  if (!(tau0 > 0.0)) tau0 = sel.init_factor * std::sqrt(mean_power / static_cast<double>(p));
  if (!(tau0 > 0.0) || !std::isfinite(tau0)) tau0 = 1.0;

  TauResult out;
  double tau = tau0;
  for (int it = 1; it <= sel.max_iters; ++it) {
    ComplexMatrix s = gaussian_mt_from_norms(x.x, sq_norms, tau).sigma;
    if (smoothing_subarray) s = spatial_smooth_fb(s, SmoothingConfig{*smoothing_subarray});
    const double lmax = lambda_max(s);
    out.iterations = it;
    if (!std::isfinite(lmax)) throw Error(ErrorKind::NonFiniteIterate, "lambda_max not finite");
    if (lmax <= 1e-12 * mean_power) {
      out.tau = 1e-6 * tau0;
      out.converged = false;
      return out;
    }
    const double next = std::sqrt((sel.c + 1.0) * lmax);
    if (!std::isfinite(next) || !(next > 0.0)) {
      throw Error(ErrorKind::NonFiniteIterate, "tau iterate not finite");
    }
    const double rel = std::abs(next - tau) / tau;
    tau = next;
    if (rel < sel.rel_tol) {
      out.converged = true;
      break;
    }
  }
  out.tau = tau;
  return out;
}

ComplexMatrix sigma_from_mt(const ComplexMatrix& mt_cov, double tau) {
  const double tau2 = tau * tau;
  const auto eig = hermitian_eig(mt_cov);
  if (!(tau2 > eig.eigenvalues.front())) {
    throw Error(ErrorKind::TauTooSmall, "tau^2 must exceed lambda_max of the MT-covariance");
  }
  // Same eigenvectors; eigenvalue map l -> tau^2 l / (tau^2 - l).
  const std::size_t p = mt_cov.rows();
  ComplexMatrix out(p, p);
  for (std::size_t k = 0; k < p; ++k) {
    const double l = eig.eigenvalues[k];
    const double f = tau2 * l / (tau2 - l);
    for (std::size_t i = 0; i < p; ++i) {
      const cdouble vik = eig.eigenvectors(i, k) * f;
      for (std::size_t j = 0; j < p; ++j) out(i, j) += vik * std::conj(eig.eigenvectors(j, k));
    }
  }
  return hermitian_part(out);
}

ComplexVector spatial_median(const ComplexMatrix& x, int max_iters, double rel_tol) {
  const std::size_t p = x.rows();
  const std::size_t n = x.cols();
  ComplexVector m(p);
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
      re[i] = x(j, i).real();
      im[i] = x(j, i).imag();
    }
    m[j] = {median_of(std::move(re)), median_of(std::move(im))};
  }

  std::vector<double> dist(n);
  auto distances = [&](const ComplexVector& c) {
    for (std::size_t i = 0; i < n; ++i) {
      double d = 0.0;
      for (std::size_t j = 0; j < p; ++j) d += std::norm(x(j, i) - c[j]);
      dist[i] = std::sqrt(d);
    }
  };
  distances(m);
  const double scale = median_of(dist);
  if (!(scale > 0.0)) return m;

  for (int it = 0; it < max_iters; ++it) {
    ComplexVector num(p);
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (dist[i] <= 1e-12 * scale) continue;
      const double inv = 1.0 / dist[i];
      den += inv;
      for (std::size_t j = 0; j < p; ++j) num[j] += x(j, i) * inv;
    }
    if (!(den > 0.0)) break;
    double step = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const cdouble next = num[j] / den;
      step += std::norm(next - m[j]);
      m[j] = next;
    }
    distances(m);
    if (std::sqrt(step) <= rel_tol * scale) break;
  }
  return m;
}

CovarianceEstimate sign_covariance(const SnapshotBatch& x, SignLocation location) {
  require_snapshots(x, 2, "sign_covariance");
  const std::size_t p = x.sensors();
  const std::size_t n = x.snapshots();
  ComplexVector loc = location == SignLocation::Zero ? ComplexVector(p) : spatial_median(x.x);

  std::vector<double> w(n, 0.0);
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < p; ++j) d += std::norm(x.x(j, i) - loc[j]);
    if (d > 0.0 && std::isfinite(d)) {
      w[i] = 1.0 / d;
      ++used;
    }
  }
  if (used == 0) throw Error(ErrorKind::InvalidArgument, "every snapshot sits at the location");
  for (double& e : w) e /= static_cast<double>(used);

  CovarianceEstimate est;
  est.sigma = kernels::weighted_scatter(x.x, w, loc);
  est.mu = std::move(loc);
  est.estimator_id = estimator_ids::kSign;
  est.skipped = n - used;
  return est;
}

CovarianceEstimate tyler_m_estimator(const SnapshotBatch& x, int max_iters, double rel_tol) {
  require_snapshots(x, 1, "tyler_m_estimator");
  const std::size_t p = x.sensors();
  const std::size_t n = x.snapshots();
  const double pd = static_cast<double>(p);
  const ComplexVector zero(p);

  ComplexMatrix sigma = ComplexMatrix::identity(p);
  std::vector<double> w(n);
  ComplexVector col(p);
  CovarianceEstimate est;
  est.converged = false;
  int it = 0;
  while (it < max_iters) {
    ++it;
    const CholeskyFactor chol(sigma);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) col[j] = x.x(j, i);
      const double qf = chol.inverse_quadratic_form(col);
      if (!(qf > 1e-300)) throw Error(ErrorKind::SingularIterate, "vanishing quadratic form");
      w[i] = pd / (static_cast<double>(n) * qf);
    }
    ComplexMatrix next = kernels::weighted_scatter(x.x, w, zero);
    const double tr = next.trace().real();
    if (!(tr > 0.0) || !std::isfinite(tr)) {
      throw Error(ErrorKind::SingularIterate, "degenerate Tyler iterate");
    }
    next *= pd / tr;
    next.set_hermitian_hint(true);
    const double change = frob_norm(next - sigma) / frob_norm(sigma);
    sigma = std::move(next);
    if (change < rel_tol) {
      est.converged = true;
      break;
    }
  }
  est.sigma = std::move(sigma);
  est.mu = zero;
  est.estimator_id = estimator_ids::kTyler;
  est.iterations = it;
  return est;
}

ClippedBatch zmnl_clip(const ComplexMatrix& x, double clip_factor) {
  const auto sq = kernels::column_sq_norms(x);
  std::vector<double> norms(sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) norms[i] = std::sqrt(sq[i]);
  ClippedBatch out;
  out.kappa = clip_factor * median_of(norms);
  out.x = x;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (norms[i] > out.kappa) {
      const double g = out.kappa / norms[i];
      for (std::size_t j = 0; j < x.rows(); ++j) out.x(j, i) *= g;
    }
  }
  return out;
}

CovarianceEstimate zmnl_covariance(const SnapshotBatch& x, double clip_factor) {
  require_snapshots(x, 2, "zmnl_covariance");
  auto clipped = zmnl_clip(x.x, clip_factor);
  CovarianceEstimate est = sample_covariance(make_batch(std::move(clipped.x)));
  est.estimator_id = estimator_ids::kZmnl;
  return est;
}

CovarianceEstimate estimate_by_id(const std::string& id, const SnapshotBatch& x,
                                  const EstimatorOptions& opts) {
  if (id == estimator_ids::kScm) return sample_covariance(x);
  if (id == estimator_ids::kSign) return sign_covariance(x, opts.sign_location);
  if (id == estimator_ids::kTyler) return tyler_m_estimator(x);
  if (id == estimator_ids::kZmnl) return zmnl_covariance(x, opts.zmnl_clip_factor);
  if (id == estimator_ids::kMtGauss) {
    TauResult tau;
    if (opts.fixed_tau) {
      tau.tau = *opts.fixed_tau;
    } else {
      tau = select_tau(x, opts.tau_selection, opts.smoothing_subarray);
    }
    CovarianceEstimate est =
        empirical_mt_covariance(MtFunctionSpec::gaussian(tau.tau, x.sensors()), x);
    if (!opts.fixed_tau) {
      est.iterations = tau.iterations;
      est.converged = tau.converged;
    }
    return est;
  }
  throw Error(ErrorKind::UnknownEstimator, "unknown estimator '" + id + "'");
}

}  // namespace mtmusic
