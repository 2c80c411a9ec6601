#include "mtmusic/influence.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "mtmusic/error.hpp"
#include "mtmusic/rng.hpp"

namespace mtmusic {

MtMoments gaussian_analytic_mt_moments(const ComplexMatrix& sigma, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be positive");
  const CholeskyFactor chol(sigma);  // HPD check
  (void)chol;
  const double tau2 = tau * tau;
  const auto eig = hermitian_eig(sigma);
  const std::size_t p = sigma.rows();

  MtMoments m;
  m.mt_mean = ComplexVector(p);
  m.mt_cov = ComplexMatrix(p, p);
  double log_det = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    const double l = eig.eigenvalues[k];
    log_det += std::log1p(l / tau2);
    const double f = l * tau2 / (l + tau2);
    for (std::size_t i = 0; i < p; ++i) {
      const cdouble vik = eig.eigenvectors(i, k) * f;
      for (std::size_t j = 0; j < p; ++j) m.mt_cov(i, j) += vik * std::conj(eig.eigenvectors(j, k));
    }
  }
  m.mt_cov = hermitian_part(m.mt_cov);
  m.log_eu = -static_cast<double>(p) * std::log(std::numbers::pi * tau2) - log_det;
  m.eu = std::exp(m.log_eu);
  return m;
}

ComplexMatrix influence_mt(std::span<const cdouble> y, const MtMoments& moments,
                           const MtFunctionSpec& u) {
  const std::size_t p = moments.mt_cov.rows();
  if (y.size() != p || moments.mt_mean.size() != p) {
    throw Error(ErrorKind::InvalidArgument, "influence_mt: dimension mismatch");
  }
  // log_eu covers the case where E[u] underflows in high dimension.
  const double log_eu = moments.eu > 0.0 ? std::log(moments.eu) : moments.log_eu;
  const double ratio = std::exp(u.log_evaluate(y) - log_eu);
  ComplexVector d(p);
  for (std::size_t i = 0; i < p; ++i) d[i] = y[i] - moments.mt_mean[i];
  ComplexMatrix out(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      out(i, j) = ratio * (d[i] * std::conj(d[j]) - moments.mt_cov(i, j));
  return hermitian_part(out);
}

namespace {

EstimatorOptions influence_options(const std::string& estimator_id, const SnapshotBatch& base,
                                   const EstimatorOptions& opts) {
  EstimatorOptions local = opts;
  // The contaminated and clean batches must share one transform.
  if (estimator_id == estimator_ids::kMtGauss && !local.fixed_tau) {
    local.fixed_tau = select_tau(base, local.tau_selection).tau;
  }
  return local;
}

ComplexMatrix contaminated_difference(const std::string& estimator_id,
                                      std::span<const cdouble> y, const SnapshotBatch& base,
                                      double epsilon, const EstimatorOptions& local,
                                      const ComplexMatrix& clean) {
  const std::size_t n = base.snapshots();
  const std::size_t p = base.sensors();
  const auto copies = static_cast<std::size_t>(std::ceil(epsilon * static_cast<double>(n)));
  ComplexMatrix mixed(p, n + copies);
  for (std::size_t j = 0; j < p; ++j) {
    const auto src = base.x.row(j);
    auto dst = mixed.row(j);
    std::copy(src.begin(), src.end(), dst.begin());
    for (std::size_t c = 0; c < copies; ++c) dst[n + c] = y[j];
  }
  const double realized = static_cast<double>(copies) / static_cast<double>(n + copies);
  const auto dirty = estimate_by_id(estimator_id, make_batch(std::move(mixed)), local);
  ComplexMatrix out = dirty.sigma - clean;
  out *= 1.0 / realized;
  return hermitian_part(out);
}

void check_influence_args(std::span<const cdouble> y, const SnapshotBatch& base, double epsilon) {
  if (!(epsilon > 0.0) || epsilon > 0.05) {
    throw Error(ErrorKind::InvalidArgument, "epsilon must lie in (0, 0.05]");
  }
  if (base.snapshots() < 1000) throw Error(ErrorKind::InvalidArgument, "base batch needs N >= 1000");
  if (y.size() != base.sensors()) {
    throw Error(ErrorKind::InvalidArgument, "contamination dimension mismatch");
  }
}

}  // namespace

ComplexMatrix empirical_influence(const std::string& estimator_id, std::span<const cdouble> y,
                                  const SnapshotBatch& base, double epsilon,
                                  const EstimatorOptions& opts) {
  check_influence_args(y, base, epsilon);
  const auto local = influence_options(estimator_id, base, opts);
  const auto clean = estimate_by_id(estimator_id, base, local);
  return contaminated_difference(estimator_id, y, base, epsilon, local, clean.sigma);
}

FisherRatioBounds fisher_ratio_bounds(const ComplexMatrix& sigma, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be positive");
  const CholeskyFactor chol(sigma);
  (void)chol;
  const auto eig = hermitian_eig(sigma);
  const double tau2 = tau * tau;
  const double lmax = eig.eigenvalues.front();
  const double lmin = eig.eigenvalues.back();
  if (!(lmin > 0.0)) throw Error(ErrorKind::NotPositiveDefinite, "sigma must be HPD");
  auto ratio = [tau2](double l) {
    const double r = tau2 / (l + tau2);
    return r * r;
  };
  return {ratio(lmax), ratio(lmin)};
}

std::vector<double> default_if_norms() {
  constexpr std::size_t kCount = 64;
  const double lo = std::log(0.1), hi = std::log(20.0);
  std::vector<double> norms(kCount);
  for (std::size_t i = 0; i < kCount; ++i) {
    norms[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kCount - 1));
  }
  norms.back() = 20.0;
  return norms;
}

SnapshotBatch standard_normal_batch(std::size_t p, std::size_t n, std::uint64_t seed) {
  CounterRng rng({seed, 0, stream_ids::kNoise});
  ComplexMatrix x(p, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) x(j, i) = sampling::complex_normal(rng, 1.0);
  SnapshotBatch b = make_batch(std::move(x));
  b.seed = seed;
  return b;
}

IfCurve influence_curve(const std::vector<double>& norms, const IfCurveOptions& opts) {
  const std::size_t p = opts.dimension;
  if (opts.direction_axis >= p) throw Error(ErrorKind::InvalidArgument, "direction axis out of range");
  IfCurve curve;
  curve.norms = norms;
  const long long count = static_cast<long long>(norms.size());

  auto point = [&](double r) {
    ComplexVector y(p);
    y[opts.direction_axis] = r;
    return y;
  };

  for (double tau : opts.taus) {
    const auto moments = gaussian_analytic_mt_moments(ComplexMatrix::identity(p), tau);
    const auto u = MtFunctionSpec::gaussian(tau, p);
    std::vector<double> vals(norms.size());
    for (std::size_t i = 0; i < norms.size(); ++i) {
      vals[i] = frob_norm(influence_mt(point(norms[i]), moments, u));
    }
    char label[64];
    std::snprintf(label, sizeof label, "mt-gauss:tau=%g", tau);
    curve.series.emplace_back(label, std::move(vals));
  }

  if (!opts.baselines.empty()) {
    const SnapshotBatch base = standard_normal_batch(p, opts.base_snapshots, opts.seed);
    EstimatorOptions eo;
    eo.sign_location = SignLocation::Zero;
    for (const auto& id : opts.baselines) {
      if (!is_known_estimator(id)) throw Error(ErrorKind::UnknownEstimator, id);
      const auto local = influence_options(id, base, eo);
      const auto clean = estimate_by_id(id, base, local).sigma;
      std::vector<double> vals(norms.size());
#pragma omp parallel for schedule(dynamic)
      for (long long i = 0; i < count; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const auto y = point(norms[ui]);
        check_influence_args(y, base, opts.epsilon);
        vals[ui] = frob_norm(contaminated_difference(id, y, base, opts.epsilon, local, clean));
      }
      curve.series.emplace_back(id, std::move(vals));
    }
  }
  return curve;
}

std::string if_curve_to_csv(const IfCurve& curve) {
  std::string out = "norm";
  for (const auto& [label, _] : curve.series) out += "," + label;
  out += "\n";
  char buf[64];
  for (std::size_t i = 0; i < curve.norms.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", curve.norms[i]);
    out += buf;
    for (const auto& [_, vals] : curve.series) {
      std::snprintf(buf, sizeof buf, ",%.17g", vals[i]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

ConsistencyMoments consistency_moments(const MtFunctionSpec& u, const SnapshotBatch& x) {
  ConsistencyMoments m;
  const std::size_t n = x.snapshots();
  ComplexVector col(x.sensors());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < x.sensors(); ++j) col[j] = x.x(j, i);
    const double uv = u.evaluate(col);
    const double r2 = squared_norm(col);
    m.eu2 += uv * uv;
    // ||x||^4 u^2 evaluated in log space so huge norms do not produce inf * 0.
    const double lg = 2.0 * std::log(r2) + 2.0 * u.log_evaluate(col);
    m.ex4u2 += r2 > 0.0 ? std::exp(lg) : 0.0;
  }
  m.eu2 /= static_cast<double>(n);
  m.ex4u2 /= static_cast<double>(n);
  return m;
}

}  // namespace mtmusic
