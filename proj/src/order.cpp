#include "mtmusic/order.hpp"

#include <cmath>
#include <cstdio>

#include "mtmusic/error.hpp"

namespace mtmusic {

MdlResult mdl_criterion(std::span<const double> eigenvalues, std::size_t n_snapshots,
                        MdlVariant variant) {
  const std::size_t dim = eigenvalues.size();
  if (dim == 0) throw Error(ErrorKind::InvalidArgument, "no eigenvalues");
  if (n_snapshots < 2) throw Error(ErrorKind::InvalidArgument, "MDL needs N >= 2");
  for (std::size_t i = 0; i < dim; ++i) {
    if (!(eigenvalues[i] > 0.0) || !std::isfinite(eigenvalues[i])) {
      throw Error(ErrorKind::NonPositiveEigenvalue, "eigenvalue " + std::to_string(i));
    }
    if (i > 0 && eigenvalues[i] > eigenvalues[i - 1]) {
      throw Error(ErrorKind::UnsortedEigenvalues, "eigenvalues must be non-increasing");
    }
  }

  const double n = static_cast<double>(n_snapshots);
  const double log_n = std::log(n);
  const double d = static_cast<double>(dim);
  MdlResult out;
  out.criterion_values.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const double m = static_cast<double>(dim - k);
    double sum = 0.0, sum_log = 0.0;
    for (std::size_t i = k; i < dim; ++i) {
      sum += eigenvalues[i];
      sum_log += std::log(eigenvalues[i]);
    }
    // -log[(GM/AM)^{mN}] = mN (log AM - mean log)
    double data = m * n * (std::log(sum / m) - sum_log / m);
    if (data < 0.0) data = 0.0;  // AM >= GM; negative values are rounding
    const double kd = static_cast<double>(k);
    const double penalty = variant == MdlVariant::Standard
                               ? 0.5 * kd * (2.0 * d - kd) * log_n
                               : 0.25 * kd * (2.0 * d - kd + 1.0) * log_n;
    out.criterion_values[k] = data + penalty;
    if (out.criterion_values[k] < out.criterion_values[out.q_hat]) out.q_hat = k;
  }
  return out;
}

MdlResult order_criterion(const ComplexMatrix& cov, std::size_t n_snapshots, MdlVariant variant) {
  auto eig = hermitian_eig(cov);
  const double top = eig.eigenvalues.front();
  if (!(top > 0.0)) throw Error(ErrorKind::NonPositiveEigenvalue, "covariance has no positive eigenvalue");
  const double floor = kEigenvalueFloor * top;
  for (double& l : eig.eigenvalues) l = std::max(l, floor);
  return mdl_criterion(eig.eigenvalues, n_snapshots, variant);
}

std::size_t estimate_order(const CovarianceEstimate& cov, std::size_t n_snapshots,
                           MdlVariant variant) {
  return order_criterion(cov.sigma, n_snapshots, variant).q_hat;
}

std::string criterion_to_csv(const MdlResult& r) {
  std::string out = "k,value\n";
  char buf[64];
  for (std::size_t k = 0; k < r.criterion_values.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k, r.criterion_values[k]);
    out += buf;
  }
  return out;
}

}  // namespace mtmusic
