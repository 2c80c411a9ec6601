#include "mtmusic/kernels.hpp"

#include <cmath>
#include <numbers>

#include "mtmusic/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mtmusic::kernels {

namespace {

void check_scatter_args(const ComplexMatrix& x, std::span<const double> weights,
                        std::span<const cdouble> center) {
  if (weights.size() != x.cols() || center.size() != x.rows()) {
    throw Error(ErrorKind::InvalidArgument, "weighted_scatter: shape mismatch");
  }
}

void mirror_upper(ComplexMatrix& s) {
  for (std::size_t j = 0; j < s.rows(); ++j) {
    s(j, j) = s(j, j).real();
    for (std::size_t k = j + 1; k < s.cols(); ++k) s(k, j) = std::conj(s(j, k));
  }
  s.set_hermitian_hint(true);
}

// Steering phase step e^{-i 2 pi d sin(theta)} and projection of one grid angle.
double projection_energy(const ComplexMatrix& vh, double spacing, double theta_deg,
                         cdouble* a) {
  const std::size_t p = vh.cols();
  const double phase = -2.0 * std::numbers::pi * spacing * std::sin(theta_deg * std::numbers::pi / 180.0);
  const cdouble step = std::polar(1.0, phase);
  a[0] = 1.0;
  for (std::size_t m = 1; m < p; ++m) a[m] = a[m - 1] * step;
  double energy = 0.0;
  for (std::size_t c = 0; c < vh.rows(); ++c) {
    const auto row = vh.row(c);
    cdouble s{};
    for (std::size_t m = 0; m < p; ++m) s += row[m] * a[m];
    energy += std::norm(s);
  }
  return energy;
}

double cap_inverse(double energy, double cap) {
  if (!(energy > 1.0 / cap)) return cap;
  return 1.0 / energy;
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

ComplexMatrix weighted_scatter_serial(const ComplexMatrix& x, std::span<const double> weights,
                                      std::span<const cdouble> center) {
  check_scatter_args(x, weights, center);
  const std::size_t p = x.rows();
  ComplexMatrix s(p, p);
  ComplexVector y(p);
  for (std::size_t n = 0; n < x.cols(); ++n) {
    for (std::size_t j = 0; j < p; ++j) y[j] = x(j, n) - center[j];
    const double w = weights[n];
    for (std::size_t j = 0; j < p; ++j) {
      const cdouble wy = w * y[j];
      for (std::size_t k = j; k < p; ++k) s(j, k) += wy * std::conj(y[k]);
    }
  }
  mirror_upper(s);
  return s;
}

ComplexMatrix weighted_scatter(const ComplexMatrix& x, std::span<const double> weights,
                               std::span<const cdouble> center) {
  check_scatter_args(x, weights, center);
  const std::size_t p = x.rows();
  const std::size_t n_snap = x.cols();

  // Centered rows, stored sensor-major so each entry is a contiguous dot product.
  ComplexMatrix y(p, n_snap);
  for (std::size_t j = 0; j < p; ++j) {
    const auto xr = x.row(j);
    auto yr = y.row(j);
    for (std::size_t n = 0; n < n_snap; ++n) yr[n] = xr[n] - center[j];
  }

  const std::size_t pairs = p * (p + 1) / 2;
  std::vector<std::size_t> pj(pairs), pk(pairs);
  for (std::size_t j = 0, idx = 0; j < p; ++j)
    for (std::size_t k = j; k < p; ++k, ++idx) {
      pj[idx] = j;
      pk[idx] = k;
    }

  ComplexMatrix s(p, p);
  const long long npairs = static_cast<long long>(pairs);
#pragma omp parallel for schedule(static) if (pairs * n_snap > 65536)
  for (long long idx = 0; idx < npairs; ++idx) {
    const auto yj = y.row(pj[idx]);
    const auto yk = y.row(pk[idx]);
    cdouble acc{};
    for (std::size_t n = 0; n < n_snap; ++n) acc += (weights[n] * yj[n]) * std::conj(yk[n]);
    s(pj[idx], pk[idx]) = acc;
  }
  mirror_upper(s);
  return s;
}

std::vector<double> column_sq_norms_serial(const ComplexMatrix& x) {
  std::vector<double> out(x.cols(), 0.0);
  for (std::size_t n = 0; n < x.cols(); ++n)
    for (std::size_t j = 0; j < x.rows(); ++j) out[n] += std::norm(x(j, n));
  return out;
}

std::vector<double> column_sq_norms(const ComplexMatrix& x) {
  const std::size_t n_snap = x.cols();
  std::vector<double> out(n_snap, 0.0);
  const long long nn = static_cast<long long>(n_snap);
#pragma omp parallel for schedule(static) if (n_snap * x.rows() > 65536)
  for (long long n = 0; n < nn; ++n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < x.rows(); ++j) acc += std::norm(x(j, static_cast<std::size_t>(n)));
    out[static_cast<std::size_t>(n)] = acc;
  }
  return out;
}

std::vector<double> music_spectrum_serial(const ComplexMatrix& v_noise, double spacing,
                                          std::span<const double> grid_deg, double cap) {
  const ComplexMatrix vh = v_noise.adjoint();
  std::vector<double> out(grid_deg.size());
  ComplexVector a(v_noise.rows());
  for (std::size_t i = 0; i < grid_deg.size(); ++i)
    out[i] = cap_inverse(projection_energy(vh, spacing, grid_deg[i], a.data()), cap);
  return out;
}

std::vector<double> music_spectrum(const ComplexMatrix& v_noise, double spacing,
                                   std::span<const double> grid_deg, double cap) {
  const ComplexMatrix vh = v_noise.adjoint();
  std::vector<double> out(grid_deg.size());
  const long long ng = static_cast<long long>(grid_deg.size());
#pragma omp parallel if (grid_deg.size() > 2048)
  {
    ComplexVector a(v_noise.rows());
#pragma omp for schedule(static)
    for (long long i = 0; i < ng; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      out[ui] = cap_inverse(projection_energy(vh, spacing, grid_deg[ui], a.data()), cap);
    }
  }
  return out;
}

}  // namespace mtmusic::kernels
