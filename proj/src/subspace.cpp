#include "mtmusic/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "mtmusic/error.hpp"
#include "mtmusic/kernels.hpp"

namespace mtmusic {

std::vector<double> angle_grid(double step_deg) {
  if (!(step_deg > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid step must be positive");
  const auto count = static_cast<std::size_t>(std::llround(180.0 / step_deg));
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = -90.0 + static_cast<double>(i) * step_deg;
  while (!grid.empty() && grid.back() >= 90.0) grid.pop_back();
  return grid;
}

ComplexMatrix noise_subspace(const ComplexMatrix& cov, std::size_t q) {
  if (!cov.square() || q == 0 || q >= cov.rows()) {
    throw Error(ErrorKind::InvalidArgument, "noise_subspace needs 0 < q < p");
  }
  const auto eig = hermitian_eig(cov);
  return eig.eigenvectors.columns(q, cov.rows() - q);
}

PseudoSpectrum pseudo_spectrum(const ComplexMatrix& v_noise, const UlaGeometry& geom,
                               double grid_step_deg) {
  PseudoSpectrum spec;
  spec.grid_deg = angle_grid(grid_step_deg);
  spec.values =
      kernels::music_spectrum(v_noise, geom.spacing_wavelengths, spec.grid_deg, kSpectrumCap);
  return spec;
}

DoaSet pick_peaks(const PseudoSpectrum& spec, std::size_t q) {
  const auto& v = spec.values;
  const std::size_t n = v.size();
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = i == 0 || v[i] > v[i - 1];
    const bool right = i + 1 == n || v[i] > v[i + 1];
    if (left && right && n > 1) peaks.push_back(i);
  }
  if (peaks.size() < q) {
    throw Error(ErrorKind::TooFewPeaks, "found " + std::to_string(peaks.size()) +
                                            " local maxima, need " + std::to_string(q));
  }
  // Larger value first; equal values resolve toward the smaller angle.
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  peaks.resize(q);
  std::sort(peaks.begin(), peaks.end());
  DoaSet out;
  for (auto i : peaks) out.angles_deg.push_back(spec.grid_deg[i]);
  return out;
}

ComplexMatrix spatial_smooth_fb(const ComplexMatrix& cov, const SmoothingConfig& cfg) {
  const std::size_t p = cov.rows();
  const std::size_t r = cfg.subarray_size;
  if (!cov.square()) throw Error(ErrorKind::InvalidArgument, "smoothing needs a square matrix");
  if (r < 1 || r > p) throw Error(ErrorKind::BadSubarraySize, "subarray size out of [1, p]");
  const std::size_t num_sub = p - r + 1;

  ComplexMatrix forward(r, r), backward(r, r);
  for (std::size_t l = 0; l < num_sub; ++l) {
    for (std::size_t j = 0; j < r; ++j) {
      for (std::size_t k = 0; k < r; ++k) {
        forward(j, k) += cov(l + j, l + k);
        // 1-based [p-l-j+2, p-l-k+2] becomes 0-based [p-1-l-j, p-1-l-k].
        backward(j, k) += std::conj(cov(p - 1 - l - j, p - 1 - l - k));
      }
    }
  }
  const double scale = 0.5 / static_cast<double>(num_sub);
  ComplexMatrix out(r, r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t k = 0; k < r; ++k) out(j, k) = scale * (forward(j, k) + backward(j, k));
  return hermitian_part(out);
}

std::vector<double> doa_squared_errors(const DoaSet& estimate, const DoaSet& truth) {
  if (estimate.angles_deg.size() != truth.angles_deg.size()) {
    throw Error(ErrorKind::CardinalityMismatch, "estimate and truth sizes differ");
  }
  auto est = estimate.angles_deg;
  auto tru = truth.angles_deg;
  std::sort(est.begin(), est.end());
  std::sort(tru.begin(), tru.end());
  std::vector<double> out(tru.size());
  for (std::size_t k = 0; k < tru.size(); ++k) out[k] = (est[k] - tru[k]) * (est[k] - tru[k]);
  return out;
}

double doa_rmse(const std::vector<DoaSet>& estimates, const DoaSet& truth) {
  const std::size_t q = truth.angles_deg.size();
  if (estimates.empty() || q == 0) {
    throw Error(ErrorKind::CardinalityMismatch, "doa_rmse needs estimates and truth");
  }
  std::vector<double> sums(q, 0.0);
  for (const auto& e : estimates) {
    const auto sq = doa_squared_errors(e, truth);
    for (std::size_t k = 0; k < q; ++k) sums[k] += sq[k];
  }
  double avg = 0.0;
  for (double s : sums) avg += std::sqrt(s / static_cast<double>(estimates.size()));
  return avg / static_cast<double>(q);
}

std::string spectrum_to_csv(const PseudoSpectrum& spec) {
  std::string out = "angle_deg,value\n";
  char buf[64];
  for (std::size_t i = 0; i < spec.grid_deg.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f,%.17g\n", spec.grid_deg[i], spec.values[i]);
    out += buf;
  }
  return out;
}

}  // namespace mtmusic
