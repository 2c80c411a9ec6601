#pragma once

#include <string>
#include <vector>

#include "mtmusic/linalg.hpp"
#include "mtmusic/scenario.hpp"

namespace mtmusic {

inline constexpr double kSpectrumCap = 1e12;
inline constexpr double kPaperGridStepDeg = 0.0018;
inline constexpr double kDefaultGridStepDeg = 0.01;

struct PseudoSpectrum {
  std::vector<double> grid_deg;
  std::vector<double> values;
};

struct DoaSet {
  std::vector<double> angles_deg;
};

struct SmoothingConfig {
  std::size_t subarray_size = 1;
};

/// Uniform grid over [-90, 90) with the given step.
std::vector<double> angle_grid(double step_deg);

/// Eigenvectors of the p - q smallest eigenvalues, as a p x (p - q) matrix.
ComplexMatrix noise_subspace(const ComplexMatrix& cov, std::size_t q);

/// ||V^H a(theta)||^{-2} over the [-90, 90) grid, capped at kSpectrumCap.
/// The ULA is taken to have v_noise.rows() sensors at geom's spacing.
PseudoSpectrum pseudo_spectrum(const ComplexMatrix& v_noise, const UlaGeometry& geom,
                               double grid_step_deg);

/// The q largest strict local maxima, sorted by angle. Throws TooFewPeaks.
DoaSet pick_peaks(const PseudoSpectrum& spec, std::size_t q);

/// Forward/backward spatially smoothed r x r matrix (C_f + C_b) / 2.
ComplexMatrix spatial_smooth_fb(const ComplexMatrix& cov, const SmoothingConfig& cfg);

/// Average over sources of the per-source RMSE across trials, in degrees,
/// after rank-pairing each sorted estimate with the sorted truth.
double doa_rmse(const std::vector<DoaSet>& estimates, const DoaSet& truth);

/// Squared per-source errors of one estimate (rank pairing).
std::vector<double> doa_squared_errors(const DoaSet& estimate, const DoaSet& truth);

std::string spectrum_to_csv(const PseudoSpectrum& spec);

}  // namespace mtmusic
