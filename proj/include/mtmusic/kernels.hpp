#pragma once

// Data-parallel inner loops. Each kernel has a plain serial reference used by
// the tests and the benchmark; the OpenMP versions assign every output element
// to exactly one thread and accumulate it in the same order as the reference,
// so results are bitwise identical for any thread count.

#include <span>
#include <vector>

#include "mtmusic/linalg.hpp"

namespace mtmusic::kernels {

/// sum_n w_n (x_n - c)(x_n - c)^H over the columns of the p x N matrix x.
ComplexMatrix weighted_scatter(const ComplexMatrix& x, std::span<const double> weights,
                               std::span<const cdouble> center);
ComplexMatrix weighted_scatter_serial(const ComplexMatrix& x, std::span<const double> weights,
                                      std::span<const cdouble> center);

/// ||x_n||^2 for every column.
std::vector<double> column_sq_norms(const ComplexMatrix& x);
std::vector<double> column_sq_norms_serial(const ComplexMatrix& x);

/// ||V^H a(theta)||^{-2} on a grid for a ULA with `spacing` in wavelengths,
/// capped at `cap` where the projection vanishes.
std::vector<double> music_spectrum(const ComplexMatrix& v_noise, double spacing,
                                   std::span<const double> grid_deg, double cap);
std::vector<double> music_spectrum_serial(const ComplexMatrix& v_noise, double spacing,
                                          std::span<const double> grid_deg, double cap);

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();

}  // namespace mtmusic::kernels
