#pragma once

#include <string>
#include <vector>

#include "mtmusic/estimators.hpp"

namespace mtmusic {

enum class MdlVariant {
  Standard,  ///< penalty k(2p - k) log N / 2
  Smoothed,  ///< penalty k(2r - k + 1) log N / 4, for forward/backward smoothed matrices
};

struct MdlResult {
  std::vector<double> criterion_values;  ///< indexed by k = 0 .. dim - 1
  std::size_t q_hat = 0;
};

/// Relative floor applied to eigenvalues before the logarithm.
inline constexpr double kEigenvalueFloor = 1e-14;

/// MDL over descending, strictly positive eigenvalues.
/// Throws NonPositiveEigenvalue or UnsortedEigenvalues.
MdlResult mdl_criterion(std::span<const double> eigenvalues, std::size_t n_snapshots,
                        MdlVariant variant);

/// Eigendecomposes `cov`, floors the spectrum at kEigenvalueFloor * lambda_max,
/// and minimizes the criterion.
MdlResult order_criterion(const ComplexMatrix& cov, std::size_t n_snapshots, MdlVariant variant);

std::size_t estimate_order(const CovarianceEstimate& cov, std::size_t n_snapshots,
                           MdlVariant variant);

std::string criterion_to_csv(const MdlResult& r);

}  // namespace mtmusic
