#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mtmusic {

using cdouble = std::complex<double>;
using ComplexVector = std::vector<cdouble>;

/// Dense row-major complex matrix. `hermitian_hint` records that the producer
/// guarantees conjugate symmetry; it is advisory and never trusted blindly by
/// the eigensolver.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols, cdouble fill = {});
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cdouble> entries,
                bool hermitian_hint = false);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const double> diag);
  static ComplexMatrix column(std::span<const cdouble> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return entries_.empty(); }

  bool hermitian_hint() const noexcept { return hermitian_hint_; }
  void set_hermitian_hint(bool h) noexcept { hermitian_hint_ = h; }

  cdouble& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const cdouble& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }

  std::span<cdouble> row(std::size_t r) { return {entries_.data() + r * cols_, cols_}; }
  std::span<const cdouble> row(std::size_t r) const {
    return {entries_.data() + r * cols_, cols_};
  }
  ComplexVector col(std::size_t c) const;
  void set_col(std::size_t c, std::span<const cdouble> v);

  std::span<const cdouble> entries() const noexcept { return entries_; }
  std::span<cdouble> entries() noexcept { return entries_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix conj() const;
  ComplexMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  /// Columns [c0, c0 + nc).
  ComplexMatrix columns(std::size_t c0, std::size_t nc) const;
  cdouble trace() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cdouble s);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cdouble> entries_;
  bool hermitian_hint_ = false;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(ComplexMatrix a, cdouble s);
ComplexMatrix operator*(cdouble s, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector operator*(const ComplexMatrix& a, std::span<const cdouble> v);

/// Descending eigenvalues with eigenvectors stored column-wise in the same order.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;
};

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
/// Throws NotHermitian or NoConvergence.
EigenDecomposition hermitian_eig(const ComplexMatrix& m);

/// Largest eigenvalue of a Hermitian matrix.
double lambda_max(const ComplexMatrix& m);

/// Solves m * Y = rhs for Hermitian positive definite m. Throws NotPositiveDefinite.
ComplexMatrix solve_hpd(const ComplexMatrix& m, const ComplexMatrix& rhs);

double frob_norm(const ComplexMatrix& m);
double norm2(std::span<const cdouble> v);
double squared_norm(std::span<const cdouble> v);

/// Max |m(j,k) - conj(m(k,j))|.
double hermitian_defect(const ComplexMatrix& m);
/// (m + m^H) / 2, flagged Hermitian.
ComplexMatrix hermitian_part(const ComplexMatrix& m);

/// Applies f to the spectrum of a Hermitian matrix: V f(Λ) V^H.
ComplexMatrix hermitian_function(const ComplexMatrix& m, const std::function<double(double)>& f);

/// Lower-triangular Cholesky factor of an HPD matrix, reused for repeated
/// solves and quadratic forms x^H m^{-1} x.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const ComplexMatrix& m);

  std::size_t dim() const noexcept { return n_; }
  ComplexVector solve(std::span<const cdouble> b) const;
  /// x^H m^{-1} x, computed as ||L^{-1} x||^2.
  double inverse_quadratic_form(std::span<const cdouble> x) const;
  double log_det() const;

 private:
  std::size_t n_;
  std::vector<cdouble> lower_;
};

}  // namespace mtmusic
