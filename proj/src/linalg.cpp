#include "mtmusic/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mtmusic/error.hpp"

namespace mtmusic {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::InvalidShape: return "InvalidShape";
    case ErrorKind::DegenerateWeights: return "DegenerateWeights";
    case ErrorKind::NonFiniteIterate: return "NonFiniteIterate";
    case ErrorKind::TauTooSmall: return "TauTooSmall";
    case ErrorKind::SingularIterate: return "SingularIterate";
    case ErrorKind::TooFewPeaks: return "TooFewPeaks";
    case ErrorKind::BadSubarraySize: return "BadSubarraySize";
    case ErrorKind::CardinalityMismatch: return "CardinalityMismatch";
    case ErrorKind::NonPositiveEigenvalue: return "NonPositiveEigenvalue";
    case ErrorKind::UnsortedEigenvalues: return "UnsortedEigenvalues";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::UnknownEstimator: return "UnknownEstimator";
    case ErrorKind::UnknownPreset: return "UnknownPreset";
    case ErrorKind::EmptyReport: return "EmptyReport";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, cdouble fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cdouble> entries,
                             bool hermitian_hint)
    : rows_(rows), cols_(cols), entries_(std::move(entries)), hermitian_hint_(hermitian_hint) {
  if (entries_.size() != rows_ * cols_) {
    throw Error(ErrorKind::InvalidArgument, "entry count does not match matrix shape");
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  m.hermitian_hint_ = true;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  m.hermitian_hint_ = true;
  return m;
}

ComplexMatrix ComplexMatrix::column(std::span<const cdouble> v) {
  return ComplexMatrix(v.size(), 1, std::vector<cdouble>(v.begin(), v.end()));
}

ComplexVector ComplexMatrix::col(std::size_t c) const {
  ComplexVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

void ComplexMatrix::set_col(std::size_t c, std::span<const cdouble> v) {
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = std::conj((*this)(r, c));
  t.hermitian_hint_ = hermitian_hint_;
  return t;
}

ComplexMatrix ComplexMatrix::conj() const {
  ComplexMatrix t = *this;
  for (auto& e : t.entries_) e = std::conj(e);
  return t;
}

ComplexMatrix ComplexMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr,
                                   std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) {
    throw Error(ErrorKind::InvalidArgument, "block out of range");
  }
  ComplexMatrix b(nr, nc);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) b(r, c) = (*this)(r0 + r, c0 + c);
  return b;
}

ComplexMatrix ComplexMatrix::columns(std::size_t c0, std::size_t nc) const {
  return block(0, c0, rows_, nc);
}

cdouble ComplexMatrix::trace() const {
  cdouble t{};
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) {
    throw Error(ErrorKind::InvalidArgument, "shape mismatch in +=");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
  hermitian_hint_ = hermitian_hint_ && o.hermitian_hint_;
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) {
    throw Error(ErrorKind::InvalidArgument, "shape mismatch in -=");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
  hermitian_hint_ = hermitian_hint_ && o.hermitian_hint_;
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cdouble s) {
  for (auto& e : entries_) e *= s;
  hermitian_hint_ = hermitian_hint_ && s.imag() == 0.0;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(ComplexMatrix a, cdouble s) { return a *= s; }
ComplexMatrix operator*(cdouble s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::InvalidArgument, "shape mismatch in *");
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto crow = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cdouble aik = a(i, k);
      if (aik == cdouble{}) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

ComplexVector operator*(const ComplexMatrix& a, std::span<const cdouble> v) {
  if (a.cols() != v.size()) throw Error(ErrorKind::InvalidArgument, "shape mismatch in m*v");
  ComplexVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto arow = a.row(i);
    cdouble s{};
    for (std::size_t k = 0; k < v.size(); ++k) s += arow[k] * v[k];
    out[i] = s;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Norms and Hermitian helpers

double squared_norm(std::span<const cdouble> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

double norm2(std::span<const cdouble> v) {
  // Scaled so tiny or huge entries neither underflow nor overflow.
  double scale = 0.0;
  for (const auto& z : v) scale = std::max({scale, std::abs(z.real()), std::abs(z.imag())});
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z / scale);
  return scale * std::sqrt(s);
}

double frob_norm(const ComplexMatrix& m) { return norm2(m.entries()); }

double hermitian_defect(const ComplexMatrix& m) {
  if (!m.square()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t j = 0; j < m.rows(); ++j)
    for (std::size_t k = j; k < m.cols(); ++k)
      worst = std::max(worst, std::abs(m(j, k) - std::conj(m(k, j))));
  return worst;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  if (!m.square()) throw Error(ErrorKind::NotHermitian, "matrix is not square");
  ComplexMatrix h(m.rows(), m.cols());
  for (std::size_t j = 0; j < m.rows(); ++j) {
    h(j, j) = m(j, j).real();
    for (std::size_t k = j + 1; k < m.cols(); ++k) {
      const cdouble v = 0.5 * (m(j, k) + std::conj(m(k, j)));
      h(j, k) = v;
      h(k, j) = std::conj(v);
    }
  }
  h.set_hermitian_hint(true);
  return h;
}

// ---------------------------------------------------------------------------
// Jacobi eigensolver

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalTol = 1e-12;
constexpr double kHermitianTol = 1e-10;

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.rows(); ++j)
    for (std::size_t k = 0; k < a.cols(); ++k)
      if (j != k) s += std::norm(a(j, k));
  return std::sqrt(s);
}

// Annihilates a(p,q) with the unitary J = diag(1, e^{-i phi}) * R(theta), where
// phi = arg a(p,q) and R is the real Jacobi rotation of the resulting real block.
void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const cdouble b = a(p, q);
  const double mag = std::abs(b);
  if (mag == 0.0) return;
  const cdouble phase = b / mag;  // e^{i phi}
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();

  const double theta = (aqq - app) / (2.0 * mag);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const cdouble phase_conj = std::conj(phase);

  // J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] acting on coordinates (p, q).
  const cdouble jpp = c;
  const cdouble jpq = s;
  const cdouble jqp = -s * phase_conj;
  const cdouble jqq = c * phase_conj;
  const std::size_t n = a.rows();

  // A <- A J
  for (std::size_t k = 0; k < n; ++k) {
    const cdouble akp = a(k, p);
    const cdouble akq = a(k, q);
    a(k, p) = akp * jpp + akq * jqp;
    a(k, q) = akp * jpq + akq * jqq;
  }
  // A <- J^H A
  for (std::size_t k = 0; k < n; ++k) {
    const cdouble apk = a(p, k);
    const cdouble aqk = a(q, k);
    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = app - t * mag;
  a(q, q) = aqq + t * mag;
  // V <- V J
  for (std::size_t k = 0; k < n; ++k) {
    const cdouble vkp = v(k, p);
    const cdouble vkq = v(k, q);
    v(k, p) = vkp * jpp + vkq * jqp;
    v(k, q) = vkp * jpq + vkq * jqq;
  }
}

}  // namespace

EigenDecomposition hermitian_eig(const ComplexMatrix& m) {
  if (!m.square() || m.rows() == 0) {
    throw Error(ErrorKind::NotHermitian, "eigendecomposition needs a non-empty square matrix");
  }
  const double scale = std::max(1.0, frob_norm(m));
  if (!std::isfinite(scale)) throw Error(ErrorKind::NotHermitian, "matrix has non-finite entries");
  if (hermitian_defect(m) > kHermitianTol * scale) {
    throw Error(ErrorKind::NotHermitian, "conjugate symmetry check failed");
  }

  const std::size_t n = m.rows();
  ComplexMatrix a = hermitian_part(m);
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double total = frob_norm(a);

  bool converged = total == 0.0 || n == 1;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    if (off_diagonal_norm(a) <= kOffDiagonalTol * total) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
  }
  if (!converged && off_diagonal_norm(a) > kOffDiagonalTol * total) {
    throw Error(ErrorKind::NoConvergence, "Jacobi sweep cap reached");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() > a(j, j).real();
  });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

double lambda_max(const ComplexMatrix& m) { return hermitian_eig(m).eigenvalues.front(); }

ComplexMatrix hermitian_function(const ComplexMatrix& m,
                                 const std::function<double(double)>& f) {
  const auto eig = hermitian_eig(m);
  const std::size_t n = m.rows();
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(eig.eigenvalues[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const cdouble vik = eig.eigenvectors(i, k) * fk;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(eig.eigenvectors(j, k));
    }
  }
  return hermitian_part(out);
}

// ---------------------------------------------------------------------------
// Cholesky

CholeskyFactor::CholeskyFactor(const ComplexMatrix& m) : n_(m.rows()), lower_(n_ * n_) {
  if (!m.square() || n_ == 0) {
    throw Error(ErrorKind::NotPositiveDefinite, "Cholesky needs a non-empty square matrix");
  }
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n_; ++i) max_diag = std::max(max_diag, m(i, i).real());
  // Pivots below this floor mean the condition number is beyond ~1e12.
  const double floor = 1e-12 * max_diag;
  if (!(max_diag > 0.0) || !std::isfinite(max_diag)) {
    throw Error(ErrorKind::NotPositiveDefinite, "non-positive diagonal");
  }

  auto L = [&](std::size_t i, std::size_t j) -> cdouble& { return lower_[i * n_ + j]; };
  for (std::size_t j = 0; j < n_; ++j) {
    double d = m(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(L(j, k));
    if (!(d > floor)) throw Error(ErrorKind::NotPositiveDefinite, "pivot check failed");
    const double ljj = std::sqrt(d);
    L(j, j) = ljj;
    for (std::size_t i = j + 1; i < n_; ++i) {
      cdouble s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * std::conj(L(j, k));
      L(i, j) = s / ljj;
    }
  }
}

ComplexVector CholeskyFactor::solve(std::span<const cdouble> b) const {
  if (b.size() != n_) throw Error(ErrorKind::InvalidArgument, "rhs length mismatch");
  ComplexVector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= lower_[i * n_ + k] * y[k];
    y[i] /= lower_[i * n_ + i];
  }
  for (std::size_t ii = n_; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < n_; ++k) y[ii] -= std::conj(lower_[k * n_ + ii]) * y[k];
    y[ii] /= lower_[ii * n_ + ii];
  }
  return y;
}

double CholeskyFactor::inverse_quadratic_form(std::span<const cdouble> x) const {
  // Forward substitution only; the quadratic form is the squared norm of L^{-1} x.
  double acc = 0.0;
  cdouble buf[64];
  std::vector<cdouble> heap;
  cdouble* z = buf;
  if (n_ > 64) {
    heap.resize(n_);
    z = heap.data();
  }
  for (std::size_t i = 0; i < n_; ++i) {
    cdouble s = x[i];
    const cdouble* li = lower_.data() + i * n_;
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * z[k];
    z[i] = s / li[i].real();
    acc += std::norm(z[i]);
  }
  return acc;
}

double CholeskyFactor::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += 2.0 * std::log(lower_[i * n_ + i].real());
  return s;
}

ComplexMatrix solve_hpd(const ComplexMatrix& m, const ComplexMatrix& rhs) {
  if (rhs.rows() != m.rows()) throw Error(ErrorKind::InvalidArgument, "rhs rows mismatch");
  const CholeskyFactor chol(m);
  ComplexMatrix y(rhs.rows(), rhs.cols());
  for (std::size_t c = 0; c < rhs.cols(); ++c) {
    const auto col = rhs.col(c);
    y.set_col(c, chol.solve(col));
  }
  return y;
}

}  // namespace mtmusic
