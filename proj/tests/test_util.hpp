#pragma once

// Test-only helpers. Random inputs come from std::mt19937_64 so fixtures do
// not share code with the library's own samplers, and Eigen serves as the
// independent linear-algebra oracle.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "mtmusic/linalg.hpp"

namespace testutil {

using mtmusic::cdouble;
using mtmusic::ComplexMatrix;
using EMat = Eigen::MatrixXcd;

inline EMat to_eigen(const ComplexMatrix& m) {
  EMat e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline ComplexMatrix from_eigen(const EMat& e) {
  ComplexMatrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

inline double rel_frob(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (to_eigen(a) - to_eigen(b)).norm() / to_eigen(b).norm();
}

inline double abs_frob(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (to_eigen(a) - to_eigen(b)).norm();
}

struct Rand {
  std::mt19937_64 gen;
  explicit Rand(std::uint64_t seed) : gen(seed) {}

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(gen);
  }
  cdouble cnormal(double var = 1.0) {
    const double s = std::sqrt(var / 2.0);
    return {s * normal(), s * normal()};
  }

  EMat gaussian(std::size_t r, std::size_t c) {
    EMat m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = cnormal();
    return m;
  }

  /// Haar-ish unitary from the QR of a complex Gaussian matrix.
  EMat unitary(std::size_t n) {
    Eigen::HouseholderQR<EMat> qr(gaussian(n, n));
    return qr.householderQ() * EMat::Identity(n, n);
  }

  /// Q diag(eigs) Q^H.
  ComplexMatrix hermitian_with_spectrum(const std::vector<double>& eigs) {
    const std::size_t n = eigs.size();
    const EMat q = unitary(n);
    Eigen::VectorXcd d(n);
    for (std::size_t i = 0; i < n; ++i) d(i) = eigs[i];
    EMat m = q * d.asDiagonal() * q.adjoint();
    m = (m + m.adjoint()) * 0.5;
    return from_eigen(m);
  }

  ComplexMatrix random_hpd(std::size_t n, double floor = 0.1) {
    const EMat g = gaussian(n, n);
    EMat m = g * g.adjoint() + floor * EMat::Identity(n, n);
    m = (m + m.adjoint()) * 0.5;
    return from_eigen(m);
  }

  ComplexMatrix random_psd(std::size_t n, std::size_t rank) {
    const EMat g = gaussian(n, rank);
    EMat m = g * g.adjoint();
    m = (m + m.adjoint()) * 0.5;
    return from_eigen(m);
  }

  /// p x n zero-mean proper complex normal columns with covariance sigma.
  ComplexMatrix complex_normal_batch(const ComplexMatrix& sigma, std::size_t n) {
    const std::size_t p = sigma.rows();
    Eigen::LLT<EMat> llt(to_eigen(sigma));
    const EMat l = llt.matrixL();
    const EMat z = gaussian(p, n);
    return from_eigen(l * z);
  }
};

inline std::vector<double> eigen_eigenvalues_desc(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<EMat> es(to_eigen(m));
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::reverse(v.begin(), v.end());
  return v;
}

/// Minimal XML well-formedness check: balanced tags, quoted attributes, a
/// single root element and no stray '<' or '&' in text.
inline bool xml_well_formed(const std::string& s, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  std::vector<std::string> stack;
  std::size_t i = 0, roots = 0;
  const std::size_t n = s.size();
  auto is_name = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':' || c == '.'; };
  while (i < n) {
    if (s[i] == '<') {
      if (s.compare(i, 5, "<?xml") == 0) {
        const auto e = s.find("?>", i);
        if (e == std::string::npos) return fail("unterminated declaration");
        i = e + 2;
        continue;
      }
      if (s.compare(i, 4, "<!--") == 0) {
        const auto e = s.find("-->", i);
        if (e == std::string::npos) return fail("unterminated comment");
        i = e + 3;
        continue;
      }
      const bool closing = i + 1 < n && s[i + 1] == '/';
      std::size_t j = i + (closing ? 2 : 1);
      const std::size_t name_start = j;
      while (j < n && is_name(s[j])) ++j;
      if (j == name_start) return fail("empty tag name");
      const std::string name = s.substr(name_start, j - name_start);
      bool self_close = false;
      while (j < n && s[j] != '>') {
        if (s[j] == '"' || s[j] == '\'') {
          const char q = s[j];
          const auto e = s.find(q, j + 1);
          if (e == std::string::npos) return fail("unterminated attribute");
          const std::string val = s.substr(j + 1, e - j - 1);
          if (val.find('<') != std::string::npos) return fail("'<' in attribute");
          j = e + 1;
          continue;
        }
        if (s[j] == '/' && j + 1 < n && s[j + 1] == '>') self_close = true;
        if (s[j] == '<') return fail("'<' inside tag");
        ++j;
      }
      if (j >= n) return fail("unterminated tag " + name);
      if (closing) {
        if (stack.empty() || stack.back() != name) return fail("mismatched close " + name);
        stack.pop_back();
      } else if (!self_close) {
        if (stack.empty()) ++roots;
        stack.push_back(name);
      } else if (stack.empty()) {
        ++roots;
      }
      i = j + 1;
      continue;
    }
    if (s[i] == '&') {
      const auto e = s.find(';', i);
      if (e == std::string::npos || e - i > 8) return fail("bare '&'");
      i = e + 1;
      continue;
    }
    if (stack.empty() && !std::isspace(static_cast<unsigned char>(s[i]))) return fail("text outside root");
    ++i;
  }
  if (!stack.empty()) return fail("unclosed " + stack.back());
  if (roots != 1) return fail("expected one root element");
  return true;
}

}  // namespace testutil
