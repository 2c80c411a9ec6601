#include <doctest.h>

#include <cstring>

#include "mtmusic/kernels.hpp"
#include "mtmusic/subspace.hpp"
#include "test_util.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace mtmusic;
using testutil::Rand;

namespace {

bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool bitwise_equal(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.entries().data(), b.entries().data(), a.entries().size() * sizeof(cdouble)) == 0;
}

template <class F>
void for_thread_counts(F&& f) {
#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  for (int t : {1, 2, 4}) {
    omp_set_num_threads(t);
    f();
  }
  omp_set_num_threads(saved);
#else
  f();
#endif
}

}  // namespace

TEST_CASE("weighted_scatter: parallel is bitwise equal to serial") {
  Rand r(21);
  const auto x = testutil::from_eigen(r.gaussian(16, 1500));
  std::vector<double> w(1500);
  for (auto& v : w) v = r.uniform(0.0, 1.0);
  ComplexVector c(16);
  for (auto& v : c) v = r.cnormal(0.1);
  const auto ref = kernels::weighted_scatter_serial(x, w, c);
  for_thread_counts([&] { CHECK(bitwise_equal(kernels::weighted_scatter(x, w, c), ref)); });
}

TEST_CASE("weighted_scatter: matches a direct Eigen computation") {
  Rand r(22);
  const auto x = testutil::from_eigen(r.gaussian(5, 200));
  std::vector<double> w(200, 1.0 / 200.0);
  const ComplexVector c(5);
  const auto s = kernels::weighted_scatter(x, w, c);
  const auto ex = testutil::to_eigen(x);
  const testutil::EMat ref = ex * ex.adjoint() / 200.0;
  CHECK((testutil::to_eigen(s) - ref).norm() < 1e-12);
  CHECK(hermitian_defect(s) == 0.0);
}

TEST_CASE("column_sq_norms: parallel is bitwise equal to serial") {
  Rand r(23);
  const auto x = testutil::from_eigen(r.gaussian(7, 3001));
  const auto ref = kernels::column_sq_norms_serial(x);
  for_thread_counts([&] { CHECK(bitwise_equal(kernels::column_sq_norms(x), ref)); });
}

TEST_CASE("music_spectrum: parallel is bitwise equal to serial") {
  Rand r(24);
  const auto q = r.unitary(16);
  const auto v = testutil::from_eigen(q.rightCols(11));
  const auto grid = angle_grid(0.01);
  const auto ref = kernels::music_spectrum_serial(v, 0.5, grid, kSpectrumCap);
  for_thread_counts([&] { CHECK(bitwise_equal(kernels::music_spectrum(v, 0.5, grid, kSpectrumCap), ref)); });
}

TEST_CASE("music_spectrum: recurrence matches direct steering evaluation") {
  Rand r(25);
  const auto v = testutil::from_eigen(r.unitary(8).rightCols(5));
  const std::vector<double> grid = {-89.5, -30.0, 0.0, 12.34, 77.7};
  const auto vals = kernels::music_spectrum(v, 0.5, grid, kSpectrumCap);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto a = steering_vector(UlaGeometry{8, 0.5}, grid[g]);
    double acc = 0.0;
    for (std::size_t k = 0; k < v.cols(); ++k) {
      cdouble d{};
      for (std::size_t m = 0; m < 8; ++m) d += std::conj(v(m, k)) * a[m];
      acc += std::norm(d);
    }
    CHECK(vals[g] == doctest::Approx(1.0 / acc).epsilon(1e-9));
  }
}
