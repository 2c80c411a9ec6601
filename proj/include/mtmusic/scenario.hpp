#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mtmusic/linalg.hpp"
#include "mtmusic/rng.hpp"

namespace mtmusic {

struct UlaGeometry {
  std::size_t num_sensors = 16;
  double spacing_wavelengths = 0.5;
};

struct NonCoherentSources {
  /// Per-source powers; empty means "all equal", filled in from the GSNR.
  std::vector<double> powers;
};

struct CoherentSources {
  std::vector<cdouble> attenuations;
  double base_power = 1.0;
};

struct SourceConfig {
  std::vector<double> doas_deg;
  std::variant<NonCoherentSources, CoherentSources> mode = NonCoherentSources{};

  std::size_t count() const noexcept { return doas_deg.size(); }
  bool coherent() const noexcept { return std::holds_alternative<CoherentSources>(mode); }
  void validate(std::size_t num_sensors) const;
};

enum class NoiseFamily { Gaussian, Cauchy, KDist, IGTexture };

struct NoiseConfig {
  NoiseFamily family = NoiseFamily::Gaussian;
  /// K-distribution shape nu or inverse-Gaussian shape lambda; unused otherwise.
  double shape = 1.0;
  double dispersion = 1.0;

  void validate() const;
};

std::string to_string(NoiseFamily f);
NoiseFamily noise_family_from_string(const std::string& s);

struct SnapshotBatch {
  ComplexMatrix x;  ///< p x N, one snapshot per column
  SourceConfig truth;
  NoiseConfig noise;
  double gsnr_db = 0.0;
  std::uint64_t seed = 0;

  std::size_t sensors() const noexcept { return x.rows(); }
  std::size_t snapshots() const noexcept { return x.cols(); }
};

/// Wraps raw data (no scenario metadata) as a batch.
SnapshotBatch make_batch(ComplexMatrix x);

ComplexVector steering_vector(const UlaGeometry& geom, double doa_deg);
ComplexMatrix steering_matrix(const UlaGeometry& geom, const std::vector<double>& doas_deg);

/// q x N source waveforms: unit-power 4-QAM symbols scaled per source, or
/// xi * s(n) replicas of one 4-QAM waveform in coherent mode.
ComplexMatrix sample_sources(const SourceConfig& cfg, std::size_t n_snapshots, CounterRng& rng);

/// Per-snapshot compound-Gaussian noise sqrt(texture) * zeta with
/// zeta ~ CN(0, dispersion * I) and E[texture] = 1 (Cauchy excepted).
ComplexMatrix sample_noise(const NoiseConfig& cfg, std::size_t p, std::size_t n_snapshots,
                           CounterRng& texture_rng, CounterRng& speckle_rng);

/// Texture draws only; exposed for tests.
std::vector<double> sample_textures(const NoiseConfig& cfg, std::size_t n, CounterRng& rng);

/// Signal powers chosen so that 10 log10(mean power / dispersion) == gsnr_db.
SourceConfig scale_sources_to_gsnr(const SourceConfig& sources, const NoiseConfig& noise,
                                   double gsnr_db);

SnapshotBatch synthesize_snapshots(const UlaGeometry& geom, const SourceConfig& sources,
                                   const NoiseConfig& noise, double gsnr_db,
                                   std::size_t n_snapshots, std::uint64_t seed);

/// Exact population covariance A R_s A^H + dispersion I for Gaussian noise
/// (used as an analytic oracle by tests and the CLI).
ComplexMatrix analytic_covariance(const UlaGeometry& geom, const SourceConfig& sources,
                                  double noise_power);

// Low-level samplers, deterministic given the generator.
namespace sampling {
double standard_normal(CounterRng& rng);
cdouble complex_normal(CounterRng& rng, double variance);
double gamma(CounterRng& rng, double shape, double scale);
double chi_square_1(CounterRng& rng);
double inverse_gaussian(CounterRng& rng, double mean, double shape);
}  // namespace sampling

}  // namespace mtmusic
