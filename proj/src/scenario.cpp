#include "mtmusic/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mtmusic/error.hpp"

namespace mtmusic {

namespace sampling {

// Box-Muller on two fresh uniforms; one output per call keeps draws a pure
// function of the stream position.
double standard_normal(CounterRng& rng) {
  const double u1 = rng.uniform_open();
  const double u2 = rng.uniform_open();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

cdouble complex_normal(CounterRng& rng, double variance) {
  const double s = std::sqrt(0.5 * variance);
  const double re = standard_normal(rng);
  const double im = standard_normal(rng);
  return {s * re, s * im};
}

// Marsaglia-Tsang; shapes below one use the Gamma(a+1) * U^{1/a} boost.
double gamma(CounterRng& rng, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw Error(ErrorKind::InvalidShape, "gamma shape and scale must be positive");
  }
  if (shape < 1.0) {
    const double u = rng.uniform_open();
    return gamma(rng, shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

double chi_square_1(CounterRng& rng) {
  const double z = standard_normal(rng);
  return z * z;
}

// Michael, Schucany & Haas transformation with one normal and one uniform.
double inverse_gaussian(CounterRng& rng, double mean, double shape) {
  if (!(mean > 0.0) || !(shape > 0.0)) {
    throw Error(ErrorKind::InvalidShape, "inverse-Gaussian mean and shape must be positive");
  }
  const double nu = standard_normal(rng);
  const double b = mean * nu * nu / (2.0 * shape);
  // Smaller root mean * (1 + b - sqrt(b^2 + 2b)), rationalized to avoid cancellation.
  const double small = mean / (1.0 + b + std::sqrt(b * b + 2.0 * b));
  const double u = rng.uniform_open();
  if (u <= mean / (mean + small)) return small;
  return mean * mean / small;
}

}  // namespace sampling

void SourceConfig::validate(std::size_t num_sensors) const {
  const std::size_t q = doas_deg.size();
  if (q == 0) return;
  if (q >= num_sensors) {
    throw Error(ErrorKind::InvalidArgument, "number of sources must be below sensor count");
  }
  for (std::size_t k = 0; k < q; ++k) {
    if (!(doas_deg[k] >= -90.0 && doas_deg[k] < 90.0)) {
      throw Error(ErrorKind::InvalidArgument, "DOA outside [-90, 90)");
    }
    if (k > 0 && !(doas_deg[k] > doas_deg[k - 1])) {
      throw Error(ErrorKind::InvalidArgument, "DOAs must be sorted and distinct");
    }
  }
  if (const auto* c = std::get_if<CoherentSources>(&mode)) {
    if (c->attenuations.size() != q) {
      throw Error(ErrorKind::InvalidArgument, "attenuation count must equal source count");
    }
    for (const auto& xi : c->attenuations) {
      if (xi == cdouble{}) throw Error(ErrorKind::InvalidArgument, "zero attenuation");
    }
  } else {
    const auto& nc = std::get<NonCoherentSources>(mode);
    if (!nc.powers.empty() && nc.powers.size() != q) {
      throw Error(ErrorKind::InvalidArgument, "power count must equal source count");
    }
  }
}

void NoiseConfig::validate() const {
  if (!(dispersion > 0.0) || !std::isfinite(dispersion)) {
    throw Error(ErrorKind::InvalidArgument, "noise dispersion must be positive");
  }
  if ((family == NoiseFamily::KDist || family == NoiseFamily::IGTexture) && !(shape > 0.0)) {
    throw Error(ErrorKind::InvalidShape, "texture shape must be positive");
  }
}

std::string to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::Gaussian: return "gaussian";
    case NoiseFamily::Cauchy: return "cauchy";
    case NoiseFamily::KDist: return "kdist";
    case NoiseFamily::IGTexture: return "ig";
  }
  return "gaussian";
}

NoiseFamily noise_family_from_string(const std::string& s) {
  if (s == "gaussian") return NoiseFamily::Gaussian;
  if (s == "cauchy") return NoiseFamily::Cauchy;
  if (s == "kdist" || s == "k") return NoiseFamily::KDist;
  if (s == "ig" || s == "ig-texture") return NoiseFamily::IGTexture;
  throw Error(ErrorKind::SchemaError, "unknown noise family '" + s + "'");
}

SnapshotBatch make_batch(ComplexMatrix x) {
  SnapshotBatch b;
  b.x = std::move(x);
  return b;
}

ComplexVector steering_vector(const UlaGeometry& geom, double doa_deg) {
  const double phase =
      -2.0 * std::numbers::pi * geom.spacing_wavelengths * std::sin(doa_deg * std::numbers::pi / 180.0);
  ComplexVector a(geom.num_sensors);
  for (std::size_t m = 0; m < a.size(); ++m) a[m] = std::polar(1.0, phase * static_cast<double>(m));
  return a;
}

ComplexMatrix steering_matrix(const UlaGeometry& geom, const std::vector<double>& doas_deg) {
  ComplexMatrix a(geom.num_sensors, doas_deg.size());
  for (std::size_t k = 0; k < doas_deg.size(); ++k) a.set_col(k, steering_vector(geom, doas_deg[k]));
  return a;
}

namespace {

cdouble qam4_symbol(CounterRng& rng) {
  const std::uint64_t bits = rng();
  const double re = (bits & 1U) ? 1.0 : -1.0;
  const double im = (bits & 2U) ? 1.0 : -1.0;
  return cdouble(re, im) * (1.0 / std::numbers::sqrt2);
}

}  // namespace

ComplexMatrix sample_sources(const SourceConfig& cfg, std::size_t n_snapshots, CounterRng& rng) {
  if (n_snapshots == 0) throw Error(ErrorKind::InvalidArgument, "need at least one snapshot");
  const std::size_t q = cfg.count();
  ComplexMatrix s(q, n_snapshots);
  if (const auto* c = std::get_if<CoherentSources>(&cfg.mode)) {
    const double amp = std::sqrt(c->base_power);
    for (std::size_t n = 0; n < n_snapshots; ++n) {
      const cdouble sym = amp * qam4_symbol(rng);
      for (std::size_t k = 0; k < q; ++k) s(k, n) = c->attenuations[k] * sym;
    }
    return s;
  }
  const auto& nc = std::get<NonCoherentSources>(cfg.mode);
  std::vector<double> amps(q, 1.0);
  for (std::size_t k = 0; k < q && !nc.powers.empty(); ++k) amps[k] = std::sqrt(nc.powers[k]);
  for (std::size_t n = 0; n < n_snapshots; ++n)
    for (std::size_t k = 0; k < q; ++k) s(k, n) = amps[k] * qam4_symbol(rng);
  return s;
}

std::vector<double> sample_textures(const NoiseConfig& cfg, std::size_t n, CounterRng& rng) {
  cfg.validate();
  std::vector<double> tex(n, 1.0);
  switch (cfg.family) {
    case NoiseFamily::Gaussian:
      break;
    case NoiseFamily::Cauchy:
      // Complex t with one degree of freedom.
      for (auto& t : tex) t = 1.0 / sampling::chi_square_1(rng);
      break;
    case NoiseFamily::KDist:
      for (auto& t : tex) t = sampling::gamma(rng, cfg.shape, 1.0 / cfg.shape);
      break;
    case NoiseFamily::IGTexture:
      for (auto& t : tex) t = sampling::inverse_gaussian(rng, 1.0, cfg.shape);
      break;
  }
  return tex;
}

ComplexMatrix sample_noise(const NoiseConfig& cfg, std::size_t p, std::size_t n_snapshots,
                           CounterRng& texture_rng, CounterRng& speckle_rng) {
  if (n_snapshots == 0) throw Error(ErrorKind::InvalidArgument, "need at least one snapshot");
  const auto tex = sample_textures(cfg, n_snapshots, texture_rng);
  ComplexMatrix w(p, n_snapshots);
  for (std::size_t n = 0; n < n_snapshots; ++n) {
    const double g = std::sqrt(tex[n]);
    for (std::size_t k = 0; k < p; ++k) w(k, n) = g * sampling::complex_normal(speckle_rng, cfg.dispersion);
  }
  return w;
}

SourceConfig scale_sources_to_gsnr(const SourceConfig& sources, const NoiseConfig& noise,
                                   double gsnr_db) {
  SourceConfig out = sources;
  const double target = noise.dispersion * std::pow(10.0, gsnr_db / 10.0);
  const std::size_t q = sources.count();
  if (q == 0) return out;
  if (auto* c = std::get_if<CoherentSources>(&out.mode)) {
    // Received power of source k is |xi_k|^2 * base_power.
    double mean_gain = 0.0;
    for (const auto& xi : c->attenuations) mean_gain += std::norm(xi);
    mean_gain /= static_cast<double>(q);
    c->base_power = target / mean_gain;
  } else {
    auto& nc = std::get<NonCoherentSources>(out.mode);
    if (nc.powers.empty()) {
      nc.powers.assign(q, target);
    } else {
      double mean = 0.0;
      for (double p : nc.powers) mean += p;
      mean /= static_cast<double>(q);
      for (double& p : nc.powers) p *= target / mean;
    }
  }
  return out;
}

SnapshotBatch synthesize_snapshots(const UlaGeometry& geom, const SourceConfig& sources,
                                   const NoiseConfig& noise, double gsnr_db,
                                   std::size_t n_snapshots, std::uint64_t seed) {
  if (geom.num_sensors < 2 || !(geom.spacing_wavelengths > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "ULA needs at least two sensors and positive spacing");
  }
  noise.validate();
  sources.validate(geom.num_sensors);
  if (n_snapshots == 0) throw Error(ErrorKind::InvalidArgument, "need at least one snapshot");

  const SourceConfig scaled = scale_sources_to_gsnr(sources, noise, gsnr_db);
  CounterRng src_rng({seed, 0, stream_ids::kSources});
  CounterRng tex_rng({seed, 0, stream_ids::kTexture});
  CounterRng noise_rng({seed, 0, stream_ids::kNoise});

  ComplexMatrix x = sample_noise(noise, geom.num_sensors, n_snapshots, tex_rng, noise_rng);
  if (scaled.count() > 0) {
    const ComplexMatrix a = steering_matrix(geom, scaled.doas_deg);
    const ComplexMatrix s = sample_sources(scaled, n_snapshots, src_rng);
    x += a * s;
  }

  SnapshotBatch batch;
  batch.x = std::move(x);
  batch.truth = scaled;
  batch.noise = noise;
  batch.gsnr_db = gsnr_db;
  batch.seed = seed;
  return batch;
}

ComplexMatrix analytic_covariance(const UlaGeometry& geom, const SourceConfig& sources,
                                  double noise_power) {
  const std::size_t q = sources.count();
  const ComplexMatrix a = steering_matrix(geom, sources.doas_deg);
  ComplexMatrix rs(q, q);
  if (const auto* c = std::get_if<CoherentSources>(&sources.mode)) {
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t k = 0; k < q; ++k)
        rs(j, k) = c->base_power * c->attenuations[j] * std::conj(c->attenuations[k]);
  } else {
    const auto& nc = std::get<NonCoherentSources>(sources.mode);
    for (std::size_t k = 0; k < q; ++k) rs(k, k) = nc.powers.empty() ? 1.0 : nc.powers[k];
  }
  ComplexMatrix cov = a * rs * a.adjoint();
  for (std::size_t i = 0; i < geom.num_sensors; ++i) cov(i, i) += noise_power;
  return hermitian_part(cov);
}

}  // namespace mtmusic
