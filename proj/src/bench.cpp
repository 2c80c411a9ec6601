#include "mtmusic/bench.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "mtmusic/error.hpp"
#include "mtmusic/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mtmusic {

using nlohmann::json;

void BenchConfig::validate() const {
  if (scenario.trials < 1) throw Error(ErrorKind::SchemaError, "scenario.trials: must be >= 1");
  if (estimators.empty()) throw Error(ErrorKind::SchemaError, "estimators: must be non-empty");
  for (const auto& id : estimators) {
    if (!is_known_estimator(id)) throw Error(ErrorKind::UnknownEstimator, id);
  }
  if (scenario.gsnr_grid_db.empty()) {
    throw Error(ErrorKind::SchemaError, "scenario.gsnr_grid_db: must be non-empty");
  }
  if (scenario.n_grid.empty()) throw Error(ErrorKind::SchemaError, "scenario.n_grid: must be non-empty");
  for (double g : scenario.gsnr_grid_db) {
    if (!std::isfinite(g)) throw Error(ErrorKind::SchemaError, "scenario.gsnr_grid_db: non-finite value");
  }
  for (std::size_t n : scenario.n_grid) {
    if (n < 2) throw Error(ErrorKind::SchemaError, "scenario.n_grid: values must be >= 2");
  }
  if (!(grid_step_deg > 0.0) || grid_step_deg > 1.0) {
    throw Error(ErrorKind::SchemaError, "grid_step_deg: must lie in (0, 1]");
  }
  if (workers < 0) throw Error(ErrorKind::SchemaError, "workers: must be >= 0");
  if (!(tau_selection.c > 0.0) || tau_selection.max_iters < 1 || !(tau_selection.rel_tol > 0.0) ||
      !(tau_selection.init_factor > 0.0)) {
    throw Error(ErrorKind::SchemaError, "tau_selection: parameters must be positive");
  }
  try {
    scenario.noise.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::SchemaError, std::string("scenario.noise: ") + e.what());
  }
  try {
    scenario.sources.validate(scenario.geometry.num_sensors);
  } catch (const Error& e) {
    throw Error(ErrorKind::SchemaError, std::string("scenario.sources: ") + e.what());
  }
  const std::size_t q = scenario.sources.count();
  if (smoothing) {
    const std::size_t r = smoothing->subarray_size;
    if (r <= q || r > scenario.geometry.num_sensors) {
      throw Error(ErrorKind::SchemaError, "smoothing.subarray_size: must satisfy q < r <= p");
    }
  } else if (scenario.geometry.num_sensors <= q) {
    throw Error(ErrorKind::SchemaError, "scenario.geometry.sensors: must exceed the source count");
  }
}

// ---------------------------------------------------------------- presets

namespace {

struct PresetNoise {
  const char* suffix;
  NoiseConfig noise;
  double noncoherent_threshold_db;
  double coherent_threshold_db;
};

const std::vector<PresetNoise>& preset_noises() {
  static const std::vector<PresetNoise> table = {
      {"gauss", {NoiseFamily::Gaussian, 1.0, 1.0}, -11.0, -12.0},
      {"cauchy", {NoiseFamily::Cauchy, 1.0, 1.0}, -11.0, -14.0},
      {"k075", {NoiseFamily::KDist, 0.75, 1.0}, -19.0, -25.0},
      {"ig01", {NoiseFamily::IGTexture, 0.1, 1.0}, -22.0, -24.0},
  };
  return table;
}

std::vector<double> grid_around(double threshold_db) {
  std::vector<double> g;
  for (int k = -2; k <= 2; ++k) g.push_back(threshold_db + 3.0 * k);
  return g;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const char* kind : {"noncoherent-", "coherent-"}) {
    for (const auto& n : preset_noises()) names.push_back(std::string(kind) + n.suffix);
  }
  return names;
}

BenchConfig preset_config(const std::string& name) {
  for (const auto& pn : preset_noises()) {
    BenchConfig cfg;
    cfg.estimators = known_estimators();
    cfg.scenario.noise = pn.noise;
    cfg.scenario.n_grid = {1000};
    if (name == std::string("noncoherent-") + pn.suffix) {
      cfg.scenario.name = name;
      cfg.scenario.geometry = {16, 0.5};
      cfg.scenario.sources.doas_deg = {-10.0, 0.0, 5.0, 15.0, 35.0};
      cfg.scenario.sources.mode = NonCoherentSources{};
      cfg.scenario.threshold_gsnr_db = pn.noncoherent_threshold_db;
      cfg.scenario.gsnr_grid_db = grid_around(pn.noncoherent_threshold_db);
      return cfg;
    }
    if (name == std::string("coherent-") + pn.suffix) {
      using std::numbers::pi;
      cfg.scenario.name = name;
      cfg.scenario.geometry = {22, 0.5};
      cfg.scenario.sources.doas_deg = {-17.0, -3.0, 2.0, 13.0, 20.0};
      CoherentSources coh;
      coh.attenuations = {std::polar(0.8, pi / 3), std::polar(1.0, 0.0), std::polar(0.9, pi / 4),
                          std::polar(0.7, pi / 5), std::polar(0.6, pi / 6)};
      cfg.scenario.sources.mode = coh;
      cfg.smoothing = SmoothingConfig{16};
      cfg.scenario.threshold_gsnr_db = pn.coherent_threshold_db;
      cfg.scenario.gsnr_grid_db = grid_around(pn.coherent_threshold_db);
      return cfg;
    }
  }
  throw Error(ErrorKind::UnknownPreset, name);
}

// ---------------------------------------------------------------- config parsing

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::SchemaError, path + ": " + msg);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) schema_fail(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) schema_fail(path.empty() ? key : path + "." + key, "unknown field");
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) schema_fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_fail(path, "expected a finite number");
  return d;
}

std::uint64_t get_uint(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const auto i = v.get<std::int64_t>();
    if (i >= 0) return static_cast<std::uint64_t>(i);
  }
  schema_fail(path, "expected a non-negative integer");
}

std::vector<double> get_number_list(const json& v, const std::string& path) {
  if (!v.is_array()) schema_fail(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(get_number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::size_t> get_uint_list(const json& v, const std::string& path) {
  if (!v.is_array()) schema_fail(path, "expected an array");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(static_cast<std::size_t>(get_uint(v[i], path + "[" + std::to_string(i) + "]")));
  }
  return out;
}

cdouble get_complex(const json& v, const std::string& path) {
  if (v.is_number()) return {get_number(v, path), 0.0};
  if (v.is_array() && v.size() == 2) return {get_number(v[0], path + "[0]"), get_number(v[1], path + "[1]")};
  if (v.is_object()) {
    check_keys(v, path, {"re", "im", "abs", "arg"});
    if (v.contains("abs")) {
      const double mag = get_number(v["abs"], path + ".abs");
      const double arg = v.contains("arg") ? get_number(v["arg"], path + ".arg") : 0.0;
      return std::polar(mag, arg);
    }
    const double re = v.contains("re") ? get_number(v["re"], path + ".re") : 0.0;
    const double im = v.contains("im") ? get_number(v["im"], path + ".im") : 0.0;
    return {re, im};
  }
  schema_fail(path, "expected a number, [re, im] or {re, im} / {abs, arg}");
}

void parse_geometry(const json& v, const std::string& path, UlaGeometry& g) {
  check_keys(v, path, {"sensors", "spacing_wavelengths"});
  if (v.contains("sensors")) g.num_sensors = get_uint(v["sensors"], path + ".sensors");
  if (v.contains("spacing_wavelengths")) {
    g.spacing_wavelengths = get_number(v["spacing_wavelengths"], path + ".spacing_wavelengths");
  }
}

void parse_sources(const json& v, const std::string& path, SourceConfig& s) {
  check_keys(v, path, {"doas_deg", "mode", "powers", "attenuations"});
  if (!v.contains("doas_deg")) schema_fail(path + ".doas_deg", "required");
  s.doas_deg = get_number_list(v["doas_deg"], path + ".doas_deg");
  std::string mode = "noncoherent";
  if (v.contains("mode")) {
    if (!v["mode"].is_string()) schema_fail(path + ".mode", "expected a string");
    mode = v["mode"].get<std::string>();
  }
  if (mode == "noncoherent") {
    if (v.contains("attenuations")) schema_fail(path + ".attenuations", "only valid in coherent mode");
    NonCoherentSources nc;
    if (v.contains("powers")) nc.powers = get_number_list(v["powers"], path + ".powers");
    s.mode = nc;
  } else if (mode == "coherent") {
    if (v.contains("powers")) schema_fail(path + ".powers", "only valid in noncoherent mode");
    if (!v.contains("attenuations")) schema_fail(path + ".attenuations", "required in coherent mode");
    const auto& a = v["attenuations"];
    if (!a.is_array()) schema_fail(path + ".attenuations", "expected an array");
    CoherentSources c;
    for (std::size_t i = 0; i < a.size(); ++i) {
      c.attenuations.push_back(get_complex(a[i], path + ".attenuations[" + std::to_string(i) + "]"));
    }
    s.mode = c;
  } else {
    schema_fail(path + ".mode", "expected \"noncoherent\" or \"coherent\"");
  }
}

void parse_noise(const json& v, const std::string& path, NoiseConfig& n) {
  check_keys(v, path, {"family", "shape", "dispersion"});
  if (!v.contains("family") || !v["family"].is_string()) schema_fail(path + ".family", "expected a string");
  try {
    n.family = noise_family_from_string(v["family"].get<std::string>());
  } catch (const Error& e) {
    schema_fail(path + ".family", e.what());
  }
  if (v.contains("shape")) n.shape = get_number(v["shape"], path + ".shape");
  if (v.contains("dispersion")) n.dispersion = get_number(v["dispersion"], path + ".dispersion");
}

void parse_sweep_fields(const json& v, const std::string& path, ScenarioSpec& s) {
  if (v.contains("gsnr_grid_db")) s.gsnr_grid_db = get_number_list(v["gsnr_grid_db"], join(path, "gsnr_grid_db"));
  if (v.contains("n_grid")) s.n_grid = get_uint_list(v["n_grid"], join(path, "n_grid"));
  if (v.contains("trials")) s.trials = get_uint(v["trials"], join(path, "trials"));
  if (v.contains("master_seed")) s.master_seed = get_uint(v["master_seed"], join(path, "master_seed"));
}

}  // namespace

BenchConfig parse_config_text(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, std::string("<root>: invalid JSON: ") + e.what());
  }
  check_keys(doc, "", {"schema", "scenario", "estimators", "grid_step_deg", "smoothing", "tau_selection",
                       "outputs", "workers", "gsnr_grid_db", "n_grid", "trials", "master_seed"});
  if (!doc.contains("schema")) schema_fail("schema", "required");
  if (get_uint(doc["schema"], "schema") != static_cast<std::uint64_t>(kConfigSchemaVersion)) {
    schema_fail("schema", "unsupported version (expected 1)");
  }
  if (!doc.contains("scenario")) schema_fail("scenario", "required");

  BenchConfig cfg;
  const auto& sc = doc["scenario"];
  if (sc.is_string()) {
    cfg = preset_config(sc.get<std::string>());
  } else if (sc.is_object()) {
    check_keys(sc, "scenario", {"name", "geometry", "sources", "noise", "gsnr_grid_db", "n_grid", "trials",
                                "master_seed", "threshold_gsnr_db"});
    cfg.estimators = known_estimators();
    if (sc.contains("name")) {
      if (!sc["name"].is_string()) schema_fail("scenario.name", "expected a string");
      cfg.scenario.name = sc["name"].get<std::string>();
    }
    if (sc.contains("geometry")) parse_geometry(sc["geometry"], "scenario.geometry", cfg.scenario.geometry);
    if (!sc.contains("sources")) schema_fail("scenario.sources", "required");
    parse_sources(sc["sources"], "scenario.sources", cfg.scenario.sources);
    if (!sc.contains("noise")) schema_fail("scenario.noise", "required");
    parse_noise(sc["noise"], "scenario.noise", cfg.scenario.noise);
    if (!sc.contains("gsnr_grid_db")) schema_fail("scenario.gsnr_grid_db", "required");
    if (!sc.contains("n_grid")) schema_fail("scenario.n_grid", "required");
    parse_sweep_fields(sc, "scenario", cfg.scenario);
    if (sc.contains("threshold_gsnr_db")) {
      cfg.scenario.threshold_gsnr_db = get_number(sc["threshold_gsnr_db"], "scenario.threshold_gsnr_db");
    }
  } else {
    schema_fail("scenario", "expected a preset name or an object");
  }
  parse_sweep_fields(doc, "", cfg.scenario);

  if (doc.contains("estimators")) {
    const auto& e = doc["estimators"];
    if (!e.is_array()) schema_fail("estimators", "expected an array");
    cfg.estimators.clear();
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (!e[i].is_string()) schema_fail("estimators[" + std::to_string(i) + "]", "expected a string");
      const auto id = e[i].get<std::string>();
      if (!is_known_estimator(id)) throw Error(ErrorKind::UnknownEstimator, id);
      cfg.estimators.push_back(id);
    }
  }
  if (doc.contains("grid_step_deg")) cfg.grid_step_deg = get_number(doc["grid_step_deg"], "grid_step_deg");
  if (doc.contains("smoothing")) {
    const auto& s = doc["smoothing"];
    if (s.is_null()) {
      cfg.smoothing.reset();
    } else {
      check_keys(s, "smoothing", {"subarray_size"});
      if (!s.contains("subarray_size")) schema_fail("smoothing.subarray_size", "required");
      cfg.smoothing = SmoothingConfig{static_cast<std::size_t>(get_uint(s["subarray_size"], "smoothing.subarray_size"))};
    }
  }
  if (doc.contains("tau_selection")) {
    const auto& t = doc["tau_selection"];
    check_keys(t, "tau_selection", {"c", "max_iters", "rel_tol", "init_factor"});
    auto& ts = cfg.tau_selection;
    if (t.contains("c")) ts.c = get_number(t["c"], "tau_selection.c");
    if (t.contains("max_iters")) ts.max_iters = static_cast<int>(get_uint(t["max_iters"], "tau_selection.max_iters"));
    if (t.contains("rel_tol")) ts.rel_tol = get_number(t["rel_tol"], "tau_selection.rel_tol");
    if (t.contains("init_factor")) ts.init_factor = get_number(t["init_factor"], "tau_selection.init_factor");
  }
  if (doc.contains("outputs")) {
    if (!doc["outputs"].is_string()) schema_fail("outputs", "expected a string");
    cfg.outputs = doc["outputs"].get<std::string>();
  }
  if (doc.contains("workers")) cfg.workers = static_cast<int>(get_uint(doc["workers"], "workers"));
  cfg.validate();
  return cfg;
}

BenchConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::SchemaError, path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_paper_fidelity(BenchConfig& cfg) {
  cfg.scenario.trials = kPaperTrials;
  cfg.grid_step_deg = kPaperGridStepDeg;
}

// ---------------------------------------------------------------- sweep

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t global_trial) {
  return mix_key({master_seed, global_trial, 0});
}

TrialOutcome run_trial(const BenchConfig& cfg, const SnapshotBatch& batch, const std::string& estimator) {
  TrialOutcome out;
  EstimatorOptions opts;
  opts.tau_selection = cfg.tau_selection;
  if (cfg.smoothing) opts.smoothing_subarray = cfg.smoothing->subarray_size;

  CovarianceEstimate est;
  try {
    est = estimate_by_id(estimator, batch, opts);
  } catch (const Error&) {
    return out;
  }
  out.tau = est.tau_used.value_or(0.0);
  out.iterations = static_cast<double>(est.iterations.value_or(0));

  const std::size_t q = batch.truth.count();
  ComplexMatrix cov;
  try {
    cov = cfg.smoothing ? spatial_smooth_fb(est.sigma, *cfg.smoothing) : est.sigma;
  } catch (const Error&) {
    return out;
  }

  const MdlVariant variant = cfg.smoothing ? MdlVariant::Smoothed : MdlVariant::Standard;
  try {
    const auto q_hat = order_criterion(cov, batch.snapshots(), variant).q_hat;
    out.order_ok = true;
    out.order_correct = q_hat == q;
  } catch (const Error&) {
  }

  try {
    const auto v_noise = noise_subspace(cov, q);
    const UlaGeometry sub{cov.rows(), cfg.scenario.geometry.spacing_wavelengths};
    const auto spec = pseudo_spectrum(v_noise, sub, cfg.grid_step_deg);
    const auto peaks = pick_peaks(spec, q);
    out.squared_errors = doa_squared_errors(peaks, DoaSet{batch.truth.doas_deg});
    bool finite = true;
    for (double e : out.squared_errors) finite = finite && std::isfinite(e);
    out.doa_ok = finite;
    if (!finite) out.squared_errors.clear();
  } catch (const Error&) {
  }
  return out;
}

BenchReport run_bench(const BenchConfig& cfg) {
  cfg.validate();
  const auto& sc = cfg.scenario;
  const std::size_t n_est = cfg.estimators.size();
  const std::size_t trials = sc.trials;

  struct Cell {
    double gsnr_db;
    std::size_t n;
  };
  std::vector<Cell> cells;
  for (std::size_t n : sc.n_grid)
    for (double g : sc.gsnr_grid_db) cells.push_back({g, n});

  const std::size_t total = cells.size() * trials;
  // Outcomes are keyed by (global trial, estimator) so the reduction below
  // never depends on which thread finished first.
  std::vector<TrialOutcome> outcomes(total * n_est);
  const auto count = static_cast<long long>(total);

#ifdef _OPENMP
  const int threads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (long long gi = 0; gi < count; ++gi) {
    const auto g = static_cast<std::size_t>(gi);
    const Cell& cell = cells[g / trials];
    const auto batch = synthesize_snapshots(sc.geometry, sc.sources, sc.noise, cell.gsnr_db, cell.n,
                                            trial_seed(sc.master_seed, g));
    for (std::size_t e = 0; e < n_est; ++e) outcomes[g * n_est + e] = run_trial(cfg, batch, cfg.estimators[e]);
  }

  BenchReport report;
  const std::size_t q = sc.sources.count();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t e = 0; e < n_est; ++e) {
      BenchRow row;
      row.estimator = cfg.estimators[e];
      row.gsnr_db = cells[c].gsnr_db;
      row.n_snapshots = cells[c].n;
      row.trials = trials;
      std::vector<double> sq(q, 0.0);
      std::size_t doa_ok = 0, order_ok = 0, order_wrong = 0, est_ok = 0;
      double tau_sum = 0.0, iter_sum = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        const auto& o = outcomes[(c * trials + t) * n_est + e];
        if (o.doa_ok) {
          ++doa_ok;
          for (std::size_t k = 0; k < q; ++k) sq[k] += o.squared_errors[k];
        }
        if (o.order_ok) {
          ++order_ok;
          if (!o.order_correct) ++order_wrong;
        }
        if (o.doa_ok || o.order_ok) {
          ++est_ok;
          tau_sum += o.tau;
          iter_sum += o.iterations;
        }
      }
      row.excluded = trials - doa_ok;
      if (doa_ok > 0) {
        double acc = 0.0;
        for (double s : sq) acc += std::sqrt(s / static_cast<double>(doa_ok));
        row.avg_rmse_deg = acc / static_cast<double>(q);
      } else {
        row.avg_rmse_deg = nan;
      }
      row.order_error_rate = order_ok > 0 ? static_cast<double>(order_wrong) / static_cast<double>(order_ok) : nan;
      row.mean_tau = est_ok > 0 ? tau_sum / static_cast<double>(est_ok) : 0.0;
      row.mean_iterations = est_ok > 0 ? iter_sum / static_cast<double>(est_ok) : 0.0;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

// ---------------------------------------------------------------- CSV

std::string report_to_csv(const BenchReport& report) {
  std::string out = std::string(kBenchCsvHeader) + "\n";
  char buf[512];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, ",%.17g,%zu,%.17g,%.17g,%.17g,%.17g,%zu,%zu\n", r.gsnr_db, r.n_snapshots,
                  r.avg_rmse_deg, r.order_error_rate, r.mean_tau, r.mean_iterations, r.excluded, r.trials);
    out += r.estimator;
    out += buf;
  }
  return out;
}

namespace {

double parse_double_field(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error(ErrorKind::SchemaError, "csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::size_t parse_size_field(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || s[0] == '-' || end != s.c_str() + s.size()) {
    throw Error(ErrorKind::SchemaError, "csv line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

BenchReport report_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::SchemaError, "csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kBenchCsvHeader) throw Error(ErrorKind::SchemaError, "csv: unexpected header");
  BenchReport report;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    std::istringstream ls(line);
    while (std::getline(ls, cur, ',')) f.push_back(cur);
    if (f.size() != 9) {
      throw Error(ErrorKind::SchemaError, "csv line " + std::to_string(line_no) + ": expected 9 fields");
    }
    BenchRow r;
    r.estimator = f[0];
    r.gsnr_db = parse_double_field(f[1], line_no);
    r.n_snapshots = parse_size_field(f[2], line_no);
    r.avg_rmse_deg = parse_double_field(f[3], line_no);
    r.order_error_rate = parse_double_field(f[4], line_no);
    r.mean_tau = parse_double_field(f[5], line_no);
    r.mean_iterations = parse_double_field(f[6], line_no);
    r.excluded = parse_size_field(f[7], line_no);
    r.trials = parse_size_field(f[8], line_no);
    report.rows.push_back(std::move(r));
  }
  return report;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::InvalidArgument, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mtmusic
