// mtmusic: command-line front end for the robust MUSIC library.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "mtmusic/bench.hpp"
#include "mtmusic/error.hpp"
#include "mtmusic/influence.hpp"
#include "mtmusic/order.hpp"
#include "mtmusic/plot.hpp"
#include "mtmusic/subspace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mtmusic;

namespace {

struct CommonFlags {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<int> workers;
  bool paper_fidelity = false;
  std::string out = "out";
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON config file (\"schema\": 1)");
  app->add_option("--preset", f.preset, "Named scenario preset");
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--trials", f.trials, "Monte Carlo trials per cell");
  app->add_option("--workers", f.workers, "Worker threads (0 = all)");
  app->add_flag("--paper-fidelity", f.paper_fidelity, "10^4 trials and a 0.0018 deg grid");
  app->add_option("--out", f.out, "Output directory");
}

BenchConfig load_config(const CommonFlags& f) {
  BenchConfig cfg;
  if (!f.config.empty()) {
    cfg = parse_config(f.config);
  } else {
    cfg = preset_config(f.preset.empty() ? "noncoherent-gauss" : f.preset);
  }
  if (!f.config.empty() && !f.preset.empty()) {
    // Preset replaces the scenario but keeps the remaining settings.
    const auto p = preset_config(f.preset);
    cfg.scenario = p.scenario;
    cfg.smoothing = p.smoothing;
  }
  if (f.seed) cfg.scenario.master_seed = *f.seed;
  if (f.trials) cfg.scenario.trials = *f.trials;
  if (f.workers) cfg.workers = *f.workers;
  if (f.paper_fidelity) apply_paper_fidelity(cfg);
  if (f.out != "out" || cfg.outputs.empty()) cfg.outputs = f.out;
  cfg.validate();
  return cfg;
}

fs::path out_dir(const BenchConfig& cfg) {
  fs::path dir(cfg.outputs);
  fs::create_directories(dir);
  return dir;
}

json batch_to_json(const SnapshotBatch& b) {
  json re = json::array(), im = json::array();
  for (std::size_t j = 0; j < b.sensors(); ++j) {
    json rr = json::array(), ii = json::array();
    for (std::size_t n = 0; n < b.snapshots(); ++n) {
      rr.push_back(b.x(j, n).real());
      ii.push_back(b.x(j, n).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  return {{"schema", kConfigSchemaVersion},
          {"sensors", b.sensors()},
          {"snapshots", b.snapshots()},
          {"doas_deg", b.truth.doas_deg},
          {"gsnr_db", b.gsnr_db},
          {"seed", b.seed},
          {"noise", to_string(b.noise.family)},
          {"re", std::move(re)},
          {"im", std::move(im)}};
}

SnapshotBatch batch_from_json(const std::string& path) {
  const json j = json::parse(read_text_file(path));
  if (j.value("schema", 0) != kConfigSchemaVersion) throw Error(ErrorKind::SchemaError, "schema: expected 1");
  const std::size_t p = j.at("sensors").get<std::size_t>();
  const std::size_t n = j.at("snapshots").get<std::size_t>();
  ComplexMatrix x(p, n);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < n; ++c) x(r, c) = {j.at("re").at(r).at(c).get<double>(), j.at("im").at(r).at(c).get<double>()};
  SnapshotBatch b = make_batch(std::move(x));
  b.truth.doas_deg = j.value("doas_deg", std::vector<double>{});
  b.gsnr_db = j.value("gsnr_db", 0.0);
  b.seed = j.value("seed", std::uint64_t{0});
  return b;
}

struct SingleBatchFlags {
  std::string input;
  std::string estimator = "mt-gauss";
  std::optional<double> gsnr_db;
  std::optional<std::size_t> snapshots;
  std::optional<std::size_t> sources;
};

SnapshotBatch obtain_batch(const BenchConfig& cfg, const SingleBatchFlags& s) {
  if (!s.input.empty()) return batch_from_json(s.input);
  const auto& sc = cfg.scenario;
  const double g = s.gsnr_db.value_or(sc.threshold_gsnr_db.value_or(sc.gsnr_grid_db.front()));
  const std::size_t n = s.snapshots.value_or(sc.n_grid.front());
  return synthesize_snapshots(sc.geometry, sc.sources, sc.noise, g, n, trial_seed(sc.master_seed, 0));
}

int cmd_simulate(const CommonFlags& f, const SingleBatchFlags& s) {
  const auto cfg = load_config(f);
  const auto batch = obtain_batch(cfg, s);
  const auto path = out_dir(cfg) / "snapshots.json";
  write_text_file(path.string(), batch_to_json(batch).dump() + "\n");
  std::printf("wrote %s (%zu sensors x %zu snapshots)\n", path.c_str(), batch.sensors(), batch.snapshots());
  return 0;
}

CovarianceEstimate estimate_for(const BenchConfig& cfg, const SingleBatchFlags& s, const SnapshotBatch& b) {
  EstimatorOptions opts;
  opts.tau_selection = cfg.tau_selection;
  if (cfg.smoothing) opts.smoothing_subarray = cfg.smoothing->subarray_size;
  return estimate_by_id(s.estimator, b, opts);
}

int cmd_doa(const CommonFlags& f, const SingleBatchFlags& s) {
  const auto cfg = load_config(f);
  const auto batch = obtain_batch(cfg, s);
  const std::size_t q = s.sources.value_or(batch.truth.count());
  if (q == 0) throw Error(ErrorKind::InvalidArgument, "number of sources unknown; pass --sources");
  const auto est = estimate_for(cfg, s, batch);
  const ComplexMatrix cov = cfg.smoothing ? spatial_smooth_fb(est.sigma, *cfg.smoothing) : est.sigma;
  const UlaGeometry sub{cov.rows(), cfg.scenario.geometry.spacing_wavelengths};
  const auto spec = pseudo_spectrum(noise_subspace(cov, q), sub, cfg.grid_step_deg);
  const auto peaks = pick_peaks(spec, q);
  const auto path = out_dir(cfg) / "spectrum.csv";
  write_text_file(path.string(), spectrum_to_csv(spec));
  std::printf("estimator %s", s.estimator.c_str());
  if (est.tau_used) std::printf(" tau %.6g", *est.tau_used);
  std::printf("\nDOAs [deg]:");
  for (double a : peaks.angles_deg) std::printf(" %.4f", a);
  std::printf("\n");
  if (batch.truth.count() == q) {
    const auto sq = doa_squared_errors(peaks, DoaSet{batch.truth.doas_deg});
    double acc = 0.0;
    for (double e : sq) acc += std::sqrt(e);
    std::printf("mean abs error [deg]: %.6g\n", acc / static_cast<double>(q));
  }
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_order(const CommonFlags& f, const SingleBatchFlags& s) {
  const auto cfg = load_config(f);
  const auto batch = obtain_batch(cfg, s);
  const auto est = estimate_for(cfg, s, batch);
  const ComplexMatrix cov = cfg.smoothing ? spatial_smooth_fb(est.sigma, *cfg.smoothing) : est.sigma;
  const auto res = order_criterion(cov, batch.snapshots(), cfg.smoothing ? MdlVariant::Smoothed : MdlVariant::Standard);
  const auto path = out_dir(cfg) / "mdl.csv";
  write_text_file(path.string(), criterion_to_csv(res));
  std::printf("estimator %s q_hat %zu", s.estimator.c_str(), res.q_hat);
  if (batch.truth.count() > 0) std::printf(" (true %zu)", batch.truth.count());
  std::printf("\nwrote %s\n", path.c_str());
  return 0;
}

int cmd_influence(const CommonFlags& f, std::size_t base_n) {
  IfCurveOptions opts;
  if (f.seed) opts.seed = *f.seed;
  opts.base_snapshots = base_n;
  const auto curve = influence_curve(default_if_norms(), opts);
  fs::create_directories(f.out);
  const auto csv = fs::path(f.out) / "influence.csv";
  const auto svg = fs::path(f.out) / "influence.svg";
  write_text_file(csv.string(), if_curve_to_csv(curve));
  write_text_file(svg.string(), render_if_plot(curve));
  std::printf("wrote %s and %s\n", csv.c_str(), svg.c_str());
  return 0;
}

void write_plots(const BenchReport& report, const fs::path& dir) {
  write_text_file((dir / "rmse.svg").string(), render_plot(report, PlotMetric::Rmse));
  write_text_file((dir / "order_error.svg").string(), render_plot(report, PlotMetric::OrderError));
}

int cmd_bench(const CommonFlags& f) {
  const auto cfg = load_config(f);
  const auto report = run_bench(cfg);
  const auto dir = out_dir(cfg);
  const auto csv = report_to_csv(report);
  write_text_file((dir / "bench.csv").string(), csv);
  write_plots(report, dir);
  std::fputs(csv.c_str(), stdout);
  std::printf("wrote %s/{bench.csv,rmse.svg,order_error.svg}\n", dir.c_str());
  return 0;
}

int cmd_plot(const CommonFlags& f, const std::string& csv_path) {
  const auto report = report_from_csv(read_text_file(csv_path));
  fs::create_directories(f.out);
  write_plots(report, f.out);
  std::printf("wrote %s/{rmse.svg,order_error.svg}\n", f.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust MUSIC with measure-transformed covariances"};
  app.require_subcommand(1);

  CommonFlags sim_f, doa_f, ord_f, inf_f, bench_f, plot_f;
  SingleBatchFlags sim_s, doa_s, ord_s;

  auto* sim = app.add_subcommand("simulate", "Synthesize one snapshot batch as JSON");
  add_common(sim, sim_f);
  sim->add_option("--gsnr", sim_s.gsnr_db, "GSNR in dB");
  sim->add_option("--snapshots", sim_s.snapshots, "Number of snapshots N");

  auto add_single = [](CLI::App* a, SingleBatchFlags& s) {
    a->add_option("--input", s.input, "Snapshot JSON written by simulate");
    a->add_option("--estimator", s.estimator, "scm | mt-gauss | sign | tyler | zmnl");
    a->add_option("--gsnr", s.gsnr_db, "GSNR in dB when synthesizing");
    a->add_option("--snapshots", s.snapshots, "Number of snapshots N when synthesizing");
  };
  auto* doa = app.add_subcommand("doa", "Estimate DOAs from one batch");
  add_common(doa, doa_f);
  add_single(doa, doa_s);
  doa->add_option("--sources", doa_s.sources, "Number of sources q (defaults to the truth)");
  auto* ord = app.add_subcommand("order", "Estimate the number of sources from one batch");
  add_common(ord, ord_f);
  add_single(ord, ord_s);

  std::size_t base_n = 100000;
  auto* inf = app.add_subcommand("influence", "Influence-function norm curves (CSV + SVG)");
  add_common(inf, inf_f);
  inf->add_option("--base-snapshots", base_n, "Base batch size for the numerical curves");

  auto* bench = app.add_subcommand("bench", "Monte Carlo sweep (CSV + SVG)");
  add_common(bench, bench_f);

  std::string csv_path;
  auto* plot = app.add_subcommand("plot", "Re-render plots from a bench CSV");
  add_common(plot, plot_f);
  plot->add_option("csv", csv_path, "bench.csv to render")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (sim->parsed()) return cmd_simulate(sim_f, sim_s);
    if (doa->parsed()) return cmd_doa(doa_f, doa_s);
    if (ord->parsed()) return cmd_order(ord_f, ord_s);
    if (inf->parsed()) return cmd_influence(inf_f, base_n);
    if (bench->parsed()) return cmd_bench(bench_f);
    if (plot->parsed()) return cmd_plot(plot_f, csv_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
