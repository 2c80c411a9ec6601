#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>

#include "mtmusic/bench.hpp"
#include "mtmusic/error.hpp"
#include "mtmusic/plot.hpp"
#include "test_util.hpp"

using namespace mtmusic;

namespace {

ErrorKind parse_kind(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a parse error");
  return ErrorKind::InvalidArgument;
}

std::string parse_message(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

BenchConfig small_config() {
  auto cfg = preset_config("noncoherent-gauss");
  cfg.scenario.gsnr_grid_db = {0.0};
  cfg.scenario.n_grid = {200};
  cfg.scenario.trials = 4;
  cfg.grid_step_deg = 0.05;
  return cfg;
}

}  // namespace

TEST_CASE("presets") {
  const auto names = preset_names();
  CHECK(names.size() == 8);
  const auto k = preset_config("noncoherent-k075");
  CHECK(k.scenario.geometry.num_sensors == 16);
  CHECK(k.scenario.sources.doas_deg == std::vector<double>{-10, 0, 5, 15, 35});
  CHECK(k.scenario.noise.family == NoiseFamily::KDist);
  CHECK(k.scenario.noise.shape == 0.75);
  CHECK(!k.smoothing);
  CHECK(*k.scenario.threshold_gsnr_db == -19.0);

  const auto ig = preset_config("coherent-ig01");
  CHECK(ig.scenario.geometry.num_sensors == 22);
  REQUIRE(ig.smoothing);
  CHECK(ig.smoothing->subarray_size == 16);
  CHECK(ig.scenario.sources.doas_deg == std::vector<double>{-17, -3, 2, 13, 20});
  CHECK(ig.scenario.noise.family == NoiseFamily::IGTexture);
  CHECK(ig.scenario.noise.shape == 0.1);
  CHECK(ig.scenario.sources.coherent());
  const auto& xi = std::get<CoherentSources>(ig.scenario.sources.mode).attenuations;
  CHECK(std::abs(xi[0] - std::polar(0.8, std::numbers::pi / 3)) < 1e-15);

  const std::set<double> thresholds = {-11, -19, -22, -12, -14, -25, -24};
  for (const auto& n : names) {
    const auto c = preset_config(n);
    CHECK(thresholds.count(*c.scenario.threshold_gsnr_db) == 1);
    CHECK_NOTHROW(c.validate());
  }
  try {
    preset_config("noncoherent-laplace");
    FAIL("expected UnknownPreset");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownPreset);
  }
}

TEST_CASE("parse_config: defaults and overrides") {
  const auto cfg = parse_config_text(R"({"schema": 1, "scenario": "noncoherent-k075"})");
  CHECK(cfg.scenario.trials == 200);
  CHECK(cfg.grid_step_deg == 0.01);
  CHECK(cfg.tau_selection.c == 5.0);
  CHECK(cfg.estimators.size() == 5);

  const auto o = parse_config_text(R"({"schema": 1, "scenario": "coherent-gauss", "trials": 7,
      "gsnr_grid_db": [-3], "n_grid": [250, 500], "master_seed": 9, "estimators": ["scm", "mt-gauss"],
      "grid_step_deg": 0.05, "tau_selection": {"c": 3}, "workers": 2, "outputs": "res"})");
  CHECK(o.scenario.trials == 7);
  CHECK(o.scenario.n_grid == std::vector<std::size_t>{250, 500});
  CHECK(o.scenario.master_seed == 9);
  CHECK(o.estimators == std::vector<std::string>{"scm", "mt-gauss"});
  CHECK(o.tau_selection.c == 3.0);
  CHECK(o.tau_selection.max_iters == 100);
  CHECK(o.workers == 2);
  CHECK(o.outputs == "res");
  CHECK(o.smoothing->subarray_size == 16);
}

TEST_CASE("parse_config: inline scenario") {
  const auto cfg = parse_config_text(R"({
    "schema": 1,
    "scenario": {
      "geometry": {"sensors": 8, "spacing_wavelengths": 0.5},
      "sources": {"doas_deg": [-20, 10], "mode": "coherent", "attenuations": [[1, 0], {"abs": 0.5, "arg": 1.0}]},
      "noise": {"family": "cauchy", "dispersion": 2},
      "gsnr_grid_db": [0, 5],
      "n_grid": [100]
    },
    "smoothing": {"subarray_size": 5}
  })");
  CHECK(cfg.scenario.geometry.num_sensors == 8);
  CHECK(cfg.scenario.trials == 200);
  CHECK(cfg.scenario.noise.family == NoiseFamily::Cauchy);
  CHECK(cfg.scenario.noise.dispersion == 2.0);
  const auto& xi = std::get<CoherentSources>(cfg.scenario.sources.mode).attenuations;
  CHECK(std::abs(xi[1] - std::polar(0.5, 1.0)) < 1e-15);
  CHECK(cfg.smoothing->subarray_size == 5);
}

TEST_CASE("parse_config: errors carry field paths") {
  CHECK(parse_kind("not json") == ErrorKind::SchemaError);
  CHECK(parse_kind(R"({"scenario": "noncoherent-gauss"})") == ErrorKind::SchemaError);
  CHECK(parse_kind(R"({"schema": 2, "scenario": "noncoherent-gauss"})") == ErrorKind::SchemaError);
  CHECK(parse_kind(R"({"schema": 1, "scenario": "nope"})") == ErrorKind::UnknownPreset);
  CHECK(parse_kind(R"({"schema": 1, "scenario": "noncoherent-gauss", "estimators": ["ml"]})") ==
        ErrorKind::UnknownEstimator);
  CHECK(parse_kind(R"({"schema": 1, "scenario": "noncoherent-gauss", "trials": 0})") == ErrorKind::SchemaError);
  CHECK(parse_kind(R"({"schema": 1, "scenario": "noncoherent-gauss", "estimators": []})") == ErrorKind::SchemaError);

  CHECK(parse_message(R"({"schema": 1, "scenario": "noncoherent-gauss", "bogus": 1})").find("bogus") !=
        std::string::npos);
  CHECK(parse_message(R"({"schema": 1, "scenario": {"sources": {"doas_deg": [0]}, "noise": {"family": "k", "shape": "x"},
        "gsnr_grid_db": [0], "n_grid": [10]}})")
            .find("scenario.noise.shape") != std::string::npos);
  CHECK(parse_message(R"({"schema": 1, "scenario": "noncoherent-gauss", "gsnr_grid_db": [0, "a"]})")
            .find("gsnr_grid_db[1]") != std::string::npos);
  CHECK(parse_message(R"({"schema": 1, "scenario": "noncoherent-gauss", "smoothing": {"subarray_size": 3}})")
            .find("smoothing.subarray_size") != std::string::npos);
}

TEST_CASE("parse_config from a file") {
  const auto dir = std::filesystem::temp_directory_path() / "mtmusic_cfg_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "c.json").string();
  write_text_file(path, R"({"schema": 1, "scenario": "noncoherent-ig01", "trials": 3})");
  CHECK(parse_config(path).scenario.trials == 3);
  CHECK_THROWS_AS(parse_config((dir / "missing.json").string()), Error);
}

TEST_CASE("apply_paper_fidelity") {
  auto cfg = preset_config("noncoherent-gauss");
  apply_paper_fidelity(cfg);
  CHECK(cfg.scenario.trials == 10000);
  CHECK(cfg.grid_step_deg == 0.0018);
}

TEST_CASE("trial seeds are pairwise distinct") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t g = 0; g < 20000; ++g) seen.insert(trial_seed(1, g));
  CHECK(seen.size() == 20000);
  CHECK(trial_seed(1, 0) != trial_seed(2, 0));
}

TEST_CASE("run_bench: high-SNR sanity run") {
  auto cfg = preset_config("noncoherent-gauss");
  cfg.estimators = {"scm"};
  cfg.scenario.gsnr_grid_db = {20.0};
  cfg.scenario.n_grid = {1000};
  cfg.scenario.trials = 1;
  const auto rep = run_bench(cfg);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].avg_rmse_deg < 0.5);
  CHECK(rep.rows[0].order_error_rate == 0.0);
  CHECK(rep.rows[0].excluded == 0);
  CHECK(rep.rows[0].trials == 1);
}

TEST_CASE("run_bench: one row per cell, deterministic, worker independent") {
  auto cfg = small_config();
  cfg.scenario.gsnr_grid_db = {-5.0, 5.0};
  cfg.scenario.n_grid = {100, 200};
  const auto a = run_bench(cfg);
  CHECK(a.rows.size() == 2 * 2 * 5);
  for (const auto& r : a.rows) {
    CHECK(std::isfinite(r.avg_rmse_deg));
    CHECK(std::isfinite(r.order_error_rate));
    CHECK(std::isfinite(r.mean_tau));
    CHECK(r.trials == 4);
    if (r.estimator == "mt-gauss") {
      CHECK(r.mean_tau > 0.0);
      CHECK(r.mean_iterations >= 1.0);
    }
  }
  const auto csv = report_to_csv(a);
  CHECK(report_to_csv(run_bench(cfg)) == csv);
  cfg.workers = 3;
  CHECK(report_to_csv(run_bench(cfg)) == csv);
}

TEST_CASE("run_bench: per-trial keys make aggregation order independent") {
  // Re-running individual trials in reverse order reproduces the reported RMSE.
  auto cfg = small_config();
  cfg.estimators = {"tyler"};
  const auto rep = run_bench(cfg);
  const auto& sc = cfg.scenario;
  std::vector<TrialOutcome> outs(sc.trials);
  for (std::size_t t = sc.trials; t-- > 0;) {
    const auto b = synthesize_snapshots(sc.geometry, sc.sources, sc.noise, 0.0, 200, trial_seed(sc.master_seed, t));
    outs[t] = run_trial(cfg, b, "tyler");
  }
  std::vector<double> sq(5, 0.0);
  for (const auto& o : outs) {
    REQUIRE(o.doa_ok);
    for (std::size_t k = 0; k < 5; ++k) sq[k] += o.squared_errors[k];
  }
  double acc = 0.0;
  for (double s : sq) acc += std::sqrt(s / static_cast<double>(sc.trials));
  CHECK(rep.rows[0].avg_rmse_deg == acc / 5.0);
}

TEST_CASE("run_bench: coherent preset with smoothing") {
  auto cfg = preset_config("coherent-gauss");
  cfg.scenario.gsnr_grid_db = {10.0};
  cfg.scenario.trials = 3;
  cfg.scenario.n_grid = {300};
  cfg.grid_step_deg = 0.05;
  const auto rep = run_bench(cfg);
  for (const auto& r : rep.rows) {
    CHECK_MESSAGE(r.avg_rmse_deg < 1.0, r.estimator);
    CHECK(r.excluded == 0);
  }
}

TEST_CASE("run_trial: failures are recorded, not thrown") {
  auto cfg = small_config();
  SnapshotBatch degenerate = make_batch(ComplexMatrix(16, 200));
  degenerate.truth = cfg.scenario.sources;
  const auto o = run_trial(cfg, degenerate, "tyler");
  CHECK_FALSE(o.doa_ok);
  CHECK_FALSE(o.order_ok);
}

TEST_CASE("CSV round trip") {
  auto rep = run_bench(small_config());
  rep.rows[0].gsnr_db = -19.123456789012345;
  rep.rows[1].mean_tau = 1.0 / 3.0;
  const auto csv = report_to_csv(rep);
  CHECK(csv.rfind(std::string(kBenchCsvHeader) + "\n", 0) == 0);
  const auto back = report_from_csv(csv);
  REQUIRE(back.rows.size() == rep.rows.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) CHECK(back.rows[i] == rep.rows[i]);
  CHECK(report_to_csv(back) == csv);
  CHECK_THROWS_AS(report_from_csv("a,b\n"), Error);
  CHECK_THROWS_AS(report_from_csv(std::string(kBenchCsvHeader) + "\nscm,1,2\n"), Error);
}

TEST_CASE("render_plot") {
  try {
    render_plot(BenchReport{}, PlotMetric::Rmse);
    FAIL("expected EmptyReport");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyReport);
  }

  BenchReport single{{BenchRow{"scm", 0.0, 100, 1.5, 0.0, 0.0, 0.0, 0, 10}}};
  std::string why;
  const auto one = render_plot(single, PlotMetric::Rmse);
  CHECK(testutil::xml_well_formed(one, &why));

  BenchReport two;
  for (const char* e : {"scm", "mt-gauss"})
    for (int g = 0; g < 5; ++g) two.rows.push_back({e, -10.0 + 2 * g, 1000, 0.1 * (g + 1), 0.2, 1.0, 3.0, 0, 20});
  const auto svg = render_plot(two, PlotMetric::Rmse);
  CHECK(testutil::xml_well_formed(svg, &why));
  std::size_t polylines = 0, pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
    ++polylines;
    const auto pts_start = svg.find("points=\"", pos) + 8;
    const auto pts = svg.substr(pts_start, svg.find('"', pts_start) - pts_start);
    CHECK(std::count(pts.begin(), pts.end(), ',') == 5);
    ++pos;
  }
  CHECK(polylines == 2);
  CHECK(svg.find(">mt-gauss<") != std::string::npos);
  CHECK(svg.find(">scm<") != std::string::npos);
  CHECK(testutil::xml_well_formed(render_plot(two, PlotMetric::OrderError), &why));
}

TEST_CASE("render_plot: full K-noise sweep is well-formed XML") {
  auto cfg = preset_config("noncoherent-k075");
  cfg.scenario.trials = 2;
  cfg.scenario.n_grid = {200};
  cfg.grid_step_deg = 0.1;
  const auto rep = run_bench(cfg);
  std::string why;
  CHECK_MESSAGE(testutil::xml_well_formed(render_plot(rep, PlotMetric::Rmse), &why), why);
  CHECK_MESSAGE(testutil::xml_well_formed(render_plot(rep, PlotMetric::OrderError), &why), why);
}

TEST_CASE("render_if_plot and xml_escape") {
  IfCurve c{{0.5, 1.0, 2.0}, {{"a<b", {1.0, 0.5, 1e-300}}, {"scm", {0.1, 1.0, 4.0}}}};
  std::string why;
  const auto svg = render_if_plot(c);
  CHECK_MESSAGE(testutil::xml_well_formed(svg, &why), why);
  CHECK(svg.find("a&lt;b") != std::string::npos);
  CHECK(xml_escape("&\"'<>") == "&amp;&quot;&apos;&lt;&gt;");
}

TEST_CASE("xml checker rejects broken documents") {
  CHECK_FALSE(testutil::xml_well_formed("<svg><g></svg>"));
  CHECK_FALSE(testutil::xml_well_formed("<svg>a & b</svg>"));
  CHECK_FALSE(testutil::xml_well_formed("<svg/><svg/>"));
  CHECK(testutil::xml_well_formed("<?xml version=\"1.0\"?><svg><g a=\"1\"/></svg>"));
}
