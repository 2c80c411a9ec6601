#include "mtmusic/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "mtmusic/bench.hpp"
#include "mtmusic/error.hpp"

namespace mtmusic {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

namespace {

constexpr double kWidth = 760.0, kHeight = 480.0;
constexpr double kLeft = 80.0, kRight = 200.0, kTop = 40.0, kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;  // in transformed units

  double t(double v) const { return log ? std::log10(v) : v; }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

  void fit(const std::vector<double>& vals) {
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (double v : vals) {
      if (!usable(v)) continue;
      mn = std::min(mn, t(v));
      mx = std::max(mx, t(v));
    }
    if (!std::isfinite(mn)) {
      mn = 0.0;
      mx = 1.0;
    }
    if (log) {
      mn = std::floor(mn);
      mx = std::ceil(mx);
    }
    if (mx - mn < 1e-12) {
      const double pad = log ? 1.0 : std::max(1.0, std::abs(mn) * 0.1);
      mn -= pad;
      mx += pad;
    }
    lo = mn;
    hi = mx;
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int step = std::max(1, static_cast<int>(std::ceil((hi - lo) / 8.0)));
      for (double e = lo; e <= hi + 1e-9; e += step) out.push_back(e);
      return out;
    }
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
      out.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
    }
    return out;
  }

  std::string label(double tv) const {
    if (log) return "1e" + fmt("%g", tv);
    return fmt("%g", tv);
  }
};

}  // namespace

std::string render_svg_chart(const ChartSpec& spec) {
  Axis ax{spec.log_x}, ay{spec.log_y};
  std::vector<double> xs, ys;
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (ax.usable(s.x[i]) && ay.usable(s.y[i])) {
        xs.push_back(s.x[i]);
        ys.push_back(s.y[i]);
      }
    }
  }
  ax.fit(xs);
  ay.fit(ys);

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (ax.t(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double v) { return kTop + ph - (ay.t(v) - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::string o;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%g", kWidth) + "\" height=\"" +
       fmt("%g", kHeight) + "\" viewBox=\"0 0 " + fmt("%g", kWidth) + " " + fmt("%g", kHeight) + "\">\n";
  o += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + fmt("%g", kLeft + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">" + xml_escape(spec.title) + "</text>\n";

  // Grid and ticks.
  o += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (double tv : ax.ticks()) {
    const double x = kLeft + (tv - ax.lo) / (ax.hi - ax.lo) * pw;
    o += "<line x1=\"" + fmt("%.2f", x) + "\" y1=\"" + fmt("%.2f", kTop) + "\" x2=\"" + fmt("%.2f", x) +
         "\" y2=\"" + fmt("%.2f", kTop + ph) + "\" stroke=\"#ddd\"/>\n";
    o += "<text x=\"" + fmt("%.2f", x) + "\" y=\"" + fmt("%.2f", kTop + ph + 16) + "\" text-anchor=\"middle\">" +
         xml_escape(ax.label(tv)) + "</text>\n";
  }
  for (double tv : ay.ticks()) {
    const double y = kTop + ph - (tv - ay.lo) / (ay.hi - ay.lo) * ph;
    o += "<line x1=\"" + fmt("%.2f", kLeft) + "\" y1=\"" + fmt("%.2f", y) + "\" x2=\"" + fmt("%.2f", kLeft + pw) +
         "\" y2=\"" + fmt("%.2f", y) + "\" stroke=\"#ddd\"/>\n";
    o += "<text x=\"" + fmt("%.2f", kLeft - 6) + "\" y=\"" + fmt("%.2f", y + 4) + "\" text-anchor=\"end\">" +
         xml_escape(ay.label(tv)) + "</text>\n";
  }
  o += "</g>\n";
  o += "<rect x=\"" + fmt("%g", kLeft) + "\" y=\"" + fmt("%g", kTop) + "\" width=\"" + fmt("%g", pw) +
       "\" height=\"" + fmt("%g", ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  o += "<text x=\"" + fmt("%g", kLeft + pw / 2) + "\" y=\"" + fmt("%g", kHeight - 16) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + xml_escape(spec.x_label) +
       "</text>\n";
  o += "<text x=\"18\" y=\"" + fmt("%g", kTop + ph / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"13\" transform=\"rotate(-90 18 " + fmt("%g", kTop + ph / 2) + ")\">" +
       xml_escape(spec.y_label) + "</text>\n";

  // Series and legend.
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const char* color = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
    std::string pts;
    std::string marks;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
      const std::string xy = fmt("%.2f", px(s.x[i])) + "," + fmt("%.2f", py(s.y[i]));
      if (!pts.empty()) pts += " ";
      pts += xy;
      marks += "<circle cx=\"" + fmt("%.2f", px(s.x[i])) + "\" cy=\"" + fmt("%.2f", py(s.y[i])) +
               "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
    }
    o += "<g class=\"series\" data-label=\"" + xml_escape(s.label) + "\">\n";
    o += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.8\" points=\"" + pts +
         "\"/>\n";
    o += marks;
    o += "</g>\n";
    const double ly = kTop + 12 + 20.0 * static_cast<double>(k);
    const double lx = kLeft + pw + 16;
    o += "<line x1=\"" + fmt("%g", lx) + "\" y1=\"" + fmt("%g", ly) + "\" x2=\"" + fmt("%g", lx + 24) + "\" y2=\"" +
         fmt("%g", ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + fmt("%g", lx + 30) + "\" y=\"" + fmt("%g", ly + 4) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" + xml_escape(s.label) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

std::string render_plot(const BenchReport& report, PlotMetric metric) {
  if (report.rows.empty()) throw Error(ErrorKind::EmptyReport, "nothing to plot");
  std::set<double> gsnrs;
  std::set<std::size_t> ns;
  for (const auto& r : report.rows) {
    gsnrs.insert(r.gsnr_db);
    ns.insert(r.n_snapshots);
  }
  // Versus GSNR unless the sweep only varies the snapshot count.
  const bool versus_n = gsnrs.size() == 1 && ns.size() > 1;
  const bool split_n = !versus_n && ns.size() > 1;

  ChartSpec spec;
  spec.log_y = metric == PlotMetric::Rmse;
  spec.log_x = versus_n;
  spec.x_label = versus_n ? "snapshots N" : "GSNR [dB]";
  spec.y_label = metric == PlotMetric::Rmse ? "average RMSE [deg]" : "order error rate";
  spec.title = metric == PlotMetric::Rmse ? "DOA RMSE" : "Order estimation error";

  std::vector<std::string> order;
  std::map<std::string, ChartSeries> by_label;
  for (const auto& r : report.rows) {
    std::string label = r.estimator;
    if (split_n) label += " N=" + std::to_string(r.n_snapshots);
    auto [it, inserted] = by_label.try_emplace(label);
    if (inserted) {
      order.push_back(label);
      it->second.label = label;
    }
    it->second.x.push_back(versus_n ? static_cast<double>(r.n_snapshots) : r.gsnr_db);
    it->second.y.push_back(metric == PlotMetric::Rmse ? r.avg_rmse_deg : r.order_error_rate);
  }
  for (const auto& label : order) {
    auto s = by_label[label];
    std::vector<std::size_t> idx(s.x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.x[a] < s.x[b]; });
    ChartSeries sorted{s.label, {}, {}};
    for (std::size_t i : idx) {
      sorted.x.push_back(s.x[i]);
      sorted.y.push_back(s.y[i]);
    }
    spec.series.push_back(std::move(sorted));
  }
  return render_svg_chart(spec);
}

std::string render_if_plot(const IfCurve& curve) {
  ChartSpec spec;
  spec.title = "Influence function norm";
  spec.x_label = "contamination norm ||y||";
  spec.y_label = "Frobenius norm of IF";
  spec.log_x = true;
  spec.log_y = true;
  for (const auto& [label, vals] : curve.series) spec.series.push_back({label, curve.norms, vals});
  return render_svg_chart(spec);
}

}  // namespace mtmusic
