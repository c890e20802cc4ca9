#include "strhc/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace strhc::plot {
namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Round tick spacing to the 1/2/5 ladder covering the range with about five
// intervals.
double nice_step(double range) {
  if (!(range > 0.0)) return 1.0;
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double step = 10.0;
  if (frac <= 1.0)
    step = 1.0;
  else if (frac <= 2.0)
    step = 2.0;
  else if (frac <= 5.0)
    step = 5.0;
  return step * mag;
}

struct Canvas {
  double width = 720.0, height = 540.0;
  double left = 64.0, right = 16.0, top = 40.0, bottom = 48.0;
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  std::string body;

  double px(double x) const {
    return left + (x - x_min) / (x_max - x_min) * (width - left - right);
  }
  double py(double y) const {
    return height - bottom - (y - y_min) / (y_max - y_min) * (height - top - bottom);
  }

  void set_range(double xmin, double xmax, double ymin, double ymax) {
    auto pad = [](double& lo, double& hi) {
      if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
      } else {
        const double p = 0.06 * (hi - lo);
        lo -= p;
        hi += p;
      }
    };
    pad(xmin, xmax);
    pad(ymin, ymax);
    x_min = xmin;
    x_max = xmax;
    y_min = ymin;
    y_max = ymax;
  }

  void add(const std::string& s) { body += s; }

  void line(double x1, double y1, double x2, double y2, const char* stroke, double w,
            const char* dash = nullptr) {
    body += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
            num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(w) + "\"";
    if (dash) body += std::string(" stroke-dasharray=\"") + dash + "\"";
    body += "/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const char* stroke, double w,
                bool close = false, const char* fill = "none") {
    if (pts.empty()) return;
    body += close ? "<polygon points=\"" : "<polyline points=\"";
    for (const auto& [x, y] : pts) body += num(px(x)) + "," + num(py(y)) + " ";
    body += std::string("\" fill=\"") + fill + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
            num(w) + "\"/>\n";
  }

  void circle(double x, double y, double r, const char* fill) {
    body += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"" + num(r) +
            "\" fill=\"" + fill + "\"/>\n";
  }

  void rect_px(double x, double y, double w, double h, const char* fill, double opacity = 1.0) {
    body += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" +
            num(h) + "\" fill=\"" + fill + "\" opacity=\"" + num(opacity) + "\"/>\n";
  }

  void text(double x, double y, const std::string& s, const char* anchor = "start",
            double size = 12.0, const char* fill = "#333") {
    body += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
            num(size) + "\" text-anchor=\"" + anchor + "\" fill=\"" + fill + "\">" + s +
            "</text>\n";
  }

  void axes(const std::string& title, const std::string& xlabel, const std::string& ylabel) {
    const double x0 = left, x1 = width - right;
    const double y0 = height - bottom, y1 = top;
    line(x0, y0, x1, y0, "#444", 1.0);
    line(x0, y0, x0, y1, "#444", 1.0);
    const double xs = nice_step(x_max - x_min);
    for (double t = std::ceil(x_min / xs) * xs; t <= x_max + 1e-9; t += xs) {
      line(px(t), y0, px(t), y0 + 4, "#444", 1.0);
      line(px(t), y0, px(t), y1, "#ddd", 0.5);
      text(px(t), y0 + 18, num(t), "middle", 11.0);
    }
    const double ys = nice_step(y_max - y_min);
    for (double t = std::ceil(y_min / ys) * ys; t <= y_max + 1e-9; t += ys) {
      line(x0 - 4, py(t), x0, py(t), "#444", 1.0);
      line(x0, py(t), x1, py(t), "#ddd", 0.5);
      text(x0 - 8, py(t) + 4, num(t), "end", 11.0);
    }
    text(width / 2.0, 22.0, title, "middle", 14.0, "#111");
    text(width / 2.0, height - 12.0, xlabel, "middle", 12.0);
    body += "<text x=\"16\" y=\"" + num(height / 2.0) +
            "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" fill=\"#333\" "
            "transform=\"rotate(-90 16 " +
            num(height / 2.0) + ")\">" + ylabel + "</text>\n";
  }

  std::string finish() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
           num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) +
           "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body + "</svg>\n";
  }
};

std::string empty_plot(const std::string& title) {
  Canvas c;
  c.set_range(0, 1, 0, 1);
  c.axes(title, "", "");
  c.text(c.width / 2.0, c.height / 2.0, "empty trace", "middle", 14.0, "#777");
  return c.finish();
}

// Red span markers behind a timeline for the steps flagged by the detector.
void alarm_spans(Canvas& c, const sim::SimTrace& trace) {
  const double y0 = c.top, h = c.height - c.top - c.bottom;
  for (const auto& r : trace.steps) {
    if (!r.detector) continue;
    const double w = c.px(c.x_min + (c.x_max - c.x_min) / std::max<size_t>(trace.steps.size(), 1)) -
                     c.px(c.x_min);
    c.rect_px(c.px(r.seconds) - w / 2.0, y0, w, h, "#e4572e", 0.12);
  }
}

}  // namespace

std::string trajectory_svg(const sim::SimTrace& trace, const reach::ControllableFamily& fam) {
  if (trace.steps.empty()) return empty_plot("state trajectory");
  Canvas c;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  std::vector<std::vector<Eigen::Vector2d>> rings;
  for (const auto& p : fam.state_sets) {
    rings.push_back(geom::planar_vertices(p));
    for (const auto& v : rings.back()) {
      xmin = std::min(xmin, v.x());
      xmax = std::max(xmax, v.x());
      ymin = std::min(ymin, v.y());
      ymax = std::max(ymax, v.y());
    }
  }
  for (const auto& r : trace.steps) {
    xmin = std::min(xmin, r.x(0));
    xmax = std::max(xmax, r.x(0));
    ymin = std::min(ymin, r.x(1));
    ymax = std::max(ymax, r.x(1));
  }
  c.set_range(xmin, xmax, ymin, ymax);
  c.axes("state trajectory over the ring family", "x1", "x2");

  for (size_t i = rings.size(); i-- > 0;) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& v : rings[i]) pts.emplace_back(v.x(), v.y());
    c.polyline(pts, i == 0 ? "#2a9d8f" : "#b5c4cc", i == 0 ? 1.6 : 0.9, true);
  }

  std::vector<std::pair<double, double>> path;
  for (const auto& r : trace.steps) path.emplace_back(r.x(0), r.x(1));
  c.polyline(path, "#1d3557", 1.6);
  c.circle(trace.steps.front().x(0), trace.steps.front().x(1), 4.0, "#1d3557");
  for (const auto& r : trace.steps)
    if (r.detector) c.circle(r.x(0), r.x(1), 2.6, "#e4572e");
  c.text(c.width - c.right - 8, c.top + 16, "start &#9679;  alarms &#9679;", "end", 11.0, "#555");
  return c.finish();
}

std::string inputs_svg(const sim::SimTrace& trace) {
  if (trace.steps.empty()) return empty_plot("applied input");
  Canvas c;
  double umin = 1e300, umax = -1e300;
  for (const auto& r : trace.steps) {
    umin = std::min(umin, r.u_applied(0));
    umax = std::max(umax, r.u_applied(0));
  }
  c.set_range(trace.steps.front().seconds, trace.steps.back().seconds, umin, umax);
  c.axes("applied input", "time [s]", "u");
  alarm_spans(c, trace);

  std::vector<std::pair<double, double>> stairs;
  for (const auto& r : trace.steps) {
    if (!stairs.empty()) stairs.emplace_back(r.seconds, stairs.back().second);
    stairs.emplace_back(r.seconds, r.u_applied(0));
  }
  c.polyline(stairs, "#1d3557", 1.4);
  for (const auto& r : trace.steps) {
    if (r.mode == 1) c.circle(r.seconds, r.u_applied(0), 2.4, "#f4a261");
    if (r.mode == 2) c.circle(r.seconds, r.u_applied(0), 2.4, "#e4572e");
  }
  c.text(c.width - c.right - 8, c.top + 16, "held &#9679;  zeroed &#9679;", "end", 11.0, "#555");
  return c.finish();
}

std::string levels_svg(const sim::SimTrace& trace) {
  if (trace.steps.empty()) return empty_plot("ring levels");
  Canvas c;
  int lmax = 1;
  for (const auto& r : trace.steps) lmax = std::max({lmax, r.level, r.i_hat});
  c.set_range(trace.steps.front().seconds, trace.steps.back().seconds, 0.0, lmax);
  c.axes("true and estimated ring levels", "time [s]", "level");
  alarm_spans(c, trace);

  std::vector<std::pair<double, double>> truth, est;
  for (const auto& r : trace.steps) {
    if (!truth.empty()) truth.emplace_back(r.seconds, truth.back().second);
    truth.emplace_back(r.seconds, r.level);
    if (!est.empty()) est.emplace_back(r.seconds, est.back().second);
    est.emplace_back(r.seconds, r.i_hat);
  }
  c.polyline(truth, "#1d3557", 1.6);
  c.polyline(est, "#2a9d8f", 1.4);
  c.text(c.width - c.right - 8, c.top + 16, "true (dark)  estimate (teal)", "end", 11.0, "#555");
  return c.finish();
}

std::string flags_svg(const sim::SimTrace& trace) {
  if (trace.steps.empty()) return empty_plot("defense flags");
  Canvas c;
  c.set_range(trace.steps.front().seconds, trace.steps.back().seconds, 0.0, 4.0);
  c.axes("defense flags", "time [s]", "");
  const char* names[4] = {"re-encrypting", "consequence fail", "command fail", "alarm"};
  for (int lane = 0; lane < 4; ++lane)
    c.text(c.left + 6, c.py(lane + 0.5) + 4, names[lane], "start", 11.0, "#555");
  const double step = trace.steps.size() > 1
                          ? trace.steps[1].seconds - trace.steps[0].seconds
                          : 1.0;
  for (const auto& r : trace.steps) {
    const bool on[4] = {r.status != 0, !r.post_ok, !r.pre_ok, r.detector};
    const char* colors[4] = {"#8d99ae", "#9b2226", "#bb3e03", "#e4572e"};
    for (int lane = 0; lane < 4; ++lane) {
      if (!on[lane]) continue;
      const double x = c.px(r.seconds - step / 2.0);
      const double w = c.px(r.seconds + step / 2.0) - x;
      c.rect_px(x, c.py(lane + 0.85), w, c.py(lane + 0.15) - c.py(lane + 0.85), colors[lane], 0.85);
    }
  }
  return c.finish();
}

void emit_plots(const sim::SimTrace& trace, const reach::ControllableFamily& fam,
                const std::string& dir) {
  std::filesystem::create_directories(dir);
  sim::write_file(dir + "/trajectory.svg", trajectory_svg(trace, fam));
  sim::write_file(dir + "/inputs.svg", inputs_svg(trace));
  sim::write_file(dir + "/levels.svg", levels_svg(trace));
  sim::write_file(dir + "/flags.svg", flags_svg(trace));
}

}  // namespace strhc::plot
