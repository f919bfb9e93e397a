#include "mosqopt/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mosqopt/errors.hpp"

namespace mosqopt {

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

namespace {

std::string format_axis(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF on every platform
  if (!out) throw Error("cannot open output file: " + path);
  return out;
}

void write_table(std::ofstream& out, const Trajectory& traj, char sep) {
  const auto cols = trajectory_columns(traj.model);
  for (size_t i = 0; i < cols.size(); ++i) {
    if (i) out << sep;
    out << cols[i];
  }
  out << '\n';
  const int n = traj.grid.N();
  for (int k = 0; k <= n; ++k) {
    out << format_full(traj.grid.node(k));
    const StateVec& x = traj.states[k];
    for (int i = 0; i < x.dim(); ++i) out << sep << format_full(x[i]);
    out << sep << format_full(traj.control.value(k < n ? k : n - 1));
    out << '\n';
  }
}

void write_control_table(std::ofstream& out, const ControlGrid& u, char sep) {
  out << 't' << sep << 'u' << '\n';
  const int n = u.grid().N();
  for (int k = 0; k <= n; ++k) {
    out << format_full(u.grid().node(k)) << sep
        << format_full(u.value(k < n ? k : n - 1)) << '\n';
  }
}

}  // namespace

std::vector<std::string> trajectory_columns(Model model) {
  if (model == Model::kSit) return {"t", "E", "F", "Ms", "u"};
  return {"t", "Eu", "Fu", "Ei", "Fi", "u"};
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  auto out = open_out(path);
  write_table(out, traj, ',');
}

void write_control_csv(const std::string& path, const ControlGrid& u) {
  auto out = open_out(path);
  write_control_table(out, u, ',');
}

void write_trajectory_dat(const std::string& path, const Trajectory& traj) {
  auto out = open_out(path);
  write_table(out, traj, ' ');
}

void write_control_dat(const std::string& path, const ControlGrid& u) {
  auto out = open_out(path);
  write_control_table(out, u, ' ');
}

namespace {

constexpr int kPanelW = 640, kPanelH = 160, kMarginL = 70, kMarginR = 20;
constexpr int kMarginT = 28, kMarginB = 30;

struct Series {
  std::string name;
  std::vector<double> y;
};

void svg_panel(std::ofstream& out, int x0, int y0, const std::string& title,
               const std::vector<double>& t, const std::vector<Series>& series,
               bool bars) {
  static const char* palette[] = {"#1f6fb2", "#c44e52", "#55a868", "#8172b2"};
  double ymin = 0.0, ymax = 0.0;
  for (const auto& s : series)
    for (double v : s.y) {
      ymin = std::fmin(ymin, v);
      ymax = std::fmax(ymax, v);
    }
  if (ymax == ymin) ymax = ymin + 1.0;
  const double tmax = t.back() > t.front() ? t.back() : t.front() + 1.0;
  const int plot_w = kPanelW - kMarginL - kMarginR;
  const int plot_h = kPanelH - kMarginT - kMarginB;
  auto px = [&](double tv) { return x0 + kMarginL + plot_w * (tv - t.front()) / (tmax - t.front()); };
  auto py = [&](double yv) { return y0 + kMarginT + plot_h * (1.0 - (yv - ymin) / (ymax - ymin)); };

  out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect x=\"" << x0 + kMarginL << "\" y=\"" << y0 + kMarginT
      << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  out << "<text x=\"" << x0 + kMarginL << "\" y=\"" << y0 + kMarginT - 8
      << "\">" << title << "</text>\n";
  out << "<text x=\"" << x0 + 8 << "\" y=\"" << py(ymax) + 4 << "\">"
      << format_axis(ymax) << "</text>\n";
  out << "<text x=\"" << x0 + 8 << "\" y=\"" << py(ymin) + 4 << "\">"
      << format_axis(ymin) << "</text>\n";
  out << "<text x=\"" << px(tmax) - 10 << "\" y=\"" << y0 + kPanelH - 8 << "\">"
      << format_axis(tmax) << "</text>\n";
  if (ymin < 0.0 && ymax > 0.0) {
    out << "<line x1=\"" << px(t.front()) << "\" y1=\"" << py(0.0) << "\" x2=\""
        << px(tmax) << "\" y2=\"" << py(0.0)
        << "\" stroke=\"#bbb\" stroke-dasharray=\"3,3\"/>\n";
  }
  int ci = 0;
  for (const auto& s : series) {
    const char* color = palette[ci % 4];
    if (bars) {
      for (size_t k = 0; k + 1 < t.size(); ++k) {
        double x = px(t[k]);
        double w = px(t[k + 1]) - x;
        double yb = py(0.0 < ymin ? ymin : 0.0);
        double yt = py(s.y[k]);
        out << "<rect x=\"" << x << "\" y=\"" << std::fmin(yt, yb)
            << "\" width=\"" << w << "\" height=\"" << std::fabs(yb - yt)
            << "\" fill=\"" << color << "\" fill-opacity=\"0.7\"/>\n";
      }
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (size_t k = 0; k < t.size(); ++k) {
        out << px(t[k]) << ',' << py(s.y[k]) << ' ';
      }
      out << "\"/>\n";
    }
    out << "<text x=\"" << x0 + kPanelW - kMarginR - 60 << "\" y=\""
        << y0 + kMarginT + 14 + 13 * ci << "\" fill=\"" << color << "\">"
        << s.name << "</text>\n";
    ++ci;
  }
  out << "</g>\n";
}

std::vector<double> nodes_of(const TimeGrid& g) {
  std::vector<double> t(g.N() + 1);
  for (int k = 0; k <= g.N(); ++k) t[k] = g.node(k);
  return t;
}

std::vector<double> control_steps(const ControlGrid& u) {
  std::vector<double> v(u.grid().N() + 1);
  for (int k = 0; k < u.grid().N(); ++k) v[k] = u.value(k);
  v[u.grid().N()] = u.value(u.grid().N() - 1);
  return v;
}

}  // namespace

void write_simulation_svg(const std::string& path, const Trajectory& traj) {
  const auto cols = trajectory_columns(traj.model);
  const int dim = state_dim(traj.model);
  const int panels = dim + 1;
  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPanelW
      << "\" height=\"" << panels * kPanelH << "\">\n";
  auto t = nodes_of(traj.grid);
  for (int i = 0; i < dim; ++i) {
    Series s{cols[i + 1], {}};
    s.y.resize(t.size());
    for (size_t k = 0; k < t.size(); ++k) s.y[k] = traj.states[k][i];
    svg_panel(out, 0, i * kPanelH, cols[i + 1] + " (t in days)", t, {s}, false);
  }
  Series uc{"u", control_steps(traj.control)};
  svg_panel(out, 0, dim * kPanelH, "release rate u", t, {uc}, true);
  out << "</svg>\n";
}

void write_solution_svg(const std::string& path, const Trajectory& traj) {
  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPanelW
      << "\" height=\"" << 2 * kPanelH << "\">\n";
  auto t = nodes_of(traj.grid);
  Series uc{"u", control_steps(traj.control)};
  svg_panel(out, 0, 0, "optimal release rate", t, {uc}, true);
  const auto cols = trajectory_columns(traj.model);
  std::vector<Series> st;
  for (int i = 0; i < state_dim(traj.model); ++i) {
    Series s{cols[i + 1], {}};
    s.y.resize(t.size());
    for (size_t k = 0; k < t.size(); ++k) s.y[k] = traj.states[k][i];
    st.push_back(std::move(s));
  }
  svg_panel(out, 0, kPanelH, "state trajectories", t, st, false);
  out << "</svg>\n";
}

}  // namespace mosqopt
