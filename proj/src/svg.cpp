#include "matpca/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace matpca {

namespace {

std::string fmt(double v, int decimals = 2) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string fmtg(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct Frame {
  double x0, y0, w, h;      // pixel box of the plotting area
  double xmin, xmax, ymin, ymax;

  double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
  double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

void open_svg(std::ostringstream& out, int w, int h) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
      << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
      << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"#ffffff\"/>\n";
}

void draw_axes(std::ostringstream& out, const Frame& f, const std::string& xlab,
               const std::string& ylab, int ticks = 5) {
  out << "<rect x=\"" << fmt(f.x0) << "\" y=\"" << fmt(f.y0) << "\" width=\""
      << fmt(f.w) << "\" height=\"" << fmt(f.h)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  for (int t = 0; t <= ticks; ++t) {
    double xv = f.xmin + (f.xmax - f.xmin) * t / ticks;
    double yv = f.ymin + (f.ymax - f.ymin) * t / ticks;
    double xp = f.px(xv);
    double yp = f.py(yv);
    out << "<line x1=\"" << fmt(xp) << "\" y1=\"" << fmt(f.y0 + f.h) << "\" x2=\""
        << fmt(xp) << "\" y2=\"" << fmt(f.y0 + f.h + 4)
        << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt(xp) << "\" y=\"" << fmt(f.y0 + f.h + 16)
        << "\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"middle\">"
        << fmtg(xv) << "</text>\n";
    out << "<line x1=\"" << fmt(f.x0 - 4) << "\" y1=\"" << fmt(yp) << "\" x2=\""
        << fmt(f.x0) << "\" y2=\"" << fmt(yp)
        << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt(f.x0 - 6) << "\" y=\"" << fmt(yp + 3)
        << "\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"end\">"
        << fmtg(yv) << "</text>\n";
  }
  out << "<text x=\"" << fmt(f.x0 + f.w / 2) << "\" y=\"" << fmt(f.y0 + f.h + 32)
      << "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">" << xlab
      << "</text>\n";
  out << "<text x=\"" << fmt(f.x0 - 44) << "\" y=\"" << fmt(f.y0 + f.h / 2)
      << "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\""
      << " transform=\"rotate(-90 " << fmt(f.x0 - 44) << ' ' << fmt(f.y0 + f.h / 2)
      << ")\">" << ylab << "</text>\n";
}

void marker(std::ostringstream& out, SodaLabel label, double x, double y) {
  switch (label) {
    case SodaLabel::kRegular:
      out << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y)
          << "\" r=\"2.5\" fill=\"#7f8fa6\" fill-opacity=\"0.8\"/>\n";
      break;
    case SodaLabel::kGoodLeverage:
      out << "<rect x=\"" << fmt(x - 3) << "\" y=\"" << fmt(y - 3)
          << "\" width=\"6\" height=\"6\" fill=\"#2f9e44\"/>\n";
      break;
    case SodaLabel::kOrthogonalOutlier:
      out << "<path d=\"M " << fmt(x) << ' ' << fmt(y - 4) << " L " << fmt(x + 4) << ' '
          << fmt(y) << " L " << fmt(x) << ' ' << fmt(y + 4) << " L " << fmt(x - 4) << ' '
          << fmt(y) << " Z\" fill=\"#e8590c\"/>\n";
      break;
    case SodaLabel::kBadLeverage:
      out << "<path d=\"M " << fmt(x - 3.5) << ' ' << fmt(y - 3.5) << " L "
          << fmt(x + 3.5) << ' ' << fmt(y + 3.5) << " M " << fmt(x - 3.5) << ' '
          << fmt(y + 3.5) << " L " << fmt(x + 3.5) << ' ' << fmt(y - 3.5)
          << "\" stroke=\"#c92a2a\" stroke-width=\"2\" fill=\"none\"/>\n";
      break;
  }
}

}  // namespace

std::string soda_plot_svg(const SodaReport& report) {
  const int W = 640, H = 480;
  double sd_max = report.sd_cut, od_max = report.od_cut;
  for (double v : report.sd) sd_max = std::max(sd_max, v);
  for (double v : report.od) od_max = std::max(od_max, v);
  Frame f{64, 40, W - 64 - 160.0, H - 40 - 56.0, 0.0, sd_max * 1.06 + 1e-12, 0.0,
          od_max * 1.06 + 1e-12};

  std::ostringstream out;
  open_svg(out, W, H);
  out << "<text x=\"" << fmt(f.x0) << "\" y=\"24\" font-family=\"monospace\""
      << " font-size=\"14\">SD/OD diagnostic plot</text>\n";
  draw_axes(out, f, "score distance",
            report.convention == OdConvention::kSquared
                ? "orthogonal distance (squared)"
                : "orthogonal distance");

  // threshold lines
  out << "<line x1=\"" << fmt(f.px(report.sd_cut)) << "\" y1=\"" << fmt(f.y0)
      << "\" x2=\"" << fmt(f.px(report.sd_cut)) << "\" y2=\"" << fmt(f.y0 + f.h)
      << "\" stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"5,4\"/>\n";
  out << "<line x1=\"" << fmt(f.x0) << "\" y1=\"" << fmt(f.py(report.od_cut))
      << "\" x2=\"" << fmt(f.x0 + f.w) << "\" y2=\"" << fmt(f.py(report.od_cut))
      << "\" stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"5,4\"/>\n";

  for (std::size_t i = 0; i < report.sd.size(); ++i)
    marker(out, report.labels[i], f.px(report.sd[i]), f.py(report.od[i]));

  // legend
  const char* names[4] = {"regular", "good_leverage", "orthogonal_outlier",
                          "bad_leverage"};
  const SodaLabel order[4] = {SodaLabel::kRegular, SodaLabel::kGoodLeverage,
                              SodaLabel::kOrthogonalOutlier, SodaLabel::kBadLeverage};
  for (int k = 0; k < 4; ++k) {
    double lx = f.x0 + f.w + 18, ly = f.y0 + 16 + 20.0 * k;
    marker(out, order[k], lx, ly);
    out << "<text x=\"" << fmt(lx + 10) << "\" y=\"" << fmt(ly + 3)
        << "\" font-family=\"monospace\" font-size=\"10\">" << names[k] << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string scree_plot_svg(const ScreeData& data) {
  const int W = 760, H = 360;
  std::ostringstream out;
  open_svg(out, W, H);

  struct Panel {
    const Eigen::VectorXd* w;
    int suggested;
    const char* title;
    double x0;
  } panels[2] = {{&data.col_eigenvalues, data.suggested_q_c, "column eigenvalues", 64.0},
                 {&data.row_eigenvalues, data.suggested_q_r, "row eigenvalues", 64.0 + 360.0}};

  for (const Panel& p : panels) {
    const Eigen::VectorXd& w = *p.w;
    const int d = static_cast<int>(w.size());
    double ymax = w.size() ? w.maxCoeff() : 1.0;
    Frame f{p.x0, 48, 280, H - 48 - 56.0, 1.0, std::max(2.0, static_cast<double>(d)),
            0.0, ymax * 1.08 + 1e-12};
    out << "<text x=\"" << fmt(f.x0) << "\" y=\"30\" font-family=\"monospace\""
        << " font-size=\"13\">" << p.title << " (suggested rank " << p.suggested
        << ")</text>\n";
    draw_axes(out, f, "component", "eigenvalue", std::min(5, std::max(1, d - 1)));
    if (d >= 2) {
      out << "<polyline fill=\"none\" stroke=\"#1864ab\" stroke-width=\"1.5\" points=\"";
      for (int k = 0; k < d; ++k) {
        if (k) out << ' ';
        out << fmt(f.px(k + 1.0)) << ',' << fmt(f.py(w(k)));
      }
      out << "\"/>\n";
    }
    for (int k = 0; k < d; ++k)
      out << "<circle cx=\"" << fmt(f.px(k + 1.0)) << "\" cy=\"" << fmt(f.py(w(k)))
          << "\" r=\"3\" fill=\"#1864ab\"/>\n";
    if (p.suggested >= 1 && p.suggested < d) {
      double xp = f.px(p.suggested + 0.5);
      out << "<line x1=\"" << fmt(xp) << "\" y1=\"" << fmt(f.y0) << "\" x2=\"" << fmt(xp)
          << "\" y2=\"" << fmt(f.y0 + f.h)
          << "\" stroke=\"#c92a2a\" stroke-width=\"1\" stroke-dasharray=\"4,4\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string shapley_heatmap_svg(const Eigen::MatrixXd& phi, long id) {
  const int d_c = static_cast<int>(phi.rows());
  const int d_r = static_cast<int>(phi.cols());
  const double cell = 44.0;
  const double x0 = 72.0, y0 = 56.0;
  const int W = static_cast<int>(x0 + d_r * cell + 96);
  const int H = static_cast<int>(y0 + d_c * cell + 40);

  double amax = std::max(phi.cwiseAbs().maxCoeff(), 1e-300);
  double total = phi.sum();

  std::ostringstream out;
  open_svg(out, W, H);
  out << "<text x=\"" << fmt(x0) << "\" y=\"26\" font-family=\"monospace\""
      << " font-size=\"14\">cellwise contributions, observation " << id
      << " (total " << fmtg(total) << ")</text>\n";

  for (int r = 0; r < d_c; ++r) {
    for (int c = 0; c < d_r; ++c) {
      double t = phi(r, c) / amax;  // in [-1, 1]
      // diverging map: blue (negative) - white - red (positive)
      int red, green, blue;
      if (t >= 0) {
        red = 255;
        green = static_cast<int>(std::lround(255 * (1.0 - t)));
        blue = green;
      } else {
        blue = 255;
        green = static_cast<int>(std::lround(255 * (1.0 + t)));
        red = green;
      }
      double px = x0 + c * cell, py = y0 + r * cell;
      out << "<rect x=\"" << fmt(px) << "\" y=\"" << fmt(py) << "\" width=\""
          << fmt(cell) << "\" height=\"" << fmt(cell) << "\" fill=\"rgb(" << red << ','
          << green << ',' << blue << ")\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
      out << "<text x=\"" << fmt(px + cell / 2) << "\" y=\"" << fmt(py + cell / 2 + 3)
          << "\" font-family=\"monospace\" font-size=\"9\" text-anchor=\"middle\">"
          << fmtg(phi(r, c)) << "</text>\n";
    }
  }
  for (int r = 0; r < d_c; ++r)
    out << "<text x=\"" << fmt(x0 - 8) << "\" y=\"" << fmt(y0 + r * cell + cell / 2 + 3)
        << "\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"end\">r" << r
        << "</text>\n";
  for (int c = 0; c < d_r; ++c)
    out << "<text x=\"" << fmt(x0 + c * cell + cell / 2) << "\" y=\"" << fmt(y0 - 8)
        << "\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"middle\">c" << c
        << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace matpca
