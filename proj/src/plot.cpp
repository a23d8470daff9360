#include "adausm/plot.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "adausm/textutil.hpp"

namespace adausm {

namespace {

const char* kPalette[8] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0, hi = 1.0;
  void widen(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

// Tick label values stay short: shortest round-trip of a 3-significant-digit
// rounding keeps axis text readable.
std::string tick_label(double v) {
  if (v == 0.0) return "0";
  double mag = std::pow(10.0, std::floor(std::log10(std::fabs(v))) - 2);
  return fmt_double(std::round(v / mag) * mag);
}

}  // namespace

std::string render_svg(std::span<const PlotSeries> series, const PlotOptions& opt) {
  struct Pt {
    double x, y;
  };
  struct Drawable {
    std::string label;
    std::vector<Pt> pts;
  };
  std::vector<Drawable> draw;
  bool have_range = false;
  Range xr, yr;
  for (const auto& s : series) {
    Drawable d;
    d.label = s.label;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      double px = s.x[i], py = s.y[i];
      if (!std::isfinite(px) || !std::isfinite(py)) continue;
      if (opt.log_x) {
        if (!(px > 0.0)) continue;
        px = std::log10(px);
      }
      if (opt.log_y) {
        if (!(py > 0.0)) continue;
        py = std::log10(py);
      }
      if (!have_range) {
        xr = {px, px};
        yr = {py, py};
        have_range = true;
      } else {
        xr.widen(px);
        yr.widen(py);
      }
      d.pts.push_back({px, py});
    }
    if (!d.pts.empty()) draw.push_back(std::move(d));
  }
  if (draw.empty()) throw std::invalid_argument("nothing to plot");
  if (xr.hi - xr.lo < 1e-300) {
    xr.lo -= 0.5;
    xr.hi += 0.5;
  }
  if (yr.hi - yr.lo < 1e-300) {
    yr.lo -= 0.5;
    yr.hi += 0.5;
  }

  const double W = opt.width, H = opt.height;
  const double ml = 70, mr = 20, mt = 30, mb = 45;
  auto sx = [&](double v) { return ml + (v - xr.lo) / (xr.hi - xr.lo) * (W - ml - mr); };
  auto sy = [&](double v) { return H - mb - (v - yr.lo) / (yr.hi - yr.lo) * (H - mt - mb); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_int(opt.width) +
         "\" height=\"" + fmt_int(opt.height) + "\" viewBox=\"0 0 " + fmt_int(opt.width) +
         " " + fmt_int(opt.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    svg += "<text x=\"" + fmt_double(W / 2) +
           "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">" +
           xml_escape(opt.title) + "</text>\n";

  const int ticks = 5;
  for (int i = 0; i < ticks; ++i) {
    double fx = xr.lo + (xr.hi - xr.lo) * i / (ticks - 1);
    double fy = yr.lo + (yr.hi - yr.lo) * i / (ticks - 1);
    double px = sx(fx), py = sy(fy);
    svg += "<line x1=\"" + fmt_double(px) + "\" y1=\"" + fmt_double(mt) + "\" x2=\"" +
           fmt_double(px) + "\" y2=\"" + fmt_double(H - mb) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + fmt_double(ml) + "\" y1=\"" + fmt_double(py) + "\" x2=\"" +
           fmt_double(W - mr) + "\" y2=\"" + fmt_double(py) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt_double(px) + "\" y=\"" + fmt_double(H - mb + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           tick_label(fx) + "</text>\n";
    svg += "<text x=\"" + fmt_double(ml - 6) + "\" y=\"" + fmt_double(py + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           tick_label(fy) + "</text>\n";
  }
  svg += "<rect x=\"" + fmt_double(ml) + "\" y=\"" + fmt_double(mt) + "\" width=\"" +
         fmt_double(W - ml - mr) + "\" height=\"" + fmt_double(H - mt - mb) +
         "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  std::string xlabel = opt.log_x ? "log10(" + opt.xlabel + ")" : opt.xlabel;
  std::string ylabel = opt.log_y ? "log10(" + opt.ylabel + ")" : opt.ylabel;
  svg += "<text x=\"" + fmt_double((ml + W - mr) / 2) + "\" y=\"" + fmt_double(H - 8) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         xml_escape(xlabel) + "</text>\n";
  if (!ylabel.empty())
    svg += "<text x=\"14\" y=\"" + fmt_double((mt + H - mb) / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 14 " +
           fmt_double((mt + H - mb) / 2) + ")\">" + xml_escape(ylabel) + "</text>\n";

  for (std::size_t i = 0; i < draw.size(); ++i) {
    const char* color = kPalette[i % 8];
    std::string pts;
    for (const auto& p : draw[i].pts) {
      if (!pts.empty()) pts += " ";
      pts += fmt_double(sx(p.x)) + "," + fmt_double(sy(p.y));
    }
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";
  }

  for (std::size_t i = 0; i < draw.size(); ++i) {
    const char* color = kPalette[i % 8];
    double ly = mt + 14 + 16 * double(i);
    double lx = W - mr - 170;
    svg += "<line x1=\"" + fmt_double(lx) + "\" y1=\"" + fmt_double(ly - 4) + "\" x2=\"" +
           fmt_double(lx + 22) + "\" y2=\"" + fmt_double(ly - 4) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt_double(lx + 28) + "\" y=\"" + fmt_double(ly) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + xml_escape(draw[i].label) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_table(std::span<const PlotSeries> series, const PlotOptions& opt) {
  std::map<double, std::vector<std::string>> rows;  // x -> one cell per series
  std::size_t ns = series.size();
  bool any = false;
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < series[i].x.size() && j < series[i].y.size(); ++j) {
      auto& cells = rows[series[i].x[j]];
      cells.resize(ns, "-");
      cells[i] = fmt_double(series[i].y[j]);
      any = true;
    }
  }
  if (!any) throw std::invalid_argument("nothing to tabulate");

  std::vector<std::string> header;
  header.push_back(opt.xlabel);
  for (const auto& s : series) header.push_back(s.label.empty() ? "series" : s.label);

  std::vector<std::vector<std::string>> grid;
  grid.push_back(header);
  for (const auto& [x, cells] : rows) {
    std::vector<std::string> row;
    row.push_back(fmt_double(x));
    for (std::size_t i = 0; i < ns; ++i) row.push_back(i < cells.size() ? cells[i] : "-");
    grid.push_back(row);
  }

  std::vector<std::size_t> width(ns + 1, 0);
  for (const auto& row : grid)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

  std::string out;
  if (!opt.title.empty()) out += opt.title + "\n";
  for (const auto& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += "  ";
      out += row[c];
      out.append(width[c] - row[c].size(), ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += "\n";
  }
  return out;
}

}  // namespace adausm
