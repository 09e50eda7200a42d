#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "edgecache/experiment.hpp"

namespace edgecache {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string fixed(double v, int digits) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, end);
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

template <class T>
T field(const std::string& text, int line) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("results.csv line " + std::to_string(line) + ": bad field '" +
                                text + "'");
  }
  return v;
}

// Round step for an axis covering [lo, hi] with about five ticks.
double nice_step(double span) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << r.sweep_value << ',' << r.policy << ',' << r.metric << ',' << r.checkpoint << ','
        << fmt(r.mean) << ',' << fmt(r.stderr_) << ',' << r.replications << ',' << r.seed << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw std::invalid_argument("results.csv: unexpected header");
  }
  std::vector<ResultRow> rows;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 8) {
      throw std::invalid_argument("results.csv line " + std::to_string(n) + ": expected 8 fields");
    }
    ResultRow r;
    r.sweep_value = cells[0];
    r.policy = cells[1];
    r.metric = cells[2];
    r.checkpoint = field<std::int64_t>(cells[3], n);
    r.mean = field<double>(cells[4], n);
    r.stderr_ = field<double>(cells[5], n);
    r.replications = field<std::int64_t>(cells[6], n);
    r.seed = field<std::uint64_t>(cells[7], n);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_svg_chart(std::ostream& out, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<Series>& series) {
  constexpr double W = 720, H = 440, L = 70, R = 170, T = 40, B = 55;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 <= x0) x1 = x0 + 1;
  if (y0 > 0 && y0 < 0.5 * y1) y0 = 0;
  if (y1 <= y0) y1 = y0 + 1;
  const double ys = nice_step(y1 - y0);
  y0 = std::floor(y0 / ys) * ys;
  y1 = std::ceil(y1 / ys) * ys;
  const double xs = nice_step(x1 - x0);

  const double pw = W - L - R, ph = H - T - B;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return T + ph - (y - y0) / (y1 - y0) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << L + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape_xml(title) << "</text>\n";

  const int ydig = ys >= 1 ? 0 : static_cast<int>(std::ceil(-std::log10(ys)));
  for (double y = y0; y <= y1 + ys * 1e-6; y += ys) {
    out << "<line x1=\"" << L << "\" x2=\"" << L + pw << "\" y1=\"" << fixed(py(y), 1)
        << "\" y2=\"" << fixed(py(y), 1) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << fixed(py(y) + 4, 1)
        << "\" text-anchor=\"end\">" << fixed(y, ydig) << "</text>\n";
  }
  const int xdig = xs >= 1 ? 0 : static_cast<int>(std::ceil(-std::log10(xs)));
  for (double x = std::ceil(x0 / xs) * xs; x <= x1 + xs * 1e-6; x += xs) {
    out << "<line x1=\"" << fixed(px(x), 1) << "\" x2=\"" << fixed(px(x), 1) << "\" y1=\"" << T
        << "\" y2=\"" << T + ph << "\" stroke=\"#eee\"/>\n";
    out << "<text x=\"" << fixed(px(x), 1) << "\" y=\"" << T + ph + 16
        << "\" text-anchor=\"middle\">" << fixed(x, xdig) << "</text>\n";
  }
  out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
      << escape_xml(x_label) << "</text>\n";
  out << "<text transform=\"translate(16," << T + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << fixed(px(s.x[i]), 1) << ',' << fixed(py(s.y[i]), 1) << ' ';
    }
    out << "\"/>\n";
    if (s.x.size() <= 40) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.y[i])) continue;
        out << "<circle cx=\"" << fixed(px(s.x[i]), 1) << "\" cy=\"" << fixed(py(s.y[i]), 1)
            << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      }
    }
    const double ly = T + 12 + 18.0 * static_cast<double>(k);
    out << "<line x1=\"" << L + pw + 12 << "\" x2=\"" << L + pw + 36 << "\" y1=\"" << ly
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << L + pw + 42 << "\" y=\"" << ly + 4 << "\">" << escape_xml(s.label)
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace edgecache
