#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "ixbandit/runner.hpp"

namespace ixbandit {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

// Quotes a field when it holds a comma, quote or line break.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_raw_csv(const std::vector<RegretRow>& rows, std::ostream& out) {
  out << "policy,multiplier,checkpoint,run,regret\n";
  for (const auto& r : rows) {
    out << csv_field(r.policy) << ',' << format_number(r.multiplier) << ','
        << r.checkpoint << ',' << r.run << ',' << format_number(r.regret) << '\n';
  }
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows,
                         std::ostream& out) {
  out << "policy,multiplier,checkpoint,mean,std,n\n";
  for (const auto& r : rows) {
    out << csv_field(r.policy) << ',' << format_number(r.multiplier) << ','
        << r.checkpoint << ',' << format_number(r.mean) << ',' << format_number(r.std) << ','
        << r.n << '\n';
  }
}

namespace {

// Splits one CSV record; "" inside a quoted field is a literal quote.
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

template <class T>
T parse_field(const std::string& text, const std::string& where) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError(where + ": cannot parse '" + text + "'");
  }
  return value;
}

template <class Row, class Fn>
std::vector<Row> parse_rows(std::istream& in, const std::string& source,
                            const std::string& header, Fn&& make) {
  std::vector<Row> rows;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ConfigError(source + ": empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw ConfigError(source + ":1: expected header '" + header + "'");
  }
  const std::size_t columns = split(header).size();
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    const std::string where = source + ":" + std::to_string(lineno);
    if (cells.size() != columns) {
      throw ConfigError(where + ": expected " + std::to_string(columns) +
                        " fields, found " + std::to_string(cells.size()));
    }
    rows.push_back(make(cells, where));
  }
  return rows;
}

void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  body(out);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::vector<RegretRow> parse_raw_csv(std::istream& in, const std::string& source) {
  return parse_rows<RegretRow>(
      in, source, "policy,multiplier,checkpoint,run,regret",
      [](const std::vector<std::string>& c, const std::string& where) {
        return RegretRow{c[0], parse_field<double>(c[1], where),
                         parse_field<std::size_t>(c[2], where),
                         parse_field<std::size_t>(c[3], where),
                         parse_field<double>(c[4], where)};
      });
}

std::vector<AggregateRow> parse_aggregate_csv(std::istream& in,
                                              const std::string& source) {
  return parse_rows<AggregateRow>(
      in, source, "policy,multiplier,checkpoint,mean,std,n",
      [](const std::vector<std::string>& c, const std::string& where) {
        return AggregateRow{c[0], parse_field<double>(c[1], where),
                            parse_field<std::size_t>(c[2], where),
                            parse_field<double>(c[3], where),
                            parse_field<double>(c[4], where),
                            parse_field<std::size_t>(c[5], where)};
      });
}

std::vector<std::filesystem::path> emit_csv(const RunSummary& summary,
                                            const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  written.push_back(dir / "regret_raw.csv");
  write_file(written.back(), [&](std::ostream& o) { write_raw_csv(summary.raw, o); });
  written.push_back(dir / "regret_summary.csv");
  write_file(written.back(),
             [&](std::ostream& o) { write_aggregate_csv(summary.aggregate, o); });
  if (!summary.pseudo.empty()) {
    written.push_back(dir / "pseudo_regret_raw.csv");
    write_file(written.back(),
               [&](std::ostream& o) { write_raw_csv(summary.pseudo, o); });
  }
  return written;
}

// --- SVG ------------------------------------------------------------------

namespace {

constexpr double kPanelW = 460.0;
constexpr double kPanelH = 340.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr double kLegendH = 30.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

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

std::string fixed(double v, int digits = 2) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

// About five round tick values covering [lo, hi].
std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
    ticks.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  }
  return ticks;
}

}  // namespace

std::string render_plot(const RunSummary& summary) {
  if (summary.aggregate.empty()) throw ConfigError("cannot plot an empty summary");
  std::vector<std::string> policies;
  std::vector<std::size_t> checkpoints;
  for (const auto& a : summary.aggregate) {
    if (std::find(policies.begin(), policies.end(), a.policy) == policies.end()) {
      policies.push_back(a.policy);
    }
    if (std::find(checkpoints.begin(), checkpoints.end(), a.checkpoint) ==
        checkpoints.end()) {
      checkpoints.push_back(a.checkpoint);
    }
  }
  std::sort(checkpoints.begin(), checkpoints.end());

  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = 0.0, y_hi = -INFINITY;
  for (const auto& a : summary.aggregate) {
    x_lo = std::min(x_lo, std::log10(a.multiplier));
    x_hi = std::max(x_hi, std::log10(a.multiplier));
    y_lo = std::min(y_lo, a.mean - a.std);
    y_hi = std::max(y_hi, a.mean + a.std);
  }
  x_lo = std::floor(x_lo * 2.0 - 1e-9) / 2.0 - 0.25;
  x_hi = std::ceil(x_hi * 2.0 + 1e-9) / 2.0 + 0.25;
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;
  const double y_pad = 0.05 * (y_hi - y_lo);
  y_hi += y_pad;
  if (y_lo < 0.0) y_lo -= y_pad;

  const double plot_w = kPanelW - kLeft - kRight;
  const double plot_h = kPanelH - kTop - kBottom;
  const double width = kPanelW * static_cast<double>(checkpoints.size());
  const double height = kPanelH + kLegendH;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0)
      << "\" height=\"" << fixed(height, 0) << "\" viewBox=\"0 0 " << fixed(width, 0)
      << ' ' << fixed(height, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    const double ox = kPanelW * static_cast<double>(c);
    auto px = [&](double m) {
      return ox + kLeft + (std::log10(m) - x_lo) / (x_hi - x_lo) * plot_w;
    };
    auto py = [&](double v) {
      return kTop + (1.0 - (v - y_lo) / (y_hi - y_lo)) * plot_h;
    };
    svg << "<g class=\"panel\">\n";
    svg << "<text x=\"" << fixed(ox + kLeft + plot_w / 2) << "\" y=\"24\" "
        << "text-anchor=\"middle\" font-size=\"14\">regret at t = "
        << checkpoints[c] << "</text>\n";
    svg << "<rect x=\"" << fixed(ox + kLeft) << "\" y=\"" << fixed(kTop)
        << "\" width=\"" << fixed(plot_w) << "\" height=\"" << fixed(plot_h)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int e = static_cast<int>(std::ceil(x_lo)); e <= std::floor(x_hi); ++e) {
      const double x = px(std::pow(10.0, e));
      svg << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(kTop + plot_h)
          << "\" x2=\"" << fixed(x) << "\" y2=\"" << fixed(kTop + plot_h + 5)
          << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(kTop + plot_h + 18)
          << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
    }
    for (double v : linear_ticks(y_lo, y_hi)) {
      const double y = py(v);
      svg << "<line x1=\"" << fixed(ox + kLeft - 5) << "\" y1=\"" << fixed(y)
          << "\" x2=\"" << fixed(ox + kLeft) << "\" y2=\"" << fixed(y)
          << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << fixed(ox + kLeft - 8) << "\" y=\"" << fixed(y + 4)
          << "\" text-anchor=\"end\">" << format_number(v) << "</text>\n";
    }
    svg << "<text x=\"" << fixed(ox + kLeft + plot_w / 2) << "\" y=\""
        << fixed(kTop + plot_h + 38) << "\" text-anchor=\"middle\">multiplier</text>\n";

    for (std::size_t p = 0; p < policies.size(); ++p) {
      const char* color = kPalette[p % std::size(kPalette)];
      std::vector<const AggregateRow*> pts;
      for (const auto& a : summary.aggregate) {
        if (a.policy == policies[p] && a.checkpoint == checkpoints[c]) pts.push_back(&a);
      }
      std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) {
        return a->multiplier < b->multiplier;
      });
      svg << "<g class=\"series\" data-policy=\"" << xml_escape(policies[p])
          << "\" stroke=\"" << color << "\" fill=\"" << color << "\">\n";
      if (pts.size() > 1) {
        svg << "<polyline fill=\"none\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
          svg << (i ? " " : "") << fixed(px(pts[i]->multiplier)) << ','
              << fixed(py(pts[i]->mean));
        }
        svg << "\"/>\n";
      }
      for (const auto* a : pts) {
        const double x = px(a->multiplier);
        svg << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(py(a->mean - a->std))
            << "\" x2=\"" << fixed(x) << "\" y2=\"" << fixed(py(a->mean + a->std))
            << "\"/>\n";
        svg << "<circle class=\"marker\" cx=\"" << fixed(x) << "\" cy=\""
            << fixed(py(a->mean)) << "\" r=\"3\"/>\n";
      }
      svg << "</g>\n";
    }
    svg << "</g>\n";
  }

  double lx = kLeft;
  const double ly = kPanelH + kLegendH / 2;
  for (std::size_t p = 0; p < policies.size(); ++p) {
    const char* color = kPalette[p % std::size(kPalette)];
    svg << "<rect x=\"" << fixed(lx) << "\" y=\"" << fixed(ly - 8)
        << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << fixed(lx + 18) << "\" y=\"" << fixed(ly + 2) << "\">"
        << xml_escape(policies[p]) << "</text>\n";
    lx += 30.0 + 8.0 * static_cast<double>(policies[p].size());
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const RunSummary& summary, const std::filesystem::path& path) {
  const std::string svg = render_plot(summary);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  write_file(path, [&](std::ostream& o) { o << svg; });
}

}  // namespace ixbandit
