#include "amwu/harness/report.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace amwu::harness {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string csv_header(const Shape& shape) {
  std::string h = "t,f,grad_norm";
  for (std::size_t b = 0; b < shape.size(); ++b) {
    for (Index i = 0; i < shape[b]; ++i) h += fmt::format(",x{}_{}", b, i);
  }
  return h;
}

std::string trace_csv(const Trace& trace, const Shape& shape) {
  std::string out = csv_header(shape);
  out += '\n';
  for (const auto& r : trace.records) {
    out += fmt::format("{},{},{}", r.t, num(r.f_value), num(r.grad_norm));
    if (r.x) {
      const Vector x = r.x->flatten();
      for (Index i = 0; i < x.size(); ++i) {
        out += ',';
        out += num(x[i]);
      }
    }
    out += '\n';
  }
  return out;
}

std::string git_blob_hash(const std::string& content) {
  std::string data = fmt::format("blob {}", content.size());
  data.push_back('\0');
  data += content;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr) != 1) {
    throw std::runtime_error("SHA-1 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

nlohmann::json schedule_trace_json(const Trace& trace) {
  auto rows = nlohmann::json::array();
  for (const auto& r : trace.records) {
    if (r.schedules.empty()) continue;
    auto agents = nlohmann::json::array();
    for (const auto& s : r.schedules) agents.push_back({{"s", s.s}, {"gamma", s.gamma}, {"gamma_bar", s.gamma_bar}});
    rows.push_back({{"t", r.t}, {"agents", agents}});
  }
  return rows;
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string polyline(const std::vector<std::pair<double, double>>& pts, const char* color) {
  std::string s = fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"", color);
  for (const auto& [x, y] : pts) s += fmt::format("{:.2f},{:.2f} ", x, y);
  s += "\"/>\n";
  return s;
}

}  // namespace

std::string svg_chart(const std::string& title, const std::vector<Series>& series, const std::string& metadata) {
  const bool tri = !series.empty() && std::all_of(series.begin(), series.end(), [](const Series& s) {
    return !s.points.empty() && s.points.front().size() == 3;
  });
  const double pw = 520, ph = 360, m = 50;
  const double width = tri ? 2 * pw : pw;

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"11\">\n",
      width, ph + 40);
  svg += "<metadata>" + escape(metadata) + "</metadata>\n";
  svg += fmt::format("<text x=\"{}\" y=\"18\" font-size=\"14\">{}</text>\n", m, escape(title));

  double tmax = 1, fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      tmax = std::max(tmax, s.t[i]);
      if (std::isfinite(s.f[i])) {
        fmin = std::min(fmin, s.f[i]);
        fmax = std::max(fmax, s.f[i]);
      }
    }
  }
  if (!std::isfinite(fmin)) fmin = fmax = 0;
  if (fmax - fmin < 1e-300) fmax = fmin + 1;
  const double x0 = m, x1 = pw - 20, y0 = ph, y1 = 40;
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\"/>\n", x0, y1,
                     x1 - x0, y0 - y1);
  svg += fmt::format("<text x=\"{}\" y=\"{}\">t = {}</text>\n", x1 - 60, y0 + 16, tmax);
  svg += fmt::format("<text x=\"4\" y=\"{}\">{:.4g}</text>\n", y1 + 4, fmax);
  svg += fmt::format("<text x=\"4\" y=\"{}\">{:.4g}</text>\n", y0, fmin);

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % std::size(kColors)];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < series[k].t.size(); ++i) {
      if (!std::isfinite(series[k].f[i])) continue;
      pts.emplace_back(x0 + (x1 - x0) * series[k].t[i] / tmax, y0 - (y0 - y1) * (series[k].f[i] - fmin) / (fmax - fmin));
    }
    svg += polyline(pts, color);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", x1 - 120, y1 + 16 + 14 * k, color,
                       escape(series[k].label));
  }

  if (tri) {
    // Vertices e1, e2, e3 of the 2-simplex.
    const double ox = pw + 40, side = pw - 80, top = 50;
    const double h = side * std::sqrt(3.0) / 2;
    const std::pair<double, double> v[3] = {{ox, top + h}, {ox + side, top + h}, {ox + side / 2, top}};
    svg += fmt::format("<polygon fill=\"none\" stroke=\"#999\" points=\"{},{} {},{} {},{}\"/>\n", v[0].first,
                       v[0].second, v[1].first, v[1].second, v[2].first, v[2].second);
    const char* names[3] = {"x", "y", "z"};
    for (int i = 0; i < 3; ++i) {
      svg += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", v[i].first - 4, v[i].second + (i == 2 ? -6 : 14),
                         names[i]);
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& p : series[k].points) {
        pts.emplace_back(p[0] * v[0].first + p[1] * v[1].first + p[2] * v[2].first,
                         p[0] * v[0].second + p[1] * v[1].second + p[2] * v[2].second);
      }
      svg += polyline(pts, kColors[k % std::size(kColors)]);
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace amwu::harness
