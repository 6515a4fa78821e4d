#pragma once

// Table output for resonance runs: CSV, a JSON document, and a static SVG
// scatter plot of the resonances in the complex plane.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cuspres/problem.hpp"

namespace cuspres::report {

inline constexpr const char* kVersion = "cuspres 1.0.0";
inline constexpr const char* kCsvHeader = "k,re_lambda,im_lambda,residual,iterations,seed_re,seed_im";

/// 17 significant digits; parses back to the same double.
inline std::string number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

struct Row {
  Resonance root;
  std::optional<double> lambda_minus_seed_abs;  // funnel runs only
};

inline void write_csv(std::ostream& out, std::span<const Row> rows, bool with_seed_distance) {
  out << kCsvHeader;
  if (with_seed_distance) out << ",lambda_minus_seed_abs";
  out << '\n';
  for (const auto& row : rows) {
    const auto& r = row.root;
    out << r.k << ',' << number(r.lambda.real()) << ',' << number(r.lambda.imag()) << ',' << number(r.residual)
        << ',' << r.iterations << ',' << number(r.seed.real()) << ',' << number(r.seed.imag());
    if (with_seed_distance) out << ',' << number(row.lambda_minus_seed_abs.value_or(NAN));
    out << '\n';
  }
}

inline nlohmann::ordered_json row_json(const Row& row) {
  nlohmann::ordered_json j;
  j["k"] = row.root.k;
  j["re_lambda"] = row.root.lambda.real();
  j["im_lambda"] = row.root.lambda.imag();
  j["residual"] = row.root.residual;
  j["iterations"] = row.root.iterations;
  j["seed_re"] = row.root.seed.real();
  j["seed_im"] = row.root.seed.imag();
  if (row.lambda_minus_seed_abs) j["lambda_minus_seed_abs"] = *row.lambda_minus_seed_abs;
  return j;
}

/// {"meta": meta + version, "rows": [...], "summary": summary}.
inline nlohmann::ordered_json document(nlohmann::ordered_json meta, std::span<const Row> rows,
                                       const nlohmann::ordered_json& summary) {
  meta["version"] = kVersion;
  nlohmann::ordered_json doc;
  doc["meta"] = std::move(meta);
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) doc["rows"].push_back(row_json(row));
  if (!summary.is_null()) doc["summary"] = summary;
  return doc;
}

struct PlotOptions {
  std::string title;
  std::optional<double> reference_im;  // dashed horizontal line, e.g. -b j/2
};

namespace detail {

inline std::string escape_xml(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Roughly five "nice" tick values covering [lo, hi].
inline std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  double step = magnitude;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    step = mult * magnitude;
    if (span / step <= 6.0) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) out.push_back(t);
  return out;
}

inline std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

}  // namespace detail

/// Scatter of (Re lambda, Im lambda) with labelled axes and ticks.
inline void write_svg(std::ostream& out, std::span<const Resonance> roots, const PlotOptions& options) {
  constexpr double width = 720.0, height = 420.0;
  constexpr double left = 70.0, right = 20.0, top = 40.0, bottom = 55.0;
  double x_lo = 0.0, x_hi = 1.0, y_lo = -1.0, y_hi = 0.0;
  if (!roots.empty()) {
    x_lo = x_hi = roots.front().lambda.real();
    y_lo = y_hi = roots.front().lambda.imag();
    for (const auto& r : roots) {
      x_lo = std::min(x_lo, r.lambda.real());
      x_hi = std::max(x_hi, r.lambda.real());
      y_lo = std::min(y_lo, r.lambda.imag());
      y_hi = std::max(y_hi, r.lambda.imag());
    }
  }
  if (options.reference_im) {
    y_lo = std::min(y_lo, *options.reference_im);
    y_hi = std::max(y_hi, *options.reference_im);
  }
  y_hi = std::max(y_hi, 0.0);
  const double x_pad = std::max(1e-9, 0.05 * (x_hi - x_lo)) + (x_hi == x_lo ? 1.0 : 0.0);
  const double y_pad = std::max(1e-9, 0.08 * (y_hi - y_lo)) + (y_hi == y_lo ? 0.5 : 0.0);
  x_lo -= x_pad;
  x_hi += x_pad;
  y_lo -= y_pad;
  y_hi += y_pad;

  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto py = [&](double y) { return top + (y_hi - y) / (y_hi - y_lo) * plot_h; };
  const auto f = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"14\">" << detail::escape_xml(options.title) << "</text>\n";
  }
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : detail::ticks(x_lo, x_hi)) {
    out << "<line x1=\"" << f(px(t)) << "\" y1=\"" << top + plot_h << "\" x2=\"" << f(px(t)) << "\" y2=\""
        << top + plot_h + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << f(px(t)) << "\" y=\"" << top + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << detail::fmt_tick(t)
        << "</text>\n";
  }
  for (double t : detail::ticks(y_lo, y_hi)) {
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << f(py(t)) << "\" x2=\"" << left << "\" y2=\"" << f(py(t))
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << f(py(t) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << detail::fmt_tick(t)
        << "</text>\n";
  }
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">Re λ</text>\n";
  out << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\" transform=\"rotate(-90 18 " << top + plot_h / 2 << ")\">Im λ</text>\n";
  if (options.reference_im) {
    out << "<line class=\"reference\" x1=\"" << left << "\" y1=\"" << f(py(*options.reference_im)) << "\" x2=\""
        << left + plot_w << "\" y2=\"" << f(py(*options.reference_im))
        << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
  }
  for (const auto& r : roots) {
    out << "<circle cx=\"" << f(px(r.lambda.real())) << "\" cy=\"" << f(py(r.lambda.imag()))
        << "\" r=\"2.5\" fill=\"steelblue\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace cuspres::report
