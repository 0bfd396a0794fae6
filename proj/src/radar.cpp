#include "mmdd/radar.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace mmdd {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCx = 230.0;
constexpr double kCy = 245.0;
constexpr double kAxisPx = 160.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Axis q points outward from the centre; axis 0 straight up, then clockwise.
std::pair<double, double> axis_point(int q, double radius_px) {
  const double angle = -kPi / 2.0 + 2.0 * kPi * q / kNumModes;
  return {kCx + radius_px * std::cos(angle), kCy + radius_px * std::sin(angle)};
}

}  // namespace

double radar_range(const std::array<double, kNumModes>& profile) {
  double max_abs = 0.0;
  for (double v : profile) max_abs = std::max(max_abs, std::abs(v));
  return std::max(1.0, std::ceil(max_abs));
}

std::array<double, kNumModes> radar_radii(
    const std::array<double, kNumModes>& profile, double range) {
  std::array<double, kNumModes> radii{};
  for (int q = 0; q < kNumModes; ++q) {
    radii[static_cast<std::size_t>(q)] =
        (profile[static_cast<std::size_t>(q)] + range) / (2.0 * range);
  }
  return radii;
}

std::string render_radar(const std::array<double, kNumModes>& profile,
                         const RadarMeta& meta) {
  const double range = radar_range(profile);
  const auto radii = radar_radii(profile, range);

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"460\" "
         "height=\"470\" viewBox=\"0 0 460 470\">\n"
      << "  <rect width=\"460\" height=\"470\" fill=\"white\"/>\n";

  char title[128];
  std::snprintf(title, sizeof(title),
                "Cluster %d — %.1f%% of anomalous hours (n=%zu)",
                meta.cluster_id, 100.0 * meta.share, meta.size);
  svg << "  <text x=\"230\" y=\"28\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";

  // Reference rings: outer (+range), zero (mid), inner dot (-range).
  svg << "  <circle cx=\"" << num(kCx) << "\" cy=\"" << num(kCy) << "\" r=\""
      << num(kAxisPx) << "\" fill=\"none\" stroke=\"#888\"/>\n";
  svg << "  <circle cx=\"" << num(kCx) << "\" cy=\"" << num(kCy) << "\" r=\""
      << num(kAxisPx / 2.0)
      << "\" fill=\"none\" stroke=\"#555\" stroke-dasharray=\"5,4\"/>\n";
  svg << "  <circle cx=\"" << num(kCx) << "\" cy=\"" << num(kCy)
      << "\" r=\"2\" fill=\"#555\"/>\n";

  for (const auto& [ring, label] :
       {std::pair<double, std::string>{kAxisPx, "+" + num(range)},
        {kAxisPx / 2.0, "0"},
        {0.0, "-" + num(range)}}) {
    svg << "  <text x=\"" << num(kCx + 6.0) << "\" y=\"" << num(kCy - ring - 4.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555\">"
        << label << "</text>\n";
  }

  for (int q = 0; q < kNumModes; ++q) {
    const auto [ex, ey] = axis_point(q, kAxisPx);
    svg << "  <line x1=\"" << num(kCx) << "\" y1=\"" << num(kCy) << "\" x2=\""
        << num(ex) << "\" y2=\"" << num(ey) << "\" stroke=\"#ccc\"/>\n";
    const auto [lx, ly] = axis_point(q, kAxisPx + 22.0);
    svg << "  <text x=\"" << num(lx) << "\" y=\"" << num(ly + 4.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">"
        << to_string(static_cast<Mode>(q)) << "</text>\n";
  }

  svg << "  <polygon points=\"";
  for (int q = 0; q < kNumModes; ++q) {
    const auto [px, py] =
        axis_point(q, radii[static_cast<std::size_t>(q)] * kAxisPx);
    if (q > 0) svg << ' ';
    svg << num(px) << ',' << num(py);
  }
  svg << "\" fill=\"#1f77b4\" fill-opacity=\"0.35\" stroke=\"#1f77b4\" "
         "stroke-width=\"2\"/>\n";

  for (int q = 0; q < kNumModes; ++q) {
    const auto [px, py] =
        axis_point(q, radii[static_cast<std::size_t>(q)] * kAxisPx);
    svg << "  <circle cx=\"" << num(px) << "\" cy=\"" << num(py)
        << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    const auto [tx, ty] =
        axis_point(q, radii[static_cast<std::size_t>(q)] * kAxisPx + 12.0);
    svg << "  <text x=\"" << num(tx) << "\" y=\"" << num(ty + 4.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\" fill=\"#1f77b4\">"
        << num(profile[static_cast<std::size_t>(q)]) << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace mmdd
