#include "meso/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace meso {

std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double fit_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3)
    throw std::invalid_argument("fit_slope: need at least 3 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [p, e] : points) {
    if (!(p > 0.0) || !(e > 0.0))
      throw std::invalid_argument("fit_slope: points must be positive");
    const double lx = std::log(p), ly = std::log(e);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = double(points.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void ErrorReport::finalize_slopes() {
  if (rows.size() < 3) return;
  std::vector<std::pair<double, double>> l2, h1;
  bool ok_l2 = true, ok_h1 = true;
  for (const auto& r : rows) {
    l2.emplace_back(r.param, r.l2_rel);
    h1.emplace_back(r.param, r.h1_rel);
    ok_l2 = ok_l2 && r.l2_rel > 0.0 && r.param > 0.0;
    ok_h1 = ok_h1 && r.h1_rel > 0.0 && r.param > 0.0;
  }
  if (ok_l2) l2_slope = fit_slope(l2);
  if (ok_h1) h1_slope = fit_slope(h1);
}

void ErrorReport::write_csv(std::ostream& os) const {
  os << "param,l2_rel,h1_rel,seconds\n";
  for (const auto& r : rows)
    os << format_g12(r.param) << ',' << format_g12(r.l2_rel) << ','
       << format_g12(r.h1_rel) << ',' << format_g12(r.seconds) << '\n';
  if (l2_slope) os << "# slope=" << format_g12(*l2_slope) << '\n';
  if (h1_slope) os << "# h1_slope=" << format_g12(*h1_slope) << '\n';
  for (const auto& note : notes) os << "# " << note << '\n';
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << contents;
}

}  // namespace meso
