#include "meso/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "meso/spline.hpp"

namespace meso {

namespace {

std::vector<int> local_maxima(const std::vector<double>& v) {
  std::vector<int> out;
  for (int i = 1; i + 1 < int(v.size()); ++i)
    if (v[i] > v[i - 1] && v[i] > v[i + 1]) out.push_back(i);
  return out;
}

std::vector<int> local_minima(const std::vector<double>& v) {
  std::vector<int> out;
  for (int i = 1; i + 1 < int(v.size()); ++i)
    if (v[i] < v[i - 1] && v[i] < v[i + 1]) out.push_back(i);
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::fmax(m, std::fabs(x));
  return m;
}

// spline envelope through extrema, mirror-extended past both domain ends
std::vector<double> envelope(const std::vector<double>& x, const std::vector<double>& v,
                             const std::vector<int>& extrema) {
  std::vector<double> xs, ys;
  const double x0 = x.front(), x1 = x.back();
  const int ne = int(extrema.size());
  const int nm = std::min(2, ne);
  for (int k = nm - 1; k >= 0; --k) {
    xs.push_back(2.0 * x0 - x[extrema[k]]);
    ys.push_back(v[extrema[k]]);
  }
  for (int e : extrema) {
    xs.push_back(x[e]);
    ys.push_back(v[e]);
  }
  for (int k = 0; k < nm; ++k) {
    xs.push_back(2.0 * x1 - x[extrema[ne - 1 - k]]);
    ys.push_back(v[extrema[ne - 1 - k]]);
  }
  const CubicSpline spline(std::move(xs), std::move(ys));
  std::vector<double> env(x.size());
  for (size_t i = 0; i < x.size(); ++i) env[i] = spline(x[i]);
  return env;
}

bool siftable(const std::vector<double>& v) {
  return local_maxima(v).size() >= 2 && local_minima(v).size() >= 2;
}

double lerp_at(const std::vector<double>& x, const std::vector<double>& v, double t) {
  if (t <= x.front()) return v.front();
  if (t >= x.back()) return v.back();
  const double dx = x[1] - x[0];
  const int i = std::min(int((t - x.front()) / dx), int(x.size()) - 2);
  const double f = (t - x[i]) / dx;
  return (1.0 - f) * v[i] + f * v[i + 1];
}

}  // namespace

SampledTrace SampledTrace::sample(const std::function<double(double)>& fn, int count) {
  if (count < 2) throw std::invalid_argument("SampledTrace: need >= 2 samples");
  SampledTrace t;
  t.x.resize(count);
  t.v.resize(count);
  for (int i = 0; i < count; ++i) {
    t.x[i] = double(i) / (count - 1);
    t.v[i] = fn(t.x[i]);
  }
  t.validate();
  return t;
}

void SampledTrace::validate() const {
  if (x.size() != v.size() || x.size() < 2)
    throw std::invalid_argument("SampledTrace: malformed sample arrays");
  const double d = x[1] - x[0];
  for (size_t i = 1; i < x.size(); ++i) {
    if (std::fabs((x[i] - x[i - 1]) - d) > 1e-9 * (1.0 + std::fabs(d)))
      throw std::invalid_argument("SampledTrace: spacing is not uniform");
    if (!std::isfinite(v[i])) throw std::invalid_argument("SampledTrace: non-finite value");
  }
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (int k = int(coeffs.size()) - 1; k >= 0; --k) acc = acc * x + coeffs[k];
  return acc;
}

void ModeSet::write_csv(std::ostream& os, const std::vector<double>& x) const {
  os << "x,smooth";
  for (size_t k = 0; k < imfs.size(); ++k) os << ",imf" << k + 1;
  os << ",residual\n";
  char buf[64];
  for (size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g", x[i], smooth(x[i]));
    os << buf;
    for (const auto& imf : imfs) {
      std::snprintf(buf, sizeof buf, ",%.12g", imf[i]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.12g\n", residual[i]);
    os << buf;
  }
}

std::pair<std::vector<double>, std::vector<double>>
lowpass_split(const SampledTrace& trace, double width) {
  trace.validate();
  const double dx = trace.dx();
  if (width < 2.0 * dx)
    throw std::invalid_argument("lowpass_split: width must cover >= 2 grid spacings");
  if (width >= trace.x.back() - trace.x.front())
    throw std::invalid_argument("lowpass_split: width exceeds the domain");

  const int n = int(trace.v.size());
  const int radius = int(std::round(width / dx));
  std::vector<double> kernel(2 * radius + 1);
  double ksum = 0.0;
  for (int j = -radius; j <= radius; ++j) {
    const double r = (j * dx) / width;
    const double q = std::fmax(0.0, 1.0 - r * r);
    kernel[j + radius] = q * q * q * q;
    ksum += kernel[j + radius];
  }
  for (double& k : kernel) k /= ksum;

  // antisymmetric (point) reflection about the boundary nodes; exact for
  // linear trends, so they do not fold into the residual
  const auto extended = [&](int i) {
    if (i < 0) return 2.0 * trace.v[0] - trace.v[-i];
    if (i >= n) return 2.0 * trace.v[n - 1] - trace.v[2 * (n - 1) - i];
    return trace.v[i];
  };
  std::vector<double> smooth(n, 0.0), residual(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = -radius; j <= radius; ++j) acc += kernel[j + radius] * extended(i + j);
    smooth[i] = acc;
    residual[i] = trace.v[i] - acc;
  }
  return {std::move(smooth), std::move(residual)};
}

Polynomial fit_monomials(const std::vector<double>& x, const std::vector<double>& v,
                         int degree, double threshold) {
  if (degree < 0 || degree > 6)
    throw std::invalid_argument("fit_monomials: degree must be in [0, 6]");
  const int n = int(x.size()), k = degree + 1;
  if (n < k) throw std::invalid_argument("fit_monomials: not enough samples");

  // modified Gram-Schmidt QR of the Vandermonde matrix
  std::vector<std::vector<double>> q(k, std::vector<double>(n));
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < n; ++i) q[c][i] = c == 0 ? 1.0 : q[c - 1][i] * x[i];
  std::vector<std::vector<double>> r(k, std::vector<double>(k, 0.0));
  for (int c = 0; c < k; ++c) {
    for (int p = 0; p < c; ++p) {
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += q[p][i] * q[c][i];
      r[p][c] = dot;
      for (int i = 0; i < n; ++i) q[c][i] -= dot * q[p][i];
    }
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) nrm += q[c][i] * q[c][i];
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12 * std::sqrt(double(n)))
      throw std::runtime_error("fit_monomials: rank-deficient fit");
    r[c][c] = nrm;
    for (int i = 0; i < n; ++i) q[c][i] /= nrm;
  }
  std::vector<double> rhs(k, 0.0);
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < n; ++i) rhs[c] += q[c][i] * v[i];
  Polynomial poly;
  poly.coeffs.assign(k, 0.0);
  for (int c = k - 1; c >= 0; --c) {
    double s = rhs[c];
    for (int p = c + 1; p < k; ++p) s -= r[c][p] * poly.coeffs[p];
    poly.coeffs[c] = s / r[c][c];
  }
  double cmax = 0.0;
  for (double c : poly.coeffs) cmax = std::fmax(cmax, std::fabs(c));
  for (double& c : poly.coeffs)
    if (std::fabs(c) < threshold * cmax) c = 0.0;
  return poly;
}

SiftResult emd_sift(const std::vector<double>& x, const std::vector<double>& v,
                    int max_imfs) {
  SiftResult out;
  out.residual = v;
  while (int(out.imfs.size()) < max_imfs && siftable(out.residual)) {
    std::vector<double> h = out.residual;
    for (int pass = 0; pass < 50; ++pass) {
      const auto maxima = local_maxima(h);
      const auto minima = local_minima(h);
      if (maxima.size() < 2 || minima.size() < 2) break;
      const auto upper = envelope(x, h, maxima);
      const auto lower = envelope(x, h, minima);
      double mean_norm = 0.0;
      for (size_t i = 0; i < h.size(); ++i)
        mean_norm = std::fmax(mean_norm, std::fabs(upper[i] + lower[i]) / 2.0);
      if (mean_norm <= 1e-3 * max_abs(h)) break;
      for (size_t i = 0; i < h.size(); ++i) h[i] -= (upper[i] + lower[i]) / 2.0;
    }
    for (size_t i = 0; i < h.size(); ++i) out.residual[i] -= h[i];
    out.imfs.push_back(std::move(h));
  }
  return out;
}

StretchResult stretch_mode(const std::vector<double>& x, const std::vector<double>& v,
                           double m) {
  if (!(m >= 1.0)) throw std::invalid_argument("stretch_mode: m must be >= 1");
  StretchResult out;
  out.v = v;

  // zero crossings, linearly interpolated
  std::vector<double> cross;
  for (size_t i = 0; i + 1 < v.size(); ++i) {
    if (v[i] == 0.0) {
      if (cross.empty() || cross.back() < x[i]) cross.push_back(x[i]);
    } else if (v[i] * v[i + 1] < 0.0) {
      const double t = v[i] / (v[i] - v[i + 1]);
      cross.push_back(x[i] + t * (x[i + 1] - x[i]));
    }
  }
  if (cross.size() < 2) {
    out.degenerate = true;
    return out;
  }

  // piecewise-linear unwrapped phase: pi per crossing, linearly extrapolated
  // to the domain ends, then anchored so the phase vanishes at x = 0
  std::vector<double> px, pv;
  const double slope_lo = M_PI / (cross[1] - cross[0]);
  const double slope_hi = M_PI / (cross[cross.size() - 1] - cross[cross.size() - 2]);
  if (cross.front() > x.front()) {
    px.push_back(x.front());
    pv.push_back(-slope_lo * (cross.front() - x.front()));
  }
  for (size_t k = 0; k < cross.size(); ++k) {
    px.push_back(cross[k]);
    pv.push_back(double(k) * M_PI);
  }
  if (cross.back() < x.back()) {
    px.push_back(x.back());
    pv.push_back(double(cross.size() - 1) * M_PI + slope_hi * (x.back() - cross.back()));
  }
  const double anchor = pv.front();
  for (double& p : pv) p -= anchor;

  const auto phase_at = [&](double t) {
    const auto it = std::upper_bound(px.begin(), px.end(), t);
    const int i = std::clamp(int(it - px.begin()) - 1, 0, int(px.size()) - 2);
    const double f = (t - px[i]) / (px[i + 1] - px[i]);
    return pv[i] + f * (pv[i + 1] - pv[i]);
  };
  const auto position_at = [&](double phase) {
    const auto it = std::upper_bound(pv.begin(), pv.end(), phase);
    const int i = std::clamp(int(it - pv.begin()) - 1, 0, int(pv.size()) - 2);
    const double f = (phase - pv[i]) / (pv[i + 1] - pv[i]);
    return px[i] + f * (px[i + 1] - px[i]);
  };

  // amplitude envelope through |extrema|
  std::vector<int> extrema = local_maxima(v);
  for (int e : local_minima(v)) extrema.push_back(e);
  std::sort(extrema.begin(), extrema.end());
  const double vmax = max_abs(v);
  std::vector<double> env(v.size(), vmax);
  if (extrema.size() >= 2) {
    std::vector<double> av(v.size());
    for (size_t i = 0; i < v.size(); ++i) av[i] = std::fabs(v[i]);
    env = envelope(x, av, extrema);
    for (double& e : env) e = std::fmax(e, 1e-6 * vmax);
  }

  std::vector<double> q(v.size());
  for (size_t i = 0; i < v.size(); ++i) q[i] = v[i] / env[i];
  for (size_t i = 0; i < v.size(); ++i) {
    const double target = phase_at(x[i]) / m;
    out.v[i] = env[i] * lerp_at(x, q, position_at(target));
  }
  return out;
}

double HybridField::operator()(double t) const { return lerp_at(x, v, t); }

HybridField hybrid_dilate(const SampledTrace& trace, double m, double width,
                          int degree, double fit_threshold, int max_imfs) {
  if (!(m >= 1.0)) throw std::invalid_argument("hybrid_dilate: m must be >= 1");
  trace.validate();
  auto [smooth, residual] = lowpass_split(trace, width);
  HybridField out;
  out.x = trace.x;

  // identify the slow model away from the mollifier's boundary zone
  std::vector<double> xfit, vfit;
  for (size_t i = 0; i < trace.x.size(); ++i)
    if (trace.x[i] >= width && trace.x[i] <= 1.0 - width) {
      xfit.push_back(trace.x[i]);
      vfit.push_back(smooth[i]);
    }
  if (int(xfit.size()) <= degree + 1) {
    xfit = trace.x;
    vfit = smooth;
  }
  out.modes.smooth = fit_monomials(xfit, vfit, degree, fit_threshold);

  SiftResult sift;
  if (max_abs(residual) > 1e-10 * max_abs(trace.v))
    sift = emd_sift(trace.x, residual, max_imfs);
  else
    sift.residual = residual;  // flat remainder: nothing to sift
  out.modes.imfs = std::move(sift.imfs);

  // bookkeeping residual absorbs both the sift remainder and the fit error
  out.modes.residual.resize(trace.v.size());
  for (size_t i = 0; i < trace.v.size(); ++i) {
    double acc = trace.v[i] - out.modes.smooth(trace.x[i]);
    for (const auto& imf : out.modes.imfs) acc -= imf[i];
    out.modes.residual[i] = acc;
  }

  out.v.resize(trace.v.size());
  for (size_t i = 0; i < out.v.size(); ++i)
    out.v[i] = out.modes.smooth(trace.x[i]) + out.modes.residual[i];
  for (const auto& imf : out.modes.imfs) {
    const StretchResult st = stretch_mode(trace.x, imf, m);
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += st.v[i];
  }
  return out;
}

}  // namespace meso
