#ifndef MESO_DECOMPOSE_HPP
#define MESO_DECOMPOSE_HPP

#include <functional>
#include <iosfwd>
#include <vector>

namespace meso {

// Uniform samples of one coefficient entry along a line through the domain.
struct SampledTrace {
  std::vector<double> x;  // uniform grid on [0, 1]
  std::vector<double> v;

  static SampledTrace sample(const std::function<double(double)>& fn, int count);
  double dx() const { return x.size() > 1 ? x[1] - x[0] : 0.0; }
  void validate() const;  // uniform spacing, finite values
};

// Sparse monomial model c_0 + c_1 x + ... of the smooth component.
struct Polynomial {
  std::vector<double> coeffs;
  double operator()(double x) const;
};

// Decomposition bookkeeping: input == smooth(x) + sum(imfs) + residual holds
// exactly on the sample grid (the fit error is folded into the residual).
struct ModeSet {
  Polynomial smooth;
  std::vector<std::vector<double>> imfs;
  std::vector<double> residual;

  void write_csv(std::ostream& os, const std::vector<double>& x) const;
};

// Mollifier split: convolution with the normalized bump (1 - (t/w)^2)^4 on
// |t| <= w, boundaries by reflection; residual = input - smooth.
std::pair<std::vector<double>, std::vector<double>>
lowpass_split(const SampledTrace& trace, double width);

// Least squares in the monomial basis (degree <= 6); coefficients below
// threshold * max|coeff| are zeroed.
Polynomial fit_monomials(const std::vector<double>& x, const std::vector<double>& v,
                         int degree, double threshold);

// Classical sifting: cubic-spline envelopes through mirrored extrema, subtract
// the envelope mean until its max-norm is <= 1e-3 * amplitude (or 50 sifts);
// peel IMFs until the residual has fewer than 4 extrema or max_imfs is hit.
struct SiftResult {
  std::vector<std::vector<double>> imfs;
  std::vector<double> residual;
};
SiftResult emd_sift(const std::vector<double>& x, const std::vector<double>& v,
                    int max_imfs);

// Frequency stretch of a near-monochromatic mode: amplitude envelope kept,
// zero-crossing phase unwrapped, divided by m, waveform re-evaluated by
// interpolation. Degenerate inputs (no crossings) come back unchanged.
struct StretchResult {
  std::vector<double> v;
  bool degenerate = false;
};
StretchResult stretch_mode(const std::vector<double>& x, const std::vector<double>& v,
                           double m);

// The full numerical-inversion pipeline: split, identify, sift, stretch each
// mode by m, reassemble as an evaluable 1D coefficient entry.
struct HybridField {
  std::vector<double> x, v;  // reconstructed samples
  ModeSet modes;

  double operator()(double t) const;  // linear interpolation between samples
};
HybridField hybrid_dilate(const SampledTrace& trace, double m, double width,
                          int degree, double fit_threshold = 1e-3, int max_imfs = 6);

}  // namespace meso

#endif
