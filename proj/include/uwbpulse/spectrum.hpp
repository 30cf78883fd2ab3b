#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "uwbpulse/signals.hpp"

namespace uwbpulse {

struct MaskSegment {
  double f_lo;
  double f_hi;
  double level;  // W/Hz
};

class SpectralMask {
 public:
  SpectralMask() = default;
  // Passband defaults to the segment with the highest level.
  explicit SpectralMask(std::vector<MaskSegment> segments);
  SpectralMask(std::vector<MaskSegment> segments, double pass_lo, double pass_hi);

  const std::vector<MaskSegment>& segments() const { return segments_; }
  double pass_lo() const { return pass_lo_; }
  double pass_hi() const { return pass_hi_; }
  double f_max() const { return segments_.back().f_hi; }
  // At a band edge the lower of the two adjacent levels applies.
  double level(double f) const;
  std::vector<double> levels(std::span<const double> f) const;
  SpectralMask scaled(double c) const;

  static SpectralMask parse_csv(const std::string& text);
  static SpectralMask load(const std::string& path);

 private:
  void validate() const;

  std::vector<MaskSegment> segments_;
  double pass_lo_ = 0.0;
  double pass_hi_ = 0.0;
};

SpectralMask fcc_mask_default();
const char* bundled_fcc_mask_csv();

// c0 + sum_{n>=1} c_n 2cos(2 pi n nu T0)
struct CosinePoly {
  std::vector<double> coeffs;
  double T0 = kT0;

  double operator()(double nu) const;
  std::vector<double> evaluate(std::span<const double> nu) const;
  long order() const { return static_cast<long>(coeffs.size()); }
};

// Closed-form integral of phi_n(nu) over [a, b] (hertz).
double basis_integral(long n, double T0, double a, double b);

double mask_ratio(const SpectralMask& mask, const SampledPulse& q, double nu);

struct FitOptions {
  int grid_density = 512;
  // Fit target is min(M, cap_factor * min M) on each segment.
  double cap_factor = 2.0;
  // Eigen-directions of the normal matrix below rcond * max are dropped.
  double rcond = 1e-8;
  int verify_factor = 4;
  // Throw instead of truncating when the normal matrix condition exceeds 1/rcond.
  bool strict = false;
};

struct SegmentFit {
  double alpha = 0.0;  // hertz
  double beta = 0.0;
  double level = 0.0;
  CosinePoly gamma;
  double offset = 0.0;        // downward shift applied for Gamma <= M
  double residual_sup = 0.0;  // max |fit - target| before the shift
  double condition = 0.0;
  int rank = 0;
  double gamma_min = 0.0;  // min of the shifted Gamma on the verification grid
};

struct MaskFit {
  std::vector<SegmentFit> segments;
  std::vector<CosinePoly> gammas() const;
};

// Start of the fit interval for each segment: beginning of the run of
// lower-or-equal levels that ends at the segment.
std::vector<double> fit_interval_starts(const SpectralMask& mask);

MaskFit fit_mask_polynomials(const SpectralMask& mask, const SampledPulse& q, int L, const FitOptions& opt = {});

// Sup-norm grid on [0, f_max]: 2^14 points.
std::vector<double> sup_grid(const SpectralMask& mask, long points = 1L << 14);

double alpha_star(const Spectrum& p, const SpectralMask& mask);
double alpha_star(const SampledPulse& p, const SpectralMask& mask, long points = 1L << 14);

// Trapezoid integration over the passband part of the grid.
double nesp(const Spectrum& p, const SpectralMask& mask);
double nesp(const SampledPulse& p, const SpectralMask& mask, long points = 1L << 12);
// NESP after scaling the pulse to its compliance level.
double compliant_nesp(const SampledPulse& p, const SpectralMask& mask);

struct SpectralLine {
  double f;
  double power;
};

struct Psd {
  std::vector<double> freqs;
  std::vector<double> values;  // W/Hz
  std::vector<SpectralLine> lines;
};

// (1/N) sum_{d<N} exp(-2 pi i nu d T)
std::complex<double> ppm_phase_average(double nu, double T, long N);
std::complex<double> g_beta(double nu, long Nc, double Tc, long N, double T);

Psd psd_pam_ppm(const SampledPulse& p, std::span<const double> freqs, double E, double Ts, double mean_a, double var_a,
                double T, long N);
Psd psd_th_framed(const SampledPulse& p, std::span<const double> freqs, double E, double Tf, long Nc, double Tc,
                  long N, double T);

}  // namespace uwbpulse
