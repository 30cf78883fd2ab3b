#pragma once

#include <complex>
#include <span>
#include <vector>

namespace uwbpulse {

inline constexpr double kT0 = 1.0 / 28e9;
inline constexpr int kSamplesPerT0 = 32;
inline constexpr double kDefaultDt = kT0 / kSamplesPerT0;

struct TimeGrid {
  double dt = kDefaultDt;
  long n0 = 0;  // index of t = 0
  long len = 0;

  double time(long k) const { return static_cast<double>(k - n0) * dt; }
  static TimeGrid centered(double dt, long half_len) { return {dt, half_len, 2 * half_len + 1}; }
};

// Real pulse on a uniform grid. Samples are addressed either by position in the
// vector or by absolute index i, with t = i * dt.
class SampledPulse {
 public:
  SampledPulse() = default;
  SampledPulse(double dt, long first, std::vector<double> samples);
  SampledPulse(double dt, long first, std::vector<double> samples, double t_lo, double t_hi);
  SampledPulse(const TimeGrid& grid, std::vector<double> samples, double t_lo, double t_hi);

  double dt() const { return dt_; }
  long first() const { return first_; }
  long last() const { return first_ + static_cast<long>(samples_.size()) - 1; }
  long size() const { return static_cast<long>(samples_.size()); }
  bool empty() const { return samples_.empty(); }
  TimeGrid grid() const { return {dt_, -first_, size()}; }

  const std::vector<double>& samples() const { return samples_; }
  std::span<const double> view() const { return samples_; }
  double operator[](long pos) const { return samples_[static_cast<std::size_t>(pos)]; }
  // Sample at absolute index, zero off the grid.
  double at(long idx) const;
  double time_at(long idx) const { return static_cast<double>(idx) * dt_; }

  double support_lo() const { return t_lo_; }
  double support_hi() const { return t_hi_; }
  double duration() const { return t_hi_ - t_lo_; }
  long support_lo_index() const;
  long support_hi_index() const;

  double energy() const;
  double peak_abs() const;
  // Absolute index of t; throws ResolutionError when t is not a grid time.
  long index_of(double t) const;

  SampledPulse shifted(long samples) const;
  SampledPulse scaled(double c) const;
  // Restricts the stored samples to the declared support.
  SampledPulse trimmed() const;

 private:
  void check_support() const;

  double dt_ = kDefaultDt;
  long first_ = 0;
  std::vector<double> samples_;
  double t_lo_ = 0.0;
  double t_hi_ = 0.0;
};

struct Spectrum {
  std::vector<double> freqs;  // hertz, uniform and increasing
  std::vector<std::complex<double>> values;

  double df() const { return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0; }
};

enum class Window { triangle, hann };

SampledPulse gaussian_monocycle(double fc, double Tq, const TimeGrid& grid, Window window = Window::triangle);
double monocycle_sigma(double fc);
// Fraction of the unwindowed monocycle energy inside [-Tq/2, Tq/2], by quadrature at step dt.
double monocycle_energy_capture(double fc, double Tq, double dt);

long shift_in_samples(double T, double dt);
long band_width(double Tp, double T);

double inner(const SampledPulse& p, const SampledPulse& q);
// dt * sum_i p(i) p(i - lag)
double autocorr_at(const SampledPulse& p, long lag);
SampledPulse autocorrelation(const SampledPulse& p);

Spectrum spectrum(const SampledPulse& p, long nfft);
std::vector<std::complex<double>> dtft(const SampledPulse& p, std::span<const double> freqs);
std::vector<double> power_spectrum(const SampledPulse& p, std::span<const double> freqs);

// Sampled autocorrelation r_p(nT), n = 0..K, viewed as the symbol
// Phi_p(nu) = r(0) + 2 sum r(nT) cos(2 pi n nu), nu in cycles per shift.
class ShiftSymbol {
 public:
  ShiftSymbol(const SampledPulse& p, double T);
  double operator()(double nu) const;
  std::vector<double> evaluate(std::span<const double> nu) const;
  const std::vector<double>& lags() const { return r_; }
  long K() const { return static_cast<long>(r_.size()) - 1; }
  double T() const { return T_; }
  long shift_samples() const { return s_; }

 private:
  std::vector<double> r_;
  double T_;
  long s_;
};

double symbol_Phi(const SampledPulse& p, double T, double nu);

std::complex<double> zak(const SampledPulse& p, double T, double t, double nu);

// p(t) = sum_k g_k q(t - k*clock - offset); offset chosen so the result is
// centered when `center` is set.
SampledPulse semi_discrete_convolution(const SampledPulse& q, std::span<const double> taps, long clock_samples,
                                       bool center = true);

// Sum of pulses on a common dt, over the union of their grids and supports.
SampledPulse sum_pulses(std::span<const SampledPulse> parts, std::span<const double> weights);

}  // namespace uwbpulse
