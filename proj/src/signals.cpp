#include "uwbpulse/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "uwbpulse/errors.hpp"
#include "uwbpulse/simd.hpp"

namespace uwbpulse {

namespace {

constexpr double kGridTol = 1e-9;

long ceil_index(double t, double dt) { return static_cast<long>(std::ceil(t / dt - kGridTol)); }
long floor_index(double t, double dt) { return static_cast<long>(std::floor(t / dt + kGridTol)); }

bool same_dt(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(a, b); }

}  // namespace

SampledPulse::SampledPulse(double dt, long first, std::vector<double> samples)
    : dt_(dt), first_(first), samples_(std::move(samples)) {
  if (!(dt_ > 0.0)) throw ConfigError("pulse: dt must be positive");
  t_lo_ = static_cast<double>(first_) * dt_;
  t_hi_ = static_cast<double>(last()) * dt_;
}

SampledPulse::SampledPulse(double dt, long first, std::vector<double> samples, double t_lo, double t_hi)
    : dt_(dt), first_(first), samples_(std::move(samples)), t_lo_(t_lo), t_hi_(t_hi) {
  if (!(dt_ > 0.0)) throw ConfigError("pulse: dt must be positive");
  if (t_hi_ < t_lo_) throw ConfigError("pulse: support upper edge below lower edge");
  check_support();
}

SampledPulse::SampledPulse(const TimeGrid& grid, std::vector<double> samples, double t_lo, double t_hi)
    : SampledPulse(grid.dt, -grid.n0, std::move(samples), t_lo, t_hi) {
  if (static_cast<long>(samples_.size()) != grid.len) throw ConfigError("pulse: sample count does not match grid");
}

void SampledPulse::check_support() const {
  const long lo = support_lo_index(), hi = support_hi_index();
  for (long i = first_; i <= last(); ++i) {
    if ((i < lo || i > hi) && samples_[static_cast<std::size_t>(i - first_)] != 0.0)
      throw ConfigError("pulse: nonzero sample outside declared support");
  }
}

double SampledPulse::at(long idx) const {
  if (idx < first_ || idx > last()) return 0.0;
  return samples_[static_cast<std::size_t>(idx - first_)];
}

long SampledPulse::support_lo_index() const { return ceil_index(t_lo_, dt_); }
long SampledPulse::support_hi_index() const { return floor_index(t_hi_, dt_); }

double SampledPulse::energy() const { return simd::dot(samples_, samples_) * dt_; }

double SampledPulse::peak_abs() const {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(v));
  return m;
}

long SampledPulse::index_of(double t) const {
  const double x = t / dt_;
  const double r = std::nearbyint(x);
  if (std::abs(x - r) > 1e-6) throw ResolutionError("time " + std::to_string(t) + " s is not a grid time");
  return static_cast<long>(r);
}

SampledPulse SampledPulse::shifted(long s) const {
  const double d = static_cast<double>(s) * dt_;
  return SampledPulse(dt_, first_ + s, samples_, t_lo_ + d, t_hi_ + d);
}

SampledPulse SampledPulse::scaled(double c) const {
  std::vector<double> v(samples_);
  for (double& x : v) x *= c;
  return SampledPulse(dt_, first_, std::move(v), t_lo_, t_hi_);
}

SampledPulse SampledPulse::trimmed() const {
  const long lo = support_lo_index(), hi = support_hi_index();
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(std::max(0L, hi - lo + 1)));
  for (long i = lo; i <= hi; ++i) v.push_back(at(i));
  return SampledPulse(dt_, lo, std::move(v), t_lo_, t_hi_);
}

double monocycle_sigma(double fc) { return 1.0 / (std::numbers::sqrt2 * std::numbers::pi * fc); }

SampledPulse gaussian_monocycle(double fc, double Tq, const TimeGrid& grid, Window window) {
  if (!(fc > 0.0) || !(Tq > 0.0)) throw ConfigError("monocycle: fc and Tq must be positive");
  if (Tq / grid.dt < 16.0) throw ResolutionError("monocycle: fewer than 16 samples across Tq");
  const double half = Tq / 2.0;
  if (grid.time(0) > -half + kGridTol * grid.dt || grid.time(grid.len - 1) < half - kGridTol * grid.dt)
    throw ResolutionError("monocycle: grid does not span [-Tq/2, Tq/2]");
  const double sigma = monocycle_sigma(fc);
  std::vector<double> x(static_cast<std::size_t>(grid.len), 0.0);
  for (long k = 0; k < grid.len; ++k) {
    const double t = grid.time(k);
    if (std::abs(t) >= half) continue;
    const double w = window == Window::triangle ? 1.0 - std::abs(t) / half
                                                : 0.5 * (1.0 + std::cos(std::numbers::pi * t / half));
    x[static_cast<std::size_t>(k)] = t * std::exp(-(t * t) / (sigma * sigma)) * w;
  }
  const double e = simd::dot(x, x) * grid.dt;
  const double c = 1.0 / std::sqrt(e);
  for (double& v : x) v *= c;
  return SampledPulse(grid, std::move(x), -half, half);
}

double monocycle_energy_capture(double fc, double Tq, double dt) {
  const double sigma = monocycle_sigma(fc);
  const double half = Tq / 2.0;
  const long n = static_cast<long>(std::ceil((half + 40.0 * sigma) / dt));
  double inside = 0.0, total = 0.0;
  for (long k = -n; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double f = t * std::exp(-(t * t) / (sigma * sigma));
    total += f * f;
    if (std::abs(t) <= half) inside += f * f;
  }
  return inside / total;
}

long shift_in_samples(double T, double dt) {
  if (!(T > 0.0)) throw ConfigError("shift T must be positive");
  const double x = T / dt;
  const double r = std::nearbyint(x);
  if (std::abs(x - r) > 1e-6 * std::max(1.0, x)) throw ResolutionError("shift T is not an integer number of samples");
  return static_cast<long>(r);
}

long band_width(double Tp, double T) { return static_cast<long>(std::ceil(Tp / T - 1e-9)); }

double inner(const SampledPulse& p, const SampledPulse& q) {
  if (!same_dt(p.dt(), q.dt())) throw ResolutionError("inner product of pulses on different grids");
  const long lo = std::max(p.first(), q.first());
  const long hi = std::min(p.last(), q.last());
  if (hi < lo) return 0.0;
  const auto n = static_cast<std::size_t>(hi - lo + 1);
  return simd::dot(p.view().subspan(static_cast<std::size_t>(lo - p.first()), n),
                   q.view().subspan(static_cast<std::size_t>(lo - q.first()), n)) *
         p.dt();
}

double autocorr_at(const SampledPulse& p, long lag) {
  lag = std::abs(lag);
  if (lag >= p.size()) return 0.0;
  const auto n = static_cast<std::size_t>(p.size() - lag);
  return simd::dot(p.view().subspan(static_cast<std::size_t>(lag), n), p.view().subspan(0, n)) * p.dt();
}

SampledPulse autocorrelation(const SampledPulse& p) {
  const long n = p.size();
  std::vector<double> r(static_cast<std::size_t>(2 * n - 1), 0.0);
  for (long j = 0; j < n; ++j) {
    const double v = autocorr_at(p, j);
    r[static_cast<std::size_t>(n - 1 + j)] = v;
    r[static_cast<std::size_t>(n - 1 - j)] = v;
  }
  const double w = p.duration();
  return SampledPulse(p.dt(), -(n - 1), std::move(r), -w, w);
}

Spectrum spectrum(const SampledPulse& p, long nfft) {
  if (nfft < p.size() || nfft <= 0 || (nfft & (nfft - 1)) != 0)
    throw ConfigError("spectrum: nfft must be a power of two not below the pulse length");
  std::vector<std::complex<double>> in(static_cast<std::size_t>(nfft), 0.0), out(static_cast<std::size_t>(nfft));
  for (long m = 0; m < p.size(); ++m) in[static_cast<std::size_t>(m)] = p[m];
  detail::FftPlan plan(static_cast<int>(nfft), FFTW_FORWARD);
  plan.run(in.data(), out.data());
  Spectrum s;
  s.freqs.resize(static_cast<std::size_t>(nfft));
  s.values.resize(static_cast<std::size_t>(nfft));
  const double df = 1.0 / (static_cast<double>(nfft) * p.dt());
  const long half = nfft / 2;
  for (long j = 0; j < nfft; ++j) {
    const long k = j - half;
    const long bin = (k + nfft) % nfft;
    // exp(-2 pi i k first / nfft) with the exponent reduced exactly in integers
    long e = (k % nfft) * (p.first() % nfft) % nfft;
    if (e < 0) e += nfft;
    const double th = -2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(nfft);
    s.freqs[static_cast<std::size_t>(j)] = static_cast<double>(k) * df;
    s.values[static_cast<std::size_t>(j)] = out[static_cast<std::size_t>(bin)] * std::polar(p.dt(), th);
  }
  return s;
}

std::vector<std::complex<double>> dtft(const SampledPulse& p, std::span<const double> freqs) {
  std::vector<std::complex<double>> out(freqs.size());
  simd::dtft(p.view(), p.first(), p.dt(), freqs, out);
  return out;
}

std::vector<double> power_spectrum(const SampledPulse& p, std::span<const double> freqs) {
  const auto v = dtft(p, freqs);
  std::vector<double> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = std::norm(v[j]);
  return out;
}

ShiftSymbol::ShiftSymbol(const SampledPulse& p, double T) : T_(T), s_(shift_in_samples(T, p.dt())) {
  const long K = band_width(p.duration(), T);
  r_.resize(static_cast<std::size_t>(K + 1));
  for (long n = 0; n <= K; ++n) r_[static_cast<std::size_t>(n)] = autocorr_at(p, n * s_);
}

std::vector<double> ShiftSymbol::evaluate(std::span<const double> nu) const {
  std::vector<double> out(nu.size());
  simd::cospoly(r_, nu, out);
  const double floor = -1e-9 * std::max(r_[0], 1e-300);
  for (double v : out)
    if (v < floor) throw NumericalError("symbol Phi negative; autocorrelation input is broken");
  return out;
}

double ShiftSymbol::operator()(double nu) const {
  const double u[1] = {nu};
  return evaluate(u)[0];
}

double symbol_Phi(const SampledPulse& p, double T, double nu) { return ShiftSymbol(p, T)(nu); }

std::complex<double> zak(const SampledPulse& p, double T, double t, double nu) {
  const long s = shift_in_samples(T, p.dt());
  long i;
  try {
    i = p.index_of(t);
  } catch (const ResolutionError&) {
    throw ResolutionError("zak: t is off the grid; interpolation refused, use grid times");
  }
  const long lo = p.support_lo_index(), hi = p.support_hi_index();
  // p(i - n s) nonzero requires lo <= i - n s <= hi
  const long n_lo = static_cast<long>(std::ceil(static_cast<double>(i - hi) / static_cast<double>(s)));
  const long n_hi = static_cast<long>(std::floor(static_cast<double>(i - lo) / static_cast<double>(s)));
  std::complex<double> z = 0.0;
  for (long n = n_lo; n <= n_hi; ++n) {
    const double frac = static_cast<double>(n) * nu - std::nearbyint(static_cast<double>(n) * nu);
    z += p.at(i - n * s) * std::polar(1.0, 2.0 * std::numbers::pi * frac);
  }
  return z;
}

SampledPulse semi_discrete_convolution(const SampledPulse& q, std::span<const double> taps, long clock_samples,
                                       bool center) {
  if (taps.empty()) throw ConfigError("semi-discrete convolution: empty tap vector");
  const long L = static_cast<long>(taps.size());
  const long span = (L - 1) * clock_samples;
  const long off = center ? span / 2 : 0;
  const long first = q.first() - off;
  std::vector<double> y(static_cast<std::size_t>(q.size() + span), 0.0);
  for (long k = 0; k < L; ++k) {
    std::span<double> dst(y.data() + k * clock_samples, static_cast<std::size_t>(q.size()));
    simd::axpy(taps[static_cast<std::size_t>(k)], q.view(), dst);
  }
  const double dt = q.dt();
  return SampledPulse(dt, first, std::move(y), q.support_lo() - static_cast<double>(off) * dt,
                      q.support_hi() + static_cast<double>(span - off) * dt);
}

SampledPulse sum_pulses(std::span<const SampledPulse> parts, std::span<const double> weights) {
  if (parts.empty() || parts.size() != weights.size()) throw ConfigError("sum_pulses: size mismatch");
  const double dt = parts[0].dt();
  long first = parts[0].first(), last = parts[0].last();
  double lo = parts[0].support_lo(), hi = parts[0].support_hi();
  for (const auto& p : parts) {
    if (!same_dt(p.dt(), dt)) throw ResolutionError("sum_pulses: pulses on different grids");
    first = std::min(first, p.first());
    last = std::max(last, p.last());
    lo = std::min(lo, p.support_lo());
    hi = std::max(hi, p.support_hi());
  }
  std::vector<double> y(static_cast<std::size_t>(last - first + 1), 0.0);
  for (std::size_t j = 0; j < parts.size(); ++j) {
    const auto& p = parts[j];
    std::span<double> dst(y.data() + (p.first() - first), static_cast<std::size_t>(p.size()));
    simd::axpy(weights[j], p.view(), dst);
  }
  return SampledPulse(dt, first, std::move(y), lo, hi);
}

}  // namespace uwbpulse
