#include <algorithm>
#include <cmath>
#include <numbers>

#include "numeric.hpp"
#include "uwbpulse/errors.hpp"
#include "uwbpulse/spectrum.hpp"

namespace uwbpulse {

namespace {

constexpr double kAlphaSafety = 1.0 - 1e-6;

double alpha_from(std::span<const double> f, std::span<const double> power, const SpectralMask& mask) {
  double worst = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f[j] < 0.0 || f[j] > mask.f_max()) continue;
    worst = std::max(worst, power[j] / mask.level(f[j]));
  }
  if (!(worst > 0.0)) throw ConfigError("alpha*: pulse spectrum vanishes on the mask band");
  return kAlphaSafety / std::sqrt(worst);
}

double mask_pass_integral(const SpectralMask& mask) {
  double s = 0.0;
  for (const auto& seg : mask.segments()) {
    const double lo = std::max(seg.f_lo, mask.pass_lo()), hi = std::min(seg.f_hi, mask.pass_hi());
    if (hi > lo) s += seg.level * (hi - lo);
  }
  return s;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t j = 1; j < x.size(); ++j) s += 0.5 * (y[j] + y[j - 1]) * (x[j] - x[j - 1]);
  return s;
}

}  // namespace

std::vector<double> sup_grid(const SpectralMask& mask, long points) {
  return detail::linspace(0.0, mask.f_max(), points);
}

double alpha_star(const Spectrum& p, const SpectralMask& mask) {
  std::vector<double> pw(p.values.size());
  for (std::size_t j = 0; j < pw.size(); ++j) pw[j] = std::norm(p.values[j]);
  return alpha_from(p.freqs, pw, mask);
}

double alpha_star(const SampledPulse& p, const SpectralMask& mask, long points) {
  const auto f = sup_grid(mask, points);
  const auto pw = power_spectrum(p, f);
  return alpha_from(f, pw, mask);
}

double nesp(const Spectrum& p, const SpectralMask& mask) {
  std::vector<double> x, y;
  for (std::size_t j = 0; j < p.freqs.size(); ++j) {
    if (p.freqs[j] < mask.pass_lo() || p.freqs[j] > mask.pass_hi()) continue;
    x.push_back(p.freqs[j]);
    y.push_back(std::norm(p.values[j]));
  }
  return trapezoid(x, y) / mask_pass_integral(mask);
}

double nesp(const SampledPulse& p, const SpectralMask& mask, long points) {
  const auto f = detail::linspace(mask.pass_lo(), mask.pass_hi(), points);
  const auto pw = power_spectrum(p, f);
  return trapezoid(f, pw) / mask_pass_integral(mask);
}

double compliant_nesp(const SampledPulse& p, const SpectralMask& mask) {
  const double a = alpha_star(p, mask);
  return a * a * nesp(p, mask);
}

std::complex<double> ppm_phase_average(double nu, double T, long N) {
  if (N < 1) throw ConfigError("PPM order N must be at least 1");
  const double x = std::numbers::pi * nu * T;
  const double s = std::sin(x);
  const double nN = static_cast<double>(N);
  double ratio;
  if (std::abs(s) < 1e-12)
    ratio = std::cos(nN * x) / std::cos(x);
  else
    ratio = std::sin(nN * x) / (nN * s);
  return std::polar(ratio, -x * (nN - 1.0));
}

std::complex<double> g_beta(double nu, long Nc, double Tc, long N, double T) {
  return ppm_phase_average(nu, Tc, Nc) * ppm_phase_average(nu, T, N);
}

namespace {

std::vector<double> line_freqs(std::span<const double> freqs, double period) {
  std::vector<double> out;
  if (freqs.empty()) return out;
  const auto [lo, hi] = std::minmax_element(freqs.begin(), freqs.end());
  const long n0 = static_cast<long>(std::ceil(*lo * period - 1e-9));
  const long n1 = static_cast<long>(std::floor(*hi * period + 1e-9));
  for (long n = n0; n <= n1; ++n) out.push_back(static_cast<double>(n) / period);
  return out;
}

Psd assemble(const SampledPulse& p, std::span<const double> freqs, double E, double P, double second_moment,
             const std::function<std::complex<double>(double)>& G) {
  Psd out;
  out.freqs.assign(freqs.begin(), freqs.end());
  const auto pw = power_spectrum(p, freqs);
  out.values.resize(freqs.size());
  for (std::size_t j = 0; j < freqs.size(); ++j)
    out.values[j] = std::max(0.0, E * pw[j] / P * (second_moment - std::norm(G(freqs[j]))));
  const auto lf = line_freqs(freqs, P);
  const auto lp = power_spectrum(p, lf);
  double scale = 0.0;
  for (double v : lp) scale = std::max(scale, E * v / (P * P));
  for (std::size_t j = 0; j < lf.size(); ++j) {
    const double w = E * lp[j] * std::norm(G(lf[j])) / (P * P);
    if (w > 1e-24 * scale && w > 0.0) out.lines.push_back({lf[j], w});
  }
  return out;
}

}  // namespace

Psd psd_pam_ppm(const SampledPulse& p, std::span<const double> freqs, double E, double Ts, double mean_a,
                double var_a, double T, long N) {
  if (!(Ts > 0.0)) throw ConfigError("psd: Ts must be positive");
  if (var_a < 0.0) throw ConfigError("psd: negative amplitude variance");
  const double m2 = var_a + mean_a * mean_a;
  return assemble(p, freqs, E, Ts, m2, [&](double nu) { return mean_a * ppm_phase_average(nu, T, N); });
}

Psd psd_th_framed(const SampledPulse& p, std::span<const double> freqs, double E, double Tf, long Nc, double Tc,
                  long N, double T) {
  if (static_cast<double>(N) * T > Tc * (1.0 + 1e-12))
    throw ConfigError("psd: time-hopping constraint N*T <= Tc violated");
  if (static_cast<double>(Nc) * Tc > Tf * (1.0 + 1e-12))
    throw ConfigError("psd: time-hopping constraint Nc*Tc <= Tf violated");
  return assemble(p, freqs, E, Tf, 1.0, [&](double nu) { return g_beta(nu, Nc, Tc, N, T); });
}

}  // namespace uwbpulse
