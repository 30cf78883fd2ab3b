#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <vector>

#include "uwbpulse/fcc_optimizer.hpp"
#include "uwbpulse/signals.hpp"

namespace fixtures {

// Designs for the default mask, computed once per L.
const uwbpulse::Design& design(int L);

std::filesystem::path scratch_dir(const std::string& name);

// Naive DTFT, dt * sum x_i exp(-2 pi i f i dt), accumulated in long double.
inline std::complex<double> naive_dtft(const uwbpulse::SampledPulse& p, double f) {
  long double re = 0.0L, im = 0.0L;
  for (long k = 0; k < p.size(); ++k) {
    const long double ph = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(f) *
                           static_cast<long double>(p.first() + k) * static_cast<long double>(p.dt());
    re += p[k] * std::cos(ph);
    im += p[k] * std::sin(ph);
  }
  return {static_cast<double>(re * p.dt()), static_cast<double>(im * p.dt())};
}

// r(lag) = dt * sum_i p(i) p(i - lag), by index arithmetic on absolute positions
inline double naive_autocorr(const uwbpulse::SampledPulse& p, long lag) {
  double s = 0.0;
  for (long i = p.first(); i <= p.last(); ++i) s += p.at(i) * p.at(i - lag);
  return s * p.dt();
}

// r0 + 2 sum r_n cos(2 pi n u)
inline double naive_cos_series(const std::vector<double>& r, double u) {
  double s = r[0];
  for (std::size_t n = 1; n < r.size(); ++n) s += 2.0 * r[n] * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) * u);
  return s;
}

}  // namespace fixtures
