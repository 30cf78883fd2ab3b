#include <cmath>
#include <numbers>

#include "uwbpulse/simd.hpp"

namespace uwbpulse::simd::scalar {

namespace {
constexpr std::size_t kAnchor = 32;

std::complex<double> unit_phasor(double cycles) {
  const double frac = cycles - std::nearbyint(cycles);
  const double th = -2.0 * std::numbers::pi * frac;
  return {std::cos(th), std::sin(th)};
}
}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

void rotate(double* x, double* y, std::size_t n, double c, double s) {
  for (std::size_t k = 0; k < n; ++k) {
    const double xk = x[k];
    const double yk = y[k];
    x[k] = c * xk - s * yk;
    y[k] = s * xk + c * yk;
  }
}

void dtft(const double* x, std::size_t n, long first, double dt, const double* nu, std::size_t m,
          std::complex<double>* out) {
  for (std::size_t j = 0; j < m; ++j) {
    const double step = nu[j] * dt;
    const std::complex<double> w = unit_phasor(step);
    double re = 0.0, im = 0.0;
    std::complex<double> z;
    for (std::size_t k = 0; k < n; ++k) {
      if (k % kAnchor == 0) z = unit_phasor(step * static_cast<double>(static_cast<long>(k) + first));
      re += x[k] * z.real();
      im += x[k] * z.imag();
      z *= w;
    }
    out[j] = {re * dt, im * dt};
  }
}

void cospoly(const double* coeffs, std::size_t L, const double* u, std::size_t m, double* out) {
  for (std::size_t j = 0; j < m; ++j) {
    if (L == 0) {
      out[j] = 0.0;
      continue;
    }
    const double y = std::cos(2.0 * std::numbers::pi * u[j]);
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = L - 1; k >= 1; --k) {
      const double b0 = 2.0 * coeffs[k] + 2.0 * y * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    out[j] = coeffs[0] + y * b1 - b2;
  }
}

}  // namespace uwbpulse::simd::scalar
