#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace uwbpulse::detail {

// Golden-section search for a maximum of f on [a, b]; returns {x, f(x)}.
inline std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b,
                                            int iters = 60) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int k = 0; k < iters && (b - a) > 1e-15 * (std::abs(a) + std::abs(b) + 1e-300); ++k) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

inline std::vector<double> linspace(double a, double b, long n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (long k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  v.back() = b;
  return v;
}

// Composite Simpson weights for n (odd) equispaced nodes on [a, b].
inline std::vector<double> simpson_weights(double a, double b, long n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  const double h = (b - a) / static_cast<double>(n - 1);
  for (long k = 0; k < n; ++k) w[static_cast<std::size_t>(k)] = (k == 0 || k == n - 1) ? 1.0 : (k % 2 ? 4.0 : 2.0);
  for (double& x : w) x *= h / 3.0;
  return w;
}

}  // namespace uwbpulse::detail
