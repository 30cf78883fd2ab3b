#include <immintrin.h>

#include <cmath>
#include <numbers>

#include "uwbpulse/simd.hpp"

namespace uwbpulse::simd::avx2 {

namespace {
constexpr std::size_t kAnchor = 32;

void unit_phasor(double cycles, double& re, double& im) {
  const double frac = cycles - std::nearbyint(cycles);
  const double th = -2.0 * std::numbers::pi * frac;
  re = std::cos(th);
  im = std::sin(th);
}

double hsum(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] + t[1]) + (t[2] + t[3]);
}
}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), s1);
  }
  for (; k + 4 <= n; k += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), s0);
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4)
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  for (; k < n; ++k) y[k] += alpha * x[k];
}

void rotate(double* x, double* y, std::size_t n, double c, double s) {
  const __m256d vc = _mm256_set1_pd(c), vs = _mm256_set1_pd(s);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d xk = _mm256_loadu_pd(x + k);
    const __m256d yk = _mm256_loadu_pd(y + k);
    _mm256_storeu_pd(x + k, _mm256_fmsub_pd(vc, xk, _mm256_mul_pd(vs, yk)));
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(vs, xk, _mm256_mul_pd(vc, yk)));
  }
  for (; k < n; ++k) {
    const double xk = x[k], yk = y[k];
    x[k] = c * xk - s * yk;
    y[k] = s * xk + c * yk;
  }
}

// Four frequencies per lane group, each lane running its own phasor recurrence.
void dtft(const double* x, std::size_t n, long first, double dt, const double* nu, std::size_t m,
          std::complex<double>* out) {
  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) {
    alignas(32) double wr[4], wi[4], zr[4], zi[4], step[4];
    for (int l = 0; l < 4; ++l) {
      step[l] = nu[j + l] * dt;
      unit_phasor(step[l], wr[l], wi[l]);
    }
    const __m256d vwr = _mm256_load_pd(wr), vwi = _mm256_load_pd(wi);
    __m256d are = _mm256_setzero_pd(), aim = _mm256_setzero_pd();
    __m256d vzr = _mm256_setzero_pd(), vzi = _mm256_setzero_pd();
    for (std::size_t k = 0; k < n; ++k) {
      if (k % kAnchor == 0) {
        const double idx = static_cast<double>(static_cast<long>(k) + first);
        for (int l = 0; l < 4; ++l) unit_phasor(step[l] * idx, zr[l], zi[l]);
        vzr = _mm256_load_pd(zr);
        vzi = _mm256_load_pd(zi);
      }
      const __m256d xk = _mm256_set1_pd(x[k]);
      are = _mm256_fmadd_pd(xk, vzr, are);
      aim = _mm256_fmadd_pd(xk, vzi, aim);
      const __m256d nr = _mm256_fmsub_pd(vzr, vwr, _mm256_mul_pd(vzi, vwi));
      const __m256d ni = _mm256_fmadd_pd(vzr, vwi, _mm256_mul_pd(vzi, vwr));
      vzr = nr;
      vzi = ni;
    }
    alignas(32) double rr[4], ri[4];
    _mm256_store_pd(rr, are);
    _mm256_store_pd(ri, aim);
    for (int l = 0; l < 4; ++l) out[j + l] = {rr[l] * dt, ri[l] * dt};
  }
  if (j < m) scalar::dtft(x, n, first, dt, nu + j, m - j, out + j);
}

void cospoly(const double* coeffs, std::size_t L, const double* u, std::size_t m, double* out) {
  if (L == 0) {
    for (std::size_t j = 0; j < m; ++j) out[j] = 0.0;
    return;
  }
  std::size_t j = 0;
  const __m256d two = _mm256_set1_pd(2.0);
  for (; j + 4 <= m; j += 4) {
    alignas(32) double y[4];
    for (int l = 0; l < 4; ++l) y[l] = std::cos(2.0 * std::numbers::pi * u[j + l]);
    const __m256d vy = _mm256_load_pd(y);
    const __m256d y2 = _mm256_mul_pd(two, vy);
    __m256d b1 = _mm256_setzero_pd(), b2 = _mm256_setzero_pd();
    for (std::size_t k = L - 1; k >= 1; --k) {
      const __m256d ck = _mm256_set1_pd(2.0 * coeffs[k]);
      const __m256d b0 = _mm256_sub_pd(_mm256_fmadd_pd(y2, b1, ck), b2);
      b2 = b1;
      b1 = b0;
    }
    const __m256d r = _mm256_sub_pd(_mm256_fmadd_pd(vy, b1, _mm256_set1_pd(coeffs[0])), b2);
    _mm256_storeu_pd(out + j, r);
  }
  if (j < m) scalar::cospoly(coeffs, L, u + j, m - j, out + j);
}

}  // namespace uwbpulse::simd::avx2
