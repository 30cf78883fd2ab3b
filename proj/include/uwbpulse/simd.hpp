#pragma once

#include <complex>
#include <cstddef>
#include <span>

// Hot inner loops with a scalar reference and an AVX2 variant. The variant is
// chosen once at startup from CPUID; UWBPULSE_SIMD=scalar forces the reference.
namespace uwbpulse::simd {

enum class Isa { scalar, avx2 };

Isa active_isa();
const char* isa_name(Isa isa);
bool isa_available(Isa isa);
// Returns the previous selection. Throws ConfigError if unavailable.
Isa set_isa(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// (x, y) <- (c x - s y, s x + c y)
void rotate(std::span<double> x, std::span<double> y, double c, double s);
// out[j] = dt * sum_k x[k] exp(-2 pi i nu[j] (k + first) dt)
void dtft(std::span<const double> x, long first, double dt, std::span<const double> nu,
          std::span<std::complex<double>> out);
// out[j] = c0 + sum_{n>=1} 2 c_n cos(2 pi n u[j]), u in cycles
void cospoly(std::span<const double> coeffs, std::span<const double> u, std::span<double> out);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void rotate(double* x, double* y, std::size_t n, double c, double s);
void dtft(const double* x, std::size_t n, long first, double dt, const double* nu, std::size_t m,
          std::complex<double>* out);
void cospoly(const double* coeffs, std::size_t L, const double* u, std::size_t m, double* out);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void rotate(double* x, double* y, std::size_t n, double c, double s);
void dtft(const double* x, std::size_t n, long first, double dt, const double* nu, std::size_t m,
          std::complex<double>* out);
void cospoly(const double* coeffs, std::size_t L, const double* u, std::size_t m, double* out);
}  // namespace avx2

}  // namespace uwbpulse::simd
