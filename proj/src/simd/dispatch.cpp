#include <atomic>
#include <cstdlib>
#include <cstring>

#include "uwbpulse/errors.hpp"
#include "uwbpulse/simd.hpp"

namespace uwbpulse::simd {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  const char* env = std::getenv("UWBPULSE_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::scalar;
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw ConfigError("simd: operand length mismatch");
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

Isa set_isa(Isa isa) {
  if (!isa_available(isa)) throw ConfigError(std::string("simd: ") + isa_name(isa) + " not supported on this CPU");
  return current().exchange(isa);
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  if (active_isa() == Isa::avx2) return avx2::dot(a.data(), b.data(), a.size());
  return scalar::dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  if (active_isa() == Isa::avx2) return avx2::axpy(alpha, x.data(), y.data(), x.size());
  scalar::axpy(alpha, x.data(), y.data(), x.size());
}

void rotate(std::span<double> x, std::span<double> y, double c, double s) {
  check_sizes(x.size(), y.size());
  if (active_isa() == Isa::avx2) return avx2::rotate(x.data(), y.data(), x.size(), c, s);
  scalar::rotate(x.data(), y.data(), x.size(), c, s);
}

void dtft(std::span<const double> x, long first, double dt, std::span<const double> nu,
          std::span<std::complex<double>> out) {
  check_sizes(nu.size(), out.size());
  if (active_isa() == Isa::avx2)
    return avx2::dtft(x.data(), x.size(), first, dt, nu.data(), nu.size(), out.data());
  scalar::dtft(x.data(), x.size(), first, dt, nu.data(), nu.size(), out.data());
}

void cospoly(std::span<const double> coeffs, std::span<const double> u, std::span<double> out) {
  check_sizes(u.size(), out.size());
  if (active_isa() == Isa::avx2)
    return avx2::cospoly(coeffs.data(), coeffs.size(), u.data(), u.size(), out.data());
  scalar::cospoly(coeffs.data(), coeffs.size(), u.data(), u.size(), out.data());
}

}  // namespace uwbpulse::simd
