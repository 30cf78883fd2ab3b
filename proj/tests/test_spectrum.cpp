#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "uwbpulse/errors.hpp"
#include "uwbpulse/spectrum.hpp"

using namespace uwbpulse;

namespace {

SampledPulse monocycle() { return gaussian_monocycle(6.85e9, 6.0 * kT0, TimeGrid::centered(kDefaultDt, 96)); }

std::vector<double> grid(double a, double b, long n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1);
  return g;
}

}  // namespace

TEST_CASE("bundled FCC indoor mask") {
  const auto m = fcc_mask_default();
  REQUIRE(m.segments().size() == 5);
  const double edges[] = {0.0, 1.61e9, 1.99e9, 3.1e9, 10.6e9, 14e9};
  const double dbm[] = {-75.3, -53.3, -51.3, -41.3, -51.3};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(m.segments()[i].f_lo == doctest::Approx(edges[i]).epsilon(1e-12));
    CHECK(m.segments()[i].f_hi == doctest::Approx(edges[i + 1]).epsilon(1e-12));
    // dBm/MHz to W/Hz
    CHECK(m.segments()[i].level == doctest::Approx(std::pow(10.0, dbm[i] / 10.0) * 1e-9).epsilon(1e-12));
  }
  CHECK(m.pass_lo() == doctest::Approx(3.1e9).epsilon(1e-12));
  CHECK(m.pass_hi() == doctest::Approx(10.6e9).epsilon(1e-12));
  CHECK(m.f_max() == doctest::Approx(14e9).epsilon(1e-12));
  CHECK(m.level(3.1e9) == m.segments()[2].level);
  CHECK(m.level(10.6e9) == m.segments()[4].level);
  CHECK(m.level(5e9) == m.segments()[3].level);
  CHECK(m.level(-5e9) == m.segments()[3].level);
  CHECK(m.scaled(2.0).level(5e9) == doctest::Approx(2.0 * m.level(5e9)).epsilon(1e-12));
}

TEST_CASE("mask CSV validation") {
  CHECK_THROWS_AS(SpectralMask::parse_csv("f_lo_hz,f_hi_hz,level_w_per_hz\n1,2,1e-15\n"), ConfigError);
  CHECK_THROWS_AS(SpectralMask::parse_csv("f_lo_hz,f_hi_hz,level_w_per_hz\n0,2,1e-15\n3,4,1e-15\n"), ConfigError);
  CHECK_THROWS_AS(SpectralMask::parse_csv("f_lo_hz,f_hi_hz,level_w_per_hz\n0,2,0\n"), ConfigError);
  CHECK_THROWS_AS(SpectralMask::parse_csv("f_lo,f_hi,level\n0,2,1\n"), ParseError);
  CHECK_THROWS_AS(SpectralMask::parse_csv("f_lo_hz,f_hi_hz,level_w_per_hz\n0,2\n"), ParseError);
  CHECK_THROWS_AS(SpectralMask::load("/nonexistent/mask.csv"), Error);
}

TEST_CASE("fit intervals start at the run of lower-or-equal levels") {
  const auto a = fit_interval_starts(fcc_mask_default());
  REQUIRE(a.size() == 5);
  CHECK(a[0] == 0.0);
  CHECK(a[1] == 0.0);
  CHECK(a[2] == 0.0);
  CHECK(a[3] == 0.0);
  CHECK(a[4] == doctest::Approx(10.6e9).epsilon(1e-12));
  const SpectralMask m({{0, 1, 3.0}, {1, 2, 1.0}, {2, 3, 2.0}, {3, 4, 2.0}});
  const auto b = fit_interval_starts(m);
  CHECK(b == std::vector<double>{0.0, 1.0, 1.0, 1.0});
}

TEST_CASE("basis integrals match Simpson quadrature") {
  for (long n : {0L, 1L, 7L, 24L}) {
    const double a = 1.99e9, b = 3.1e9;
    const long N = 20001;
    const double h = (b - a) / (N - 1);
    double s = 0.0;
    for (long k = 0; k < N; ++k) {
      const double f = a + k * h;
      const double phi = n == 0 ? 1.0 : 2.0 * std::cos(2.0 * std::numbers::pi * n * f * kT0);
      s += phi * (k == 0 || k == N - 1 ? 1.0 : (k % 2 ? 4.0 : 2.0));
    }
    s *= h / 3.0;
    CHECK(basis_integral(n, kT0, a, b) == doctest::Approx(s).epsilon(1e-10).scale(b - a));
  }
}

TEST_CASE("mask fits stay below the mask ratio on the verification grid") {
  const auto q = monocycle();
  const auto mask = fcc_mask_default();
  for (int L : {1, 5, 25}) {
    const auto fit = fit_mask_polynomials(mask, q, L);
    REQUIRE(fit.segments.size() == 5);
    for (const auto& s : fit.segments) {
      CHECK(s.gamma.order() == L);
      CHECK(s.gamma_min > 0.0);
      for (double f : grid(s.alpha, s.beta, 4 * 512)) {
        const double ratio = s.level / std::norm(fixtures::naive_dtft(q, f));
        CHECK(s.gamma(f) <= ratio * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("strict fits refuse ill-conditioned normal matrices") {
  const auto q = monocycle();
  const auto mask = fcc_mask_default();
  const auto fit = fit_mask_polynomials(mask, q, 25);
  bool any_bad = false;
  for (const auto& s : fit.segments) any_bad = any_bad || s.condition > 1e8;
  FitOptions strict;
  strict.strict = true;
  if (any_bad) {
    CHECK_THROWS_WITH_AS(fit_mask_polynomials(mask, q, 25, strict), doctest::Contains("L too large"), ConfigError);
  } else {
    CHECK_NOTHROW(fit_mask_polynomials(mask, q, 25, strict));
  }
  CHECK_NOTHROW(fit_mask_polynomials(mask, q, 1, strict));
}

TEST_CASE("alpha star scales the pulse onto the mask") {
  const auto q = monocycle();
  const auto mask = fcc_mask_default();
  const double a = alpha_star(q, mask);
  double worst = 0.0;
  for (double f : sup_grid(mask)) worst = std::max(worst, a * a * std::norm(fixtures::naive_dtft(q, f)) / mask.level(f));
  CHECK(worst <= 1.0);
  CHECK(worst >= 1.0 - 1e-5);
  CHECK(alpha_star(q.scaled(3.0), mask) == doctest::Approx(a / 3.0).epsilon(1e-12));
  CHECK(alpha_star(spectrum(q, 1 << 16), mask) == doctest::Approx(a).epsilon(1e-3));
}

TEST_CASE("NESP: scaling laws, bound by one, two quadratures") {
  const auto q = monocycle();
  const auto mask = fcc_mask_default();
  const double n1 = nesp(q, mask);
  CHECK(nesp(q.scaled(2.0), mask) == doctest::Approx(4.0 * n1).epsilon(1e-12));
  const double c = compliant_nesp(q, mask);
  CHECK(c == doctest::Approx(compliant_nesp(q.scaled(0.1), mask)).epsilon(1e-10));
  CHECK(c > 0.0);
  CHECK(c <= 1.0);
  CHECK(nesp(spectrum(q, 1 << 20), mask) == doctest::Approx(n1).epsilon(5e-4));
  double pass = 0.0;
  for (const auto& s : mask.segments()) if (s.f_lo >= mask.pass_lo() && s.f_hi <= mask.pass_hi()) pass += s.level * (s.f_hi - s.f_lo);
  const auto f = grid(mask.pass_lo(), mask.pass_hi(), 4001);
  double num = 0.0;
  for (std::size_t j = 0; j + 1 < f.size(); ++j)
    num += 0.5 * (std::norm(fixtures::naive_dtft(q, f[j])) + std::norm(fixtures::naive_dtft(q, f[j + 1]))) * (f[j + 1] - f[j]);
  CHECK(n1 == doctest::Approx(num / pass).epsilon(1e-5));
}

TEST_CASE("PPM phase average and time-hopping factor match direct sums") {
  for (long N : {1L, 2L, 5L, 9L}) {
    for (double nu : {0.0, 1e9, 3.3e9, 28e9 / 5.0}) {
      const double T = 5.0 * kT0;
      std::complex<double> ref = 0.0;
      for (long d = 0; d < N; ++d) ref += std::polar(1.0, -2.0 * std::numbers::pi * nu * d * T);
      ref /= static_cast<double>(N);
      CHECK(std::abs(ppm_phase_average(nu, T, N) - ref) <= 1e-12);
      std::complex<double> g = 0.0;
      const long Nc = 3;
      const double Tc = N * T;
      for (long c = 0; c < Nc; ++c)
        for (long d = 0; d < N; ++d) g += std::polar(1.0, -2.0 * std::numbers::pi * nu * (c * Tc + d * T));
      g /= static_cast<double>(N * Nc);
      CHECK(std::abs(g_beta(nu, Nc, Tc, N, T) - g) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(ppm_phase_average(1e9, kT0, 0), ConfigError);
}

TEST_CASE("PAM/PPM PSD: zero-mean amplitudes give E |p^|^2 / Ts and no lines") {
  const auto q = monocycle();
  const double Ts = 150.0 * kT0, E = 2.0;
  const auto f = grid(0.5e9, 12e9, 50);
  const auto psd = psd_pam_ppm(q, f, E, Ts, 0.0, 1.0, 5.0 * kT0, 9);
  CHECK(psd.lines.empty());
  for (std::size_t j = 0; j < f.size(); ++j)
    CHECK(psd.values[j] == doctest::Approx(E * std::norm(fixtures::naive_dtft(q, f[j])) / Ts).epsilon(1e-10));
}

TEST_CASE("PAM/PPM PSD: deterministic amplitudes concentrate into lines at n/Ts") {
  const auto q = monocycle();
  const double Ts = 150.0 * kT0, E = 1.0;
  const auto f = grid(1e9, 2e9, 11);
  const auto psd = psd_pam_ppm(q, f, E, Ts, 1.0, 0.0, 5.0 * kT0, 1);
  for (std::size_t j = 0; j < f.size(); ++j) CHECK(psd.values[j] <= 1e-12 * E * std::norm(fixtures::naive_dtft(q, f[j])) / Ts);
  REQUIRE(!psd.lines.empty());
  for (const auto& l : psd.lines) {
    const double n = l.f * Ts;
    CHECK(std::abs(n - std::round(n)) < 1e-9);
    CHECK(l.power == doctest::Approx(E * std::norm(fixtures::naive_dtft(q, l.f)) / (Ts * Ts)).epsilon(1e-10));
  }
}

TEST_CASE("time-hopping PSD rejects violated frame constraints") {
  const auto q = monocycle();
  const std::vector<double> f = {1e9};
  CHECK_THROWS_WITH_AS(psd_th_framed(q, f, 1.0, 100 * kT0, 4, 10 * kT0, 3, 5 * kT0), doctest::Contains("N*T <= Tc"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(psd_th_framed(q, f, 1.0, 30 * kT0, 4, 10 * kT0, 2, 5 * kT0), doctest::Contains("Nc*Tc <= Tf"),
                       ConfigError);
  const auto ok = psd_th_framed(q, f, 1.0, 40 * kT0, 4, 10 * kT0, 2, 5 * kT0);
  CHECK(ok.values[0] >= 0.0);
}
