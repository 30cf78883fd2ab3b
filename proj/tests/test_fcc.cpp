#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "uwbpulse/errors.hpp"
#include "uwbpulse/fcc_optimizer.hpp"
#include "uwbpulse/lowdin.hpp"

using namespace uwbpulse;

namespace {

std::vector<double> autocorr_of(const std::vector<double>& g) {
  std::vector<double> r(g.size(), 0.0);
  for (std::size_t n = 0; n < g.size(); ++n)
    for (std::size_t k = 0; k + n < g.size(); ++k) r[n] += g[k] * g[k + n];
  return r;
}

double pass_integral(const SpectralMask& m) {
  double s = 0.0;
  for (const auto& seg : m.segments())
    if (seg.f_lo >= m.pass_lo() && seg.f_hi <= m.pass_hi()) s += seg.level * (seg.f_hi - seg.f_lo);
  return s;
}

}  // namespace

TEST_CASE("L = 1 design is the scaled monocycle") {
  const auto& d = fixtures::design(1);
  REQUIRE(d.factor.g.taps.size() == 1);
  CHECK(d.factor.method == "trivial");
  CHECK(d.factor.g.taps[0] > 0.0);
  const auto q = d.q.scaled(1.0 / std::sqrt(d.q.energy()));
  REQUIRE(d.p.size() == q.size());
  for (long k = 0; k < q.size(); ++k) CHECK(d.p[k] == doctest::Approx(q[k]).epsilon(1e-12).scale(1e-12));
  CHECK(d.nesp == doctest::Approx(compliant_nesp(d.q, fcc_mask_default())).epsilon(1e-12));
}

TEST_CASE("L = 25 design spans 30 T0") {
  const auto& d = fixtures::design(25);
  CHECK(d.p.duration() == doctest::Approx(30.0 * kT0).epsilon(1e-12));
  CHECK(d.p.energy() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.factor.g.taps.size() == 25);
  CHECK(d.factor.g.taps[0] > 0.0);
}

TEST_CASE("objective weights match a trapezoid quadrature of the naive DTFT") {
  const auto q = default_monocycle({});
  const double a = 3.1e9, b = 10.6e9;
  const auto c = objective_weights(q, a, b, 6);
  const long N = 6001;
  std::vector<double> pw(N);
  for (long j = 0; j < N; ++j) pw[static_cast<std::size_t>(j)] = std::norm(fixtures::naive_dtft(q, a + (b - a) * j / (N - 1)));
  for (int n = 0; n < 6; ++n) {
    double s = 0.0;
    for (long j = 0; j + 1 < N; ++j) {
      const double f0 = a + (b - a) * j / (N - 1), f1 = a + (b - a) * (j + 1) / (N - 1);
      const double phi0 = n ? 2.0 * std::cos(2.0 * std::numbers::pi * n * f0 * kT0) : 1.0;
      const double phi1 = n ? 2.0 * std::cos(2.0 * std::numbers::pi * n * f1 * kT0) : 1.0;
      s += 0.5 * (phi0 * pw[static_cast<std::size_t>(j)] + phi1 * pw[static_cast<std::size_t>(j + 1)]) * (f1 - f0);
    }
    CHECK(c[static_cast<std::size_t>(n)] == doctest::Approx(s).epsilon(1e-6).scale(c[0]));
  }
  CHECK_THROWS_AS(objective_weights(q, a, b, 0), ConfigError);
}

TEST_CASE("LP solution: certificate, feasibility on the dense grid, objective as passband energy") {
  const auto mask = fcc_mask_default();
  for (int L : {5, 25}) {
    const auto& d = fixtures::design(L);
    const auto& lp = d.lp;
    CHECK(lp.feasibility_margin >= 0.0);
    CHECK(lp.dual_bound >= lp.objective * (1.0 - 1e-12));
    CHECK((lp.dual_bound - lp.objective) / std::abs(lp.dual_bound) <= 1e-5);
    double top = 0.0;
    for (const auto& s : d.fit.segments)
      for (long k = 0; k < 4 * 512; ++k) {
        const double f = s.alpha + (s.beta - s.alpha) * k / (4 * 512 - 1);
        const double rh = fixtures::naive_cos_series(lp.r.r, f * kT0);
        top = std::max(top, s.gamma(f));
        CHECK(rh >= -1e-12 * top);
        CHECK(rh <= s.gamma(f) + 1e-12 * top);
      }
    // c'r equals the passband energy of q *' g
    double cr = 0.0;
    for (std::size_t n = 0; n < lp.r.r.size(); ++n) cr += d.weights[n] * lp.r.r[n];
    CHECK(cr == doctest::Approx(lp.objective).epsilon(1e-12));
    const auto p = semi_discrete_convolution(d.q, d.factor.g.taps, kSamplesPerT0, true);
    CHECK(nesp(p, mask, 8193) * pass_integral(mask) == doctest::Approx(lp.objective).epsilon(1e-6));
  }
}

TEST_CASE("optimal objective and NESP grow with L") {
  const double o5 = fixtures::design(5).lp.objective, o15 = fixtures::design(15).lp.objective,
               o25 = fixtures::design(25).lp.objective;
  CHECK(o15 >= o5 * (1.0 - 1e-9));
  CHECK(o25 >= o15 * (1.0 - 1e-9));
  CHECK(fixtures::design(25).nesp > fixtures::design(5).nesp);
  CHECK(fixtures::design(5).nesp > fixtures::design(1).nesp);
  CHECK(fixtures::design(25).nesp <= 1.0);
}

TEST_CASE("spectral factorization round trip on the L = 25 solution") {
  const auto& d = fixtures::design(25);
  const auto r = d.lp.r.r;
  const auto rg = autocorr_of(d.factor.g.taps);
  double err = 0.0;
  for (std::size_t n = 0; n < r.size(); ++n) err = std::max(err, std::abs(rg[n] - r[n]));
  CHECK(err <= 1e-7 * r[0]);
  CHECK(err <= 1e-7);
  CHECK(d.factor.max_lag_error == doctest::Approx(err).scale(1e-20).epsilon(1e-12));
  for (const auto& z : filter_zeros(d.factor.g.taps)) CHECK(std::abs(z) <= 1.0 + 1e-9);
}

TEST_CASE("spectral factorization round trip on random strictly positive autocorrelations") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> len(2, 30);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> h(static_cast<std::size_t>(len(rng)));
    for (double& x : h) x = g(rng);
    auto r = autocorr_of(h);
    const double r0 = r[0];
    for (double& x : r) x /= r0;
    r[0] += 0.02;
    const auto f = spectral_factorize_report(AutocorrVector{r});
    const auto rg = autocorr_of(f.g.taps);
    double err = 0.0;
    for (std::size_t n = 0; n < r.size(); ++n) err = std::max(err, std::abs(rg[n] - r[n]));
    CHECK(err <= 1e-7 * r[0]);
    CHECK(f.g.taps[0] > 0.0);
    CHECK(f.max_root_modulus <= 1.0 + 1e-9);
  }
}

TEST_CASE("forced Bauer factorization agrees with the roots path") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> h(8);
    for (double& x : h) x = g(rng);
    auto r = autocorr_of(h);
    r[0] *= 1.5;
    FactorizeOptions opt;
    opt.force_bauer = true;
    const auto b = spectral_factorize_report(AutocorrVector{r}, opt);
    const auto z = spectral_factorize_report(AutocorrVector{r});
    CHECK(b.method == "bauer");
    CHECK(z.method == "roots");
    CHECK(b.max_lag_error <= 1e-7 * r[0]);
    for (std::size_t k = 0; k < h.size(); ++k) CHECK(b.g.taps[k] == doctest::Approx(z.g.taps[k]).epsilon(1e-6).scale(1e-6));
  }
}

TEST_CASE("factorization rejects non-positive spectra") {
  CHECK_THROWS_AS(spectral_factorize(AutocorrVector{{0.0, 1.0}}), UnstableError);
  // 1 + cos has a double zero at nu = 1/2
  CHECK_THROWS_AS(spectral_factorize(AutocorrVector{{1.0, 0.5}}), UnstableError);
  CHECK_THROWS_AS(spectral_factorize(AutocorrVector{{1.0, 0.9}}), UnstableError);
  const auto t = spectral_factorize(AutocorrVector{{4.0}});
  CHECK(t.taps == std::vector<double>{2.0});
}

TEST_CASE("filter zeros and the Delta-orthogonality check") {
  const std::vector<double> g = {1.0, -0.5};
  const auto z = filter_zeros(g);
  REQUIRE(z.size() == 1);
  CHECK(z[0].real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(orthogonality_preserving_check(FilterTaps{{1.0}}, 1) == 0.0);
  CHECK(orthogonality_preserving_check(FilterTaps{{1.0}}, 3) == 0.0);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(orthogonality_preserving_check(FilterTaps{{s, s}}, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(orthogonality_preserving_check(FilterTaps{{s, s}}, 2) == 0.0);
  const auto& taps = fixtures::design(25).factor.g.taps;
  const auto r = autocorr_of(taps);
  for (int D : {1, 2, 5}) {
    double mx = 0.0;
    for (std::size_t k = static_cast<std::size_t>(D); k < r.size(); k += static_cast<std::size_t>(D)) mx = std::max(mx, std::abs(r[k]));
    CHECK(orthogonality_preserving_check(fixtures::design(25).factor.g, D) == doctest::Approx(mx).epsilon(1e-12));
  }
}

TEST_CASE("semi-discrete convolution autocorrelation is r_g convolved with r_q") {
  const auto& d = fixtures::design(5);
  const auto& g = d.factor.g.taps;
  const auto p = semi_discrete_convolution(d.q, g, kSamplesPerT0, true);
  const auto rg = autocorr_of(g);
  const long L = static_cast<long>(g.size());
  for (long lag : {0L, 7L, 32L, 100L, 200L}) {
    double s = 0.0;
    for (long m = -(L - 1); m <= L - 1; ++m) s += rg[static_cast<std::size_t>(std::abs(m))] * fixtures::naive_autocorr(d.q, lag - m * kSamplesPerT0);
    CHECK(fixtures::naive_autocorr(p, lag) == doctest::Approx(s).epsilon(1e-10).scale(rg[0] * d.q.energy()));
  }
}

TEST_CASE("Delta = 1: orthogonalizing q *' g equals orthogonalizing q") {
  const auto& d = fixtures::design(25);
  const auto p = semi_discrete_convolution(d.q, d.factor.g.taps, kSamplesPerT0, true);
  std::vector<double> f;
  for (int k = 0; k <= 200; ++k) f.push_back(1e9 + 12e9 * k / 200.0);
  const auto a = sqrt_nyquist_power(p, kT0, f);
  const auto b = sqrt_nyquist_power(d.q, kT0, f);
  for (std::size_t j = 0; j < f.size(); ++j) CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-8));
}

TEST_CASE("Delta = 2 interdependence filter") {
  const auto q = default_monocycle({});
  std::vector<double> f;
  for (int k = 0; k <= 100; ++k) f.push_back(2e9 + 10e9 * k / 100.0);
  // Phi over integer shifts, Phi' over odd half shifts, summed directly over one period of the sampled spectrum
  auto phi = [&](double nu, bool odd) {
    double s = 0.0;
    for (int k = -kSamplesPerT0 / 2; k < kSamplesPerT0 / 2; ++k) {
      const double x = odd ? nu + (2.0 * k + 1.0) / (2.0 * kT0) : nu + k / kT0;
      s += std::norm(fixtures::naive_dtft(q, x));
    }
    return s;
  };
  const auto imp = interdependence_power_delta2(FilterTaps{{1.0}}, q, f);
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double P = phi(f[j], false), Pp = phi(f[j], true);
    CHECK(imp[j] == doctest::Approx(P / (P + Pp)).epsilon(1e-9));
  }
  const auto& g = fixtures::design(5).factor.g;
  const auto direct = interdependence_power_delta2(g, q, f);
  const auto rh = CosinePoly{g.autocorrelation(), kT0};
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double P = phi(f[j], false), Pp = phi(f[j], true);
    CHECK(direct[j] == doctest::Approx(1.0 / (1.0 + (2.0 * rh.coeffs[0] / rh(f[j]) - 1.0) * Pp / P)).epsilon(1e-8));
  }
  const auto poly = interdependence_filter_delta2(g, q);
  for (std::size_t j = 0; j < f.size(); ++j) CHECK(poly(f[j]) == doctest::Approx(direct[j]).epsilon(1e-9).scale(1e-9));
}
