#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <numbers>

#include "numeric.hpp"
#include "uwbpulse/errors.hpp"
#include "uwbpulse/fcc_optimizer.hpp"

namespace uwbpulse {

namespace {

using cd = std::complex<double>;

std::vector<double> autocorr_taps(const std::vector<double>& g) {
  const std::size_t L = g.size();
  std::vector<double> r(L, 0.0);
  for (std::size_t n = 0; n < L; ++n)
    for (std::size_t k = 0; k + n < L; ++k) r[n] += g[k] * g[k + n];
  return r;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Radix-2 diagonal similarity balancing (Parlett-Reinsch).
void balance(Eigen::MatrixXd& A) {
  const long n = A.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (long i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (long j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(A(j, i));
        r += std::abs(A(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / 2.0, f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= 2.0;
        c *= 4.0;
      }
      g = r * 2.0;
      while (c > g) {
        f /= 2.0;
        c /= 4.0;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        A.row(i) /= f;
        A.col(i) *= f;
      }
    }
  }
}

// Roots of sum_k a[k] z^k (a.back() != 0).
std::vector<cd> poly_roots(const std::vector<double>& a) {
  const long d = static_cast<long>(a.size()) - 1;
  if (d < 1) return {};
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d, d);
  for (long j = 0; j < d; ++j) C(0, j) = -a[static_cast<std::size_t>(d - 1 - j)] / a[static_cast<std::size_t>(d)];
  for (long i = 1; i < d; ++i) C(i, i - 1) = 1.0;
  balance(C);
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
  if (es.info() != Eigen::Success) throw NumericalError("companion eigenvalue iteration did not converge");
  std::vector<cd> z(static_cast<std::size_t>(d));
  for (long i = 0; i < d; ++i) z[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  // Newton polish on the original coefficients.
  for (auto& x : z) {
    for (int it = 0; it < 4; ++it) {
      cd p = a[static_cast<std::size_t>(d)], dp = 0.0;
      for (long k = d - 1; k >= 0; --k) {
        dp = dp * x + p;
        p = p * x + a[static_cast<std::size_t>(k)];
      }
      if (std::abs(dp) == 0.0) break;
      const cd nx = x - p / dp;
      cd q = a[static_cast<std::size_t>(d)];
      for (long k = d - 1; k >= 0; --k) q = q * nx + a[static_cast<std::size_t>(k)];
      if (std::abs(q) >= std::abs(p)) break;
      x = nx;
    }
  }
  return z;
}

// Wilson's Newton iteration for ac(g) = r.
bool wilson_polish(std::vector<double>& g, const std::vector<double>& r, int iters) {
  const long L = static_cast<long>(g.size());
  double prev = max_abs_diff(autocorr_taps(g), r);
  const auto ginit = g;
  for (int it = 0; it < iters; ++it) {
    const auto ac = autocorr_taps(g);
    Eigen::VectorXd F(L);
    for (long n = 0; n < L; ++n) F(n) = ac[static_cast<std::size_t>(n)] - r[static_cast<std::size_t>(n)];
    const double err = F.lpNorm<Eigen::Infinity>();
    if (err <= 4e-16 * r[0]) break;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(L, L);
    for (long n = 0; n < L; ++n)
      for (long j = 0; j < L; ++j) {
        double v = 0.0;
        if (j + n < L) v += g[static_cast<std::size_t>(j + n)];
        if (j - n >= 0) v += g[static_cast<std::size_t>(j - n)];
        J(n, j) = v;
      }
    const Eigen::VectorXd step = J.fullPivLu().solve(-F);
    if (!step.allFinite()) break;
    auto trial = g;
    for (long j = 0; j < L; ++j) trial[static_cast<std::size_t>(j)] += step(j);
    const double terr = max_abs_diff(autocorr_taps(trial), r);
    if (!(terr < err)) break;
    g = trial;
    prev = terr;
  }
  if (!(prev < 1e-6 * r[0])) {
    g = ginit;
    return false;
  }
  return true;
}

std::vector<double> factor_by_roots(const std::vector<double>& r) {
  const long L = static_cast<long>(r.size());
  std::vector<double> a(static_cast<std::size_t>(2 * L - 1));
  for (long k = 0; k < 2 * L - 1; ++k) a[static_cast<std::size_t>(k)] = r[static_cast<std::size_t>(std::abs(k - (L - 1)))];
  auto z = poly_roots(a);
  std::sort(z.begin(), z.end(), [](const cd& x, const cd& y) {
    if (std::abs(x) != std::abs(y)) return std::abs(x) < std::abs(y);
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  std::vector<cd> poly{1.0};
  for (long k = 0; k < L - 1; ++k) {
    std::vector<cd> next(poly.size() + 1, 0.0);
    for (std::size_t j = 0; j < poly.size(); ++j) {
      next[j] += poly[j];
      next[j + 1] -= poly[j] * z[static_cast<std::size_t>(k)];
    }
    poly = std::move(next);
  }
  double big = 0.0, imag = 0.0;
  for (const auto& c : poly) {
    big = std::max(big, std::abs(c));
    imag = std::max(imag, std::abs(c.imag()));
  }
  if (imag > 1e-6 * big) throw NumericalError("root selection split a conjugate pair");
  std::vector<double> g(poly.size());
  for (std::size_t j = 0; j < poly.size(); ++j) g[j] = poly[j].real();
  const auto ac = autocorr_taps(g);
  double num = 0.0, den = 0.0;
  for (long n = 0; n < L; ++n) {
    num += ac[static_cast<std::size_t>(n)] * r[static_cast<std::size_t>(n)];
    den += ac[static_cast<std::size_t>(n)] * ac[static_cast<std::size_t>(n)];
  }
  const double c = std::sqrt(num / den);
  for (double& v : g) v *= c;
  return g;
}

// Bauer's method: the last row of the Cholesky factor of the n x n banded
// Toeplitz matrix converges to the minimum-phase factor.
std::vector<double> factor_by_bauer(const std::vector<double>& r) {
  const long L = static_cast<long>(r.size());
  const long b = L - 1;
  std::deque<std::vector<double>> rows;  // rows[k] holds l_{i, i-b..i}
  std::vector<double> prev(static_cast<std::size_t>(L), 0.0), cur(static_cast<std::size_t>(L), 0.0);
  const long max_rows = 1L << 18;
  for (long i = 0; i < max_rows; ++i) {
    std::vector<double> row(static_cast<std::size_t>(b + 1), 0.0);  // index j - (i - b)
    for (long j = std::max(0L, i - b); j <= i; ++j) {
      double s = r[static_cast<std::size_t>(i - j)];
      const std::vector<double>* rj = j == i ? &row : &rows[static_cast<std::size_t>(rows.size() - static_cast<std::size_t>(i - j))];
      for (long k = std::max(0L, i - b); k < j; ++k) {
        const double lik = row[static_cast<std::size_t>(k - (i - b))];
        const double ljk = (*rj)[static_cast<std::size_t>(k - (j - b))];
        s -= lik * ljk;
      }
      if (j < i) {
        row[static_cast<std::size_t>(j - (i - b))] = s / (*rj)[static_cast<std::size_t>(b)];
      } else {
        if (!(s > 0.0)) throw NumericalError("Bauer iteration lost positive definiteness");
        row[static_cast<std::size_t>(b)] = std::sqrt(s);
      }
    }
    rows.push_back(row);
    if (static_cast<long>(rows.size()) > b + 1) rows.pop_front();
    if (i >= b && (i % 64 == 0)) {
      for (long k = 0; k < L; ++k) cur[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(b - k)];
      if (max_abs_diff(cur, prev) < 1e-13 * std::sqrt(r[0])) return cur;
      prev = cur;
    }
  }
  return cur;
}

}  // namespace

std::vector<double> FilterTaps::autocorrelation() const { return autocorr_taps(taps); }

std::vector<std::complex<double>> filter_zeros(std::span<const double> g) {
  std::vector<double> a(g.rbegin(), g.rend());
  while (a.size() > 1 && a.back() == 0.0) a.pop_back();
  return poly_roots(a);
}

Factorization spectral_factorize_report(const AutocorrVector& rv, const FactorizeOptions& opt) {
  if (rv.r.empty()) throw ConfigError("factorization: empty autocorrelation");
  const double r0 = rv.r[0];
  if (!(r0 > 0.0)) throw UnstableError("factorization: r0 must be positive");
  // Positivity of r^ on a dense check grid.
  {
    const long n = std::max<long>(8192, 64 * rv.order());
    const auto u = detail::linspace(0.0, 0.5, n);
    std::vector<double> nu(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) nu[j] = u[j] / rv.T0;
    const auto v = rv.spectrum().evaluate(nu);
    const double mn = *std::min_element(v.begin(), v.end());
    if (mn < opt.positivity_eps * r0)
      throw UnstableError("factorization unstable: r^ touches zero (min " + std::to_string(mn / r0) +
                          " of r0); re-solve with a larger positivity margin");
  }
  std::vector<double> r(rv.r);
  for (double& x : r) x /= r0;
  long Le = static_cast<long>(r.size());
  while (Le > 1 && std::abs(r[static_cast<std::size_t>(Le - 1)]) < 1e-15) --Le;
  r.resize(static_cast<std::size_t>(Le));

  Factorization out;
  std::vector<double> g;
  bool ok = false;
  if (Le == 1) {
    g = {1.0};
    ok = true;
    out.method = "trivial";
  }
  if (!ok && !opt.force_bauer) {
    try {
      g = factor_by_roots(r);
      ok = wilson_polish(g, r, opt.newton_iterations);
      if (ok) {
        double mx = 0.0;
        for (const auto& z : filter_zeros(g)) mx = std::max(mx, std::abs(z));
        ok = mx <= 1.0 + 1e-9;
      }
      out.method = "roots";
    } catch (const NumericalError&) {
      ok = false;
    }
  }
  if (!ok) {
    g = factor_by_bauer(r);
    ok = wilson_polish(g, r, opt.newton_iterations);
    out.method = "bauer";
    if (!ok) throw NumericalError("spectral factorization failed to converge");
  }
  if (g[0] < 0.0)
    for (double& v : g) v = -v;
  const double s = std::sqrt(r0);
  for (double& v : g) v *= s;
  g.resize(rv.r.size(), 0.0);
  out.g = FilterTaps{g, rv.T0};
  out.max_lag_error = max_abs_diff(autocorr_taps(g), rv.r);
  for (const auto& z : filter_zeros(g)) out.max_root_modulus = std::max(out.max_root_modulus, std::abs(z));
  return out;
}

FilterTaps spectral_factorize(const AutocorrVector& r, const FactorizeOptions& opt) {
  return spectral_factorize_report(r, opt).g;
}

}  // namespace uwbpulse
