#include "uwbpulse/fcc_optimizer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fft.hpp"
#include "numeric.hpp"
#include "uwbpulse/errors.hpp"
#include "uwbpulse/simplex.hpp"

namespace uwbpulse {

std::vector<double> objective_weights(const SampledPulse& q, double f_lo, double f_hi, int L, long points) {
  if (L < 1) throw ConfigError("objective weights: L must be at least 1");
  if (!(f_hi > f_lo)) throw ConfigError("objective weights: empty passband");
  if (points % 2 == 0) ++points;
  const auto nu = detail::linspace(f_lo, f_hi, points);
  const auto w = detail::simpson_weights(f_lo, f_hi, points);
  const auto pw = power_spectrum(q, nu);
  std::vector<double> c(static_cast<std::size_t>(L), 0.0);
  for (int n = 0; n < L; ++n) {
    double s = 0.0;
    for (std::size_t j = 0; j < nu.size(); ++j) {
      const double phi = n == 0 ? 1.0 : 2.0 * std::cos(2.0 * std::numbers::pi * n * nu[j] * kT0);
      s += w[j] * pw[j] * phi;
    }
    c[static_cast<std::size_t>(n)] = s;
  }
  return c;
}

namespace {

struct ConstraintFamily {
  double a;
  double b;
  const CosinePoly* gamma;  // nullptr for the positivity constraint
};

void basis_row(double nu, double T0, int L, double* out) {
  out[0] = 1.0;
  for (int n = 1; n < L; ++n) out[n] = 2.0 * std::cos(2.0 * std::numbers::pi * n * nu * T0);
}

// Violation in units of `scale`: r^ - Gamma for upper families, floor - r^ for the lower one.
struct Violation {
  const ConstraintFamily& fam;
  const CosinePoly& rhat;
  double floor;
  double scale;

  std::vector<double> operator()(std::span<const double> nu) const {
    auto r = rhat.evaluate(nu);
    if (fam.gamma) {
      const auto g = fam.gamma->evaluate(nu);
      for (std::size_t j = 0; j < r.size(); ++j) r[j] = (r[j] - g[j]) / scale;
    } else {
      for (double& v : r) v = (floor - v) / scale;
    }
    return r;
  }
  double at(double nu) const {
    const double x[1] = {nu};
    return (*this)(x)[0];
  }
};

// Local maxima of v on the grid, refined by golden section.
std::vector<std::pair<double, double>> refined_peaks(const Violation& V, const std::vector<double>& grid,
                                                     const std::vector<double>& v, double threshold) {
  std::vector<std::pair<double, double>> out;
  const std::size_t n = grid.size();
  for (std::size_t k = 0; k < n; ++k) {
    const bool left = k == 0 || v[k] >= v[k - 1];
    const bool right = k + 1 == n || v[k] >= v[k + 1];
    if (!(left && right)) continue;
    const double lo = grid[k > 0 ? k - 1 : 0], hi = grid[std::min(k + 1, n - 1)];
    auto best = detail::golden_max([&](double x) { return V.at(x); }, lo, hi);
    if (v[k] > best.second) best = {grid[k], v[k]};
    if (best.second >= threshold) out.push_back(best);
  }
  return out;
}

}  // namespace

LpSolution solve_autocorr_lp(std::span<const double> weights, const MaskFit& fit, const LpOptions& opt) {
  const int L = static_cast<int>(weights.size());
  if (L < 1) throw ConfigError("LP: empty weight vector");
  if (fit.segments.empty()) throw UnboundedError("LP unbounded: no upper-bound segment supplied");
  const double T0 = fit.segments.front().gamma.T0;
  for (const auto& s : fit.segments)
    if (s.gamma.order() != L) throw ConfigError("LP: mask fits and weights have different orders");
  const double top = opt.band_top > 0.0 ? opt.band_top : 0.5 / T0;

  std::vector<ConstraintFamily> fams;
  for (const auto& s : fit.segments) fams.push_back({s.alpha, s.beta, &s.gamma});
  fams.push_back({0.0, top, nullptr});

  double scale = 0.0;
  for (const auto& f : fams) {
    if (!f.gamma) continue;
    const auto g = f.gamma->evaluate(detail::linspace(f.a, f.b, opt.grid_density));
    for (double v : g) scale = std::max(scale, v);
  }
  if (!(scale > 0.0)) throw InfeasibleError("LP infeasible: every mask fit is nonpositive");
  const double floor = opt.positivity_floor * scale;
  double cmax = 0.0;
  for (double c : weights) cmax = std::max(cmax, std::abs(c));
  if (!(cmax > 0.0)) throw ConfigError("LP: zero objective");
  Eigen::VectorXd c(L);
  for (int n = 0; n < L; ++n) c(n) = weights[static_cast<std::size_t>(n)] / cmax;

  std::vector<std::vector<double>> pts(fams.size());
  for (std::size_t i = 0; i < fams.size(); ++i) pts[i] = detail::linspace(fams[i].a, fams[i].b, opt.grid_density);
  std::vector<std::vector<double>> vgrid(fams.size());
  for (std::size_t i = 0; i < fams.size(); ++i)
    vgrid[i] = detail::linspace(fams[i].a, fams[i].b, static_cast<long>(opt.verify_factor) * opt.grid_density);

  LpSolution sol;
  SimplexResult lp;
  CosinePoly rhat{std::vector<double>(static_cast<std::size_t>(L), 0.0), T0};
  for (int round = 0;; ++round) {
    long rows = 0;
    for (const auto& p : pts) rows += static_cast<long>(p.size());
    Eigen::MatrixXd A(rows, L);
    Eigen::VectorXd b(rows);
    long k = 0;
    std::vector<double> row(static_cast<std::size_t>(L));
    for (std::size_t i = 0; i < fams.size(); ++i) {
      std::vector<double> gv;
      if (fams[i].gamma) gv = fams[i].gamma->evaluate(pts[i]);
      for (std::size_t j = 0; j < pts[i].size(); ++j, ++k) {
        basis_row(pts[i][j], T0, L, row.data());
        const double sgn = fams[i].gamma ? 1.0 : -1.0;
        for (int n = 0; n < L; ++n) A(k, n) = sgn * row[static_cast<std::size_t>(n)];
        b(k) = fams[i].gamma ? gv[j] / scale : -floor / scale;
      }
    }
    lp = solve_inequality_lp(A, b, c);
    sol.simplex_iterations += lp.iterations;
    sol.constraints = rows;
    sol.exchange_rounds = round;
    if (lp.status == SimplexResult::Status::infeasible)
      throw InfeasibleError("LP infeasible: mask fits and the positivity cone do not intersect");
    if (lp.status == SimplexResult::Status::unbounded)
      throw UnboundedError("LP unbounded: an upper-bound segment is missing");
    if (lp.status == SimplexResult::Status::iteration_limit) throw NumericalError("LP: simplex iteration limit");
    for (int n = 0; n < L; ++n) rhat.coeffs[static_cast<std::size_t>(n)] = lp.x(n) * scale;
    if (round >= opt.max_exchange_rounds) break;
    bool added = false;
    for (std::size_t i = 0; i < fams.size(); ++i) {
      Violation V{fams[i], rhat, floor, scale};
      const auto v = V(vgrid[i]);
      for (const auto& [x, val] : refined_peaks(V, vgrid[i], v, 1e-13)) {
        bool dup = false;
        for (double p : pts[i]) dup = dup || std::abs(p - x) <= 1e-12 * (fams[i].b - fams[i].a);
        if (!dup) {
          pts[i].push_back(x);
          added = true;
        }
      }
    }
    if (!added) break;
  }
  sol.lp_objective = lp.primal_objective * cmax * scale;
  sol.dual_bound = lp.dual_objective * cmax * scale;

  // Back-off: r' = s (r + eps e0), feasible on the verification grid.
  CosinePoly r = rhat;
  double lower_gap = 0.0;
  {
    Violation V{fams.back(), r, 0.0, scale};
    const auto v = V(vgrid.back());
    for (const auto& [x, val] : refined_peaks(V, vgrid.back(), v, -std::numeric_limits<double>::infinity()))
      lower_gap = std::max(lower_gap, val * scale);
  }
  r.coeffs[0] += lower_gap;
  double s = 1.0;
  for (std::size_t i = 0; i + 1 < fams.size(); ++i) {
    const auto rv = r.evaluate(vgrid[i]);
    const auto gv = fams[i].gamma->evaluate(vgrid[i]);
    std::vector<double> ratio_neg(rv.size());
    for (std::size_t j = 0; j < rv.size(); ++j) {
      if (gv[j] <= 0.0) throw InfeasibleError("LP infeasible: mask fit is nonpositive inside its segment");
      ratio_neg[j] = rv[j] > 0.0 ? rv[j] / gv[j] : 0.0;
    }
    for (std::size_t j = 0; j < rv.size(); ++j) {
      const bool left = j == 0 || ratio_neg[j] >= ratio_neg[j - 1];
      const bool right = j + 1 == rv.size() || ratio_neg[j] >= ratio_neg[j + 1];
      if (!(left && right) || ratio_neg[j] < 0.999) continue;
      const double lo = vgrid[i][j > 0 ? j - 1 : 0], hi = vgrid[i][std::min(j + 1, rv.size() - 1)];
      auto f = [&](double x) {
        const double g = (*fams[i].gamma)(x);
        return g > 0.0 ? r(x) / g : std::numeric_limits<double>::infinity();
      };
      const double peak = std::max(ratio_neg[j], detail::golden_max(f, lo, hi).second);
      if (peak > 1.0) s = std::min(s, 1.0 / peak);
    }
  }
  if (s < 1.0) s *= 1.0 - 1e-13;
  for (double& v : r.coeffs) v *= s;
  sol.backoff_scale = s;
  sol.backoff_shift = lower_gap;

  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fams.size(); ++i) {
    const auto rv = r.evaluate(vgrid[i]);
    if (fams[i].gamma) {
      const auto gv = fams[i].gamma->evaluate(vgrid[i]);
      for (std::size_t j = 0; j < rv.size(); ++j) margin = std::min(margin, (gv[j] - rv[j]) / scale);
    } else {
      for (double v : rv) margin = std::min(margin, v / scale);
    }
  }
  sol.feasibility_margin = margin;
  sol.r = AutocorrVector{r.coeffs, T0};
  double obj = 0.0;
  for (int n = 0; n < L; ++n) obj += weights[static_cast<std::size_t>(n)] * r.coeffs[static_cast<std::size_t>(n)];
  sol.objective = obj;
  return sol;
}

double orthogonality_preserving_check(const FilterTaps& g, int Delta) {
  if (Delta < 1) throw ConfigError("orthogonality check: Delta must be at least 1");
  const auto r = g.autocorrelation();
  double m = 0.0;
  for (std::size_t n = static_cast<std::size_t>(Delta); n < r.size(); n += static_cast<std::size_t>(Delta))
    m = std::max(m, std::abs(r[n]));
  return m;
}

std::vector<double> interdependence_power_delta2(const FilterTaps& g, const SampledPulse& q,
                                                 std::span<const double> nu) {
  const double T0 = g.clock;
  const CosinePoly rg{g.autocorrelation(), T0};
  const double r0 = rg.coeffs[0];
  const ShiftSymbol phi1(q, T0), phi2(q, 2.0 * T0);
  std::vector<double> u1(nu.size()), u2(nu.size());
  for (std::size_t j = 0; j < nu.size(); ++j) {
    u1[j] = nu[j] * T0;
    u2[j] = 2.0 * nu[j] * T0;
  }
  const auto P = phi1.evaluate(u1);
  const auto Psi = phi2.evaluate(u2);
  const auto rh = rg.evaluate(nu);
  std::vector<double> out(nu.size());
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (!(rh[j] > 0.0) || !(P[j] > 0.0)) throw UnstableError("interdependence filter: r^_g or Phi_q vanishes");
    const double phip = 2.0 * Psi[j] - P[j];
    out[j] = 1.0 / (1.0 + (2.0 * r0 / rh[j] - 1.0) * phip / P[j]);
  }
  return out;
}

CosinePoly interdependence_filter_delta2(const FilterTaps& g, const SampledPulse& q) {
  const double T0 = g.clock;
  for (long N = 512;; N *= 2) {
    std::vector<double> nu(static_cast<std::size_t>(N));
    for (long j = 0; j < N; ++j) nu[static_cast<std::size_t>(j)] = static_cast<double>(j) / (static_cast<double>(N) * T0);
    const auto f = interdependence_power_delta2(g, q, nu);
    std::vector<std::complex<double>> in(f.begin(), f.end()), out(static_cast<std::size_t>(N));
    detail::FftPlan plan(static_cast<int>(N), FFTW_FORWARD);
    plan.run(in.data(), out.data());
    std::vector<double> c(static_cast<std::size_t>(N / 2));
    for (long n = 0; n < N / 2; ++n) c[static_cast<std::size_t>(n)] = out[static_cast<std::size_t>(n)].real() / static_cast<double>(N);
    double tail = 0.0;
    for (long n = N / 4; n < N / 2; ++n) tail = std::max(tail, std::abs(c[static_cast<std::size_t>(n)]));
    if (tail <= 1e-14 * std::abs(c[0]) || N >= (1L << 16)) {
      long keep = N / 2;
      while (keep > 1 && std::abs(c[static_cast<std::size_t>(keep - 1)]) < 1e-16 * std::abs(c[0])) --keep;
      c.resize(static_cast<std::size_t>(keep));
      return CosinePoly{c, T0};
    }
  }
}

SampledPulse default_monocycle(const DesignOptions& opt) {
  const double dt = kT0 / opt.samples_per_T0;
  const long half = static_cast<long>(std::ceil(opt.Tq / (2.0 * dt) - 1e-9));
  return gaussian_monocycle(opt.fc, opt.Tq, TimeGrid::centered(dt, half), opt.window);
}

Design design_pulse(const SpectralMask& mask, const DesignOptions& opt) {
  if (opt.L < 1) throw ConfigError("design: L must be at least 1");
  Design d;
  d.q = default_monocycle(opt);
  d.fit = fit_mask_polynomials(mask, d.q, opt.L, opt.fit);
  d.weights = objective_weights(d.q, mask.pass_lo(), mask.pass_hi(), opt.L);
  d.lp = solve_autocorr_lp(d.weights, d.fit, opt.lp);
  d.factor = spectral_factorize_report(d.lp.r, opt.factor);
  auto p = semi_discrete_convolution(d.q, d.factor.g.taps, opt.samples_per_T0, true);
  d.p = p.scaled(1.0 / std::sqrt(p.energy()));
  d.alpha_star = alpha_star(d.p, mask);
  d.nesp = d.alpha_star * d.alpha_star * nesp(d.p, mask);
  return d;
}

}  // namespace uwbpulse
