#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "numeric.hpp"
#include "uwbpulse/errors.hpp"
#include "uwbpulse/io.hpp"
#include "uwbpulse/simd.hpp"
#include "uwbpulse/spectrum.hpp"

namespace uwbpulse {

SpectralMask::SpectralMask(std::vector<MaskSegment> segments) : segments_(std::move(segments)) {
  validate();
  auto best = std::max_element(segments_.begin(), segments_.end(),
                               [](const MaskSegment& a, const MaskSegment& b) { return a.level < b.level; });
  pass_lo_ = best->f_lo;
  pass_hi_ = best->f_hi;
}

SpectralMask::SpectralMask(std::vector<MaskSegment> segments, double pass_lo, double pass_hi)
    : segments_(std::move(segments)), pass_lo_(pass_lo), pass_hi_(pass_hi) {
  validate();
  if (!(pass_lo_ < pass_hi_) || pass_lo_ < 0.0 || pass_hi_ > f_max()) throw ConfigError("mask: invalid passband");
}

void SpectralMask::validate() const {
  if (segments_.empty()) throw ConfigError("mask: no segments");
  if (segments_.front().f_lo != 0.0) throw ConfigError("mask: first segment must start at 0 Hz");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!(s.f_hi > s.f_lo)) throw ConfigError("mask: empty segment " + std::to_string(i));
    if (!(s.level > 0.0)) throw ConfigError("mask: nonpositive level in segment " + std::to_string(i));
    if (i > 0 && std::abs(s.f_lo - segments_[i - 1].f_hi) > 1e-9 * s.f_lo)
      throw ConfigError("mask: segments do not partition the band at segment " + std::to_string(i));
  }
}

double SpectralMask::level(double f) const {
  f = std::abs(f);
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (f < s.f_hi) return s.level;
    if (f == s.f_hi) return i + 1 < segments_.size() ? std::min(s.level, segments_[i + 1].level) : s.level;
  }
  return segments_.back().level;
}

std::vector<double> SpectralMask::levels(std::span<const double> f) const {
  std::vector<double> out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = level(f[j]);
  return out;
}

SpectralMask SpectralMask::scaled(double c) const {
  auto segs = segments_;
  for (auto& s : segs) s.level *= c;
  return SpectralMask(std::move(segs), pass_lo_, pass_hi_);
}

SpectralMask SpectralMask::parse_csv(const std::string& text) {
  const auto rows = parse_numeric_csv(text, {"f_lo_hz", "f_hi_hz", "level_w_per_hz"});
  std::vector<MaskSegment> segs;
  for (const auto& r : rows) segs.push_back({r[0], r[1], r[2]});
  return SpectralMask(std::move(segs));
}

SpectralMask SpectralMask::load(const std::string& path) { return parse_csv(read_text(path)); }

SpectralMask fcc_mask_default() { return SpectralMask::parse_csv(bundled_fcc_mask_csv()); }

double CosinePoly::operator()(double nu) const {
  const double u[1] = {nu * T0};
  double out[1];
  simd::cospoly(coeffs, u, out);
  return out[0];
}

std::vector<double> CosinePoly::evaluate(std::span<const double> nu) const {
  std::vector<double> u(nu.size()), out(nu.size());
  for (std::size_t j = 0; j < nu.size(); ++j) u[j] = nu[j] * T0;
  simd::cospoly(coeffs, u, out);
  return out;
}

double basis_integral(long n, double T0, double a, double b) {
  if (n == 0) return b - a;
  const double w = 2.0 * std::numbers::pi * static_cast<double>(n) * T0;
  return 2.0 * (std::sin(w * b) - std::sin(w * a)) / w;
}

double mask_ratio(const SpectralMask& mask, const SampledPulse& q, double nu) {
  const double f[1] = {nu};
  const double qq = power_spectrum(q, f)[0];
  const double peak = q.energy() * q.duration();  // bound on |q^|^2 by Cauchy-Schwarz
  if (qq < 1e-300 * peak || qq == 0.0) throw NumericalError("mask ratio: |q^|^2 vanishes at the requested frequency");
  return mask.level(nu) / qq;
}

std::vector<CosinePoly> MaskFit::gammas() const {
  std::vector<CosinePoly> g;
  for (const auto& s : segments) g.push_back(s.gamma);
  return g;
}

std::vector<double> fit_interval_starts(const SpectralMask& mask) {
  const auto& segs = mask.segments();
  std::vector<double> a(segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    std::size_t j = i;
    while (j > 0 && segs[j - 1].level <= segs[i].level) --j;
    a[i] = segs[j].f_lo;
  }
  return a;
}

namespace {

struct RatioEval {
  const SampledPulse& q;
  double S;
  double hazard;

  std::vector<double> operator()(std::span<const double> nu) const {
    auto qq = power_spectrum(q, nu);
    std::vector<double> m(nu.size());
    for (std::size_t j = 0; j < nu.size(); ++j)
      m[j] = qq[j] <= hazard ? std::numeric_limits<double>::infinity() : S / qq[j];
    return m;
  }
  double at(double nu) const {
    const double f[1] = {nu};
    return (*this)(f)[0];
  }
};

// Phi_m * Phi_n integrated over [a, b], scaled by T0.
Eigen::MatrixXd basis_gram(int L, double T0, double a, double b) {
  auto I = [&](long k) { return basis_integral(k, T0, a, b) * T0; };
  Eigen::MatrixXd G(L, L);
  for (int m = 0; m < L; ++m) {
    for (int n = m; n < L; ++n) {
      double v;
      if (m == 0)
        v = I(n);
      else if (m == n)
        v = 2.0 * I(0) + I(2 * m);
      else
        v = I(std::abs(m - n)) + I(m + n);
      G(m, n) = G(n, m) = v;
    }
  }
  return G;
}

}  // namespace

MaskFit fit_mask_polynomials(const SpectralMask& mask, const SampledPulse& q, int L, const FitOptions& opt) {
  if (L < 1) throw ConfigError("fit: L must be at least 1");
  if (opt.grid_density < 8) throw ConfigError("fit: grid density below 8");
  const double T0 = kT0;
  const auto starts = fit_interval_starts(mask);
  const double hazard = 1e-300 * q.energy() * q.duration();
  MaskFit fit;
  for (std::size_t i = 0; i < mask.segments().size(); ++i) {
    const auto& seg = mask.segments()[i];
    const double a = starts[i], b = seg.f_hi;
    RatioEval M{q, seg.level, hazard};

    const auto grid = detail::linspace(a, b, opt.grid_density);
    const auto mg = M(grid);
    const auto kmin = static_cast<std::size_t>(std::min_element(mg.begin(), mg.end()) - mg.begin());
    const double lo = grid[kmin > 0 ? kmin - 1 : 0], hi = grid[std::min(kmin + 1, grid.size() - 1)];
    const double mmin =
        -detail::golden_max([&](double x) { return -M.at(x); }, lo, hi).second;
    if (!std::isfinite(mmin) || !(mmin > 0.0)) throw NumericalError("fit: mask ratio has no finite minimum");
    const double cap = opt.cap_factor * mmin;

    // Breakpoints where the ratio crosses the cap.
    std::vector<double> brk{a};
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const bool c0 = mg[k - 1] > cap, c1 = mg[k] > cap;
      if (c0 == c1) continue;
      double x0 = grid[k - 1], x1 = grid[k];
      for (int it = 0; it < 80; ++it) {
        const double xm = 0.5 * (x0 + x1);
        if ((M.at(xm) > cap) == c0)
          x0 = xm;
        else
          x1 = xm;
      }
      brk.push_back(0.5 * (x0 + x1));
    }
    brk.push_back(b);

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(L);
    for (std::size_t k = 0; k + 1 < brk.size(); ++k) {
      const double x0 = brk[k], x1 = brk[k + 1];
      if (x1 <= x0) continue;
      const double mid = M.at(0.5 * (x0 + x1));
      if (mid > cap) {
        for (int n = 0; n < L; ++n) rhs(n) += opt.cap_factor * basis_integral(n, T0, x0, x1) * T0;
        continue;
      }
      long nodes = static_cast<long>(std::ceil(opt.grid_density * (x1 - x0) / (b - a)));
      nodes = std::max(nodes, 16L);
      if (nodes % 2 == 0) ++nodes;
      const auto xs = detail::linspace(x0, x1, nodes);
      const auto w = detail::simpson_weights(x0, x1, nodes);
      const auto mv = M(xs);
      std::vector<double> u(xs.size());
      for (std::size_t j = 0; j < xs.size(); ++j) u[j] = xs[j] * T0;
      for (int n = 0; n < L; ++n) {
        double s = 0.0;
        for (std::size_t j = 0; j < xs.size(); ++j) {
          const double phi = n == 0 ? 1.0 : 2.0 * std::cos(2.0 * std::numbers::pi * n * u[j]);
          s += w[j] * std::min(mv[j], cap) / mmin * phi;
        }
        rhs(n) += s * T0;
      }
    }

    const Eigen::MatrixXd G = basis_gram(L, T0, a, b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const auto& lam = es.eigenvalues();
    const double lmax = lam.maxCoeff();
    const double lmin = lam.minCoeff();
    SegmentFit sf;
    sf.alpha = a;
    sf.beta = b;
    sf.level = seg.level;
    sf.condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
    if (opt.strict && sf.condition > 1.0 / opt.rcond)
      throw ConfigError("fit: L too large for segment width [" + format_number(a) + ", " + format_number(b) +
                        "] Hz (condition " + format_number(sf.condition) + ")");
    Eigen::VectorXd proj = es.eigenvectors().transpose() * rhs;
    for (int k = 0; k < L; ++k) {
      if (lam(k) > opt.rcond * lmax) {
        proj(k) /= lam(k);
        ++sf.rank;
      } else {
        proj(k) = 0.0;
      }
    }
    const Eigen::VectorXd g = es.eigenvectors() * proj * mmin;
    sf.gamma.coeffs.assign(g.data(), g.data() + L);
    sf.gamma.T0 = T0;

    const auto vgrid = detail::linspace(a, b, static_cast<long>(opt.verify_factor) * opt.grid_density);
    const auto mv = M(vgrid);
    const auto gv = sf.gamma.evaluate(vgrid);
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t kw = 0;
    for (std::size_t k = 0; k < vgrid.size(); ++k) {
      if (!std::isfinite(mv[k])) continue;
      sf.residual_sup = std::max(sf.residual_sup, std::abs(gv[k] - std::min(mv[k], cap)));
      if (gv[k] - mv[k] > worst) {
        worst = gv[k] - mv[k];
        kw = k;
      }
    }
    const double wlo = vgrid[kw > 0 ? kw - 1 : 0], whi = vgrid[std::min(kw + 1, vgrid.size() - 1)];
    const auto refined = detail::golden_max(
        [&](double x) {
          const double m = M.at(x);
          return std::isfinite(m) ? sf.gamma(x) - m : -std::numeric_limits<double>::infinity();
        },
        wlo, whi);
    worst = std::max(worst, refined.second);
    if (worst > 0.0) sf.offset = worst + 1e-12 * mmin;
    sf.gamma.coeffs[0] -= sf.offset;
    double gmin = std::numeric_limits<double>::infinity();
    for (double v : gv) gmin = std::min(gmin, v - sf.offset);
    sf.gamma_min = gmin;
    fit.segments.push_back(std::move(sf));
  }
  return fit;
}

}  // namespace uwbpulse
