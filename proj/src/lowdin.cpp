#include "uwbpulse/lowdin.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "fft.hpp"
#include "numeric.hpp"
#include "uwbpulse/errors.hpp"
#include "uwbpulse/linalg.hpp"
#include "uwbpulse/simd.hpp"

namespace uwbpulse {

using cd = std::complex<double>;

Eigen::MatrixXd ToeplitzGram::dense() const {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
  const long K = this->K();
  for (long i = 0; i < N; ++i)
    for (long j = 0; j < N; ++j) {
      const long d = std::abs(i - j);
      if (d <= K) G(i, j) = first_row[static_cast<std::size_t>(d)];
    }
  return G;
}

Eigen::MatrixXd CirculantGram::dense() const {
  Eigen::MatrixXd C(N, N);
  for (long i = 0; i < N; ++i)
    for (long j = 0; j < N; ++j) C(i, j) = first_row[static_cast<std::size_t>(((j - i) % N + N) % N)];
  return C;
}

std::vector<double> CirculantGram::eigenvalues() const {
  std::vector<cd> in(first_row.begin(), first_row.end()), out(static_cast<std::size_t>(N));
  detail::FftPlan plan(static_cast<int>(N), FFTW_FORWARD);
  plan.run(in.data(), out.data());
  std::vector<double> lam(static_cast<std::size_t>(N));
  for (long l = 0; l < N; ++l) lam[static_cast<std::size_t>(l)] = out[static_cast<std::size_t>(l)].real();
  return lam;
}

ToeplitzGram gram(const SampledPulse& p, double T, long M) {
  if (M < 1) throw ConfigError("gram: M must be at least 1");
  const ShiftSymbol sym(p, T);
  return ToeplitzGram{sym.lags(), 2 * M + 1, T};
}

Eigen::MatrixXd inv_sqrt_spd(const ToeplitzGram& G) { return inv_sqrt_spd(G.dense()); }

CirculantGram strang(const ToeplitzGram& G) {
  const long K = G.K(), M = G.M(), N = G.N;
  if (M < K) throw ConfigError("strang: band overflow, M = " + std::to_string(M) + " < K = " + std::to_string(K));
  std::vector<double> row(static_cast<std::size_t>(N), 0.0);
  row[0] = G.first_row[0];
  for (long n = 1; n <= K; ++n) {
    row[static_cast<std::size_t>(n)] = G.first_row[static_cast<std::size_t>(n)];
    row[static_cast<std::size_t>(N - n)] = G.first_row[static_cast<std::size_t>(n)];
  }
  return CirculantGram{row, N};
}

std::vector<SampledPulse> translates(const SampledPulse& p, double T, long M) {
  const long s = shift_in_samples(T, p.dt());
  std::vector<SampledPulse> out;
  for (long n = -M; n <= M; ++n) out.push_back(p.shifted(n * s));
  return out;
}

std::vector<SampledPulse> combine_translates(const SampledPulse& p, double T, long M, const Eigen::MatrixXd& C) {
  const long s = shift_in_samples(T, p.dt());
  const long N = 2 * M + 1;
  const long first = p.first() - M * s;
  const long len = p.size() + 2 * M * s;
  const double lo = p.support_lo() - static_cast<double>(M * s) * p.dt();
  const double hi = p.support_hi() + static_cast<double>(M * s) * p.dt();
  std::vector<SampledPulse> out;
  out.reserve(static_cast<std::size_t>(C.rows()));
  for (long m = 0; m < C.rows(); ++m) {
    std::vector<double> y(static_cast<std::size_t>(len), 0.0);
    for (long n = 0; n < N; ++n) {
      const double w = C(m, n);
      if (w == 0.0) continue;
      std::span<double> dst(y.data() + n * s, static_cast<std::size_t>(p.size()));
      simd::axpy(w, p.view(), dst);
    }
    out.emplace_back(p.dt(), first, std::move(y), lo, hi);
  }
  return out;
}

RieszBounds riesz_bounds(const SampledPulse& p, double T, long grid) {
  const ShiftSymbol sym(p, T);
  std::vector<double> u(static_cast<std::size_t>(grid));
  for (long k = 0; k < grid; ++k) u[static_cast<std::size_t>(k)] = static_cast<double>(k) / static_cast<double>(grid);
  const auto v = sym.evaluate(u);
  const auto kmin = static_cast<long>(std::min_element(v.begin(), v.end()) - v.begin());
  const auto kmax = static_cast<long>(std::max_element(v.begin(), v.end()) - v.begin());
  const double h = 1.0 / static_cast<double>(grid);
  RieszBounds rb;
  const auto lo = detail::golden_max([&](double x) { return -sym(x); }, (kmin - 1) * h, (kmin + 1) * h);
  const auto hi = detail::golden_max([&](double x) { return sym(x); }, (kmax - 1) * h, (kmax + 1) * h);
  rb.A = std::min(v[static_cast<std::size_t>(kmin)], -lo.second);
  rb.nu_A = -lo.second < v[static_cast<std::size_t>(kmin)] ? lo.first : u[static_cast<std::size_t>(kmin)];
  rb.B = std::max(v[static_cast<std::size_t>(kmax)], hi.second);
  rb.nu_B = hi.second > v[static_cast<std::size_t>(kmax)] ? hi.first : u[static_cast<std::size_t>(kmax)];
  rb.nu_A -= std::floor(rb.nu_A);
  rb.nu_B -= std::floor(rb.nu_B);
  if (!(rb.A > 0.0)) throw UnstableError("Riesz lower bound A <= 0: translates are not a Riesz basis at this shift");
  return rb;
}

OrthogonalFamily lowdin_family(const SampledPulse& p, double T, long M) {
  const auto rb = riesz_bounds(p, T);
  if (!(rb.A > 1e-8)) throw UnstableError("Riesz lower bound below 1e-8 at this shift");
  const auto G = gram(p, T, M);
  OrthogonalFamily fam;
  fam.kind = FamilyKind::LO;
  fam.M = M;
  fam.K = G.K();
  fam.T = T;
  fam.filters = inv_sqrt_spd(G);
  fam.pulses = combine_translates(p, T, M, fam.filters);
  return fam;
}

OrthogonalFamily alo_family(const SampledPulse& p, double T, long M) {
  const auto G = gram(p, T, M);
  const auto C = strang(G);
  const auto lam = C.eigenvalues();
  const long N = G.N, K = G.K();
  for (long l = 0; l < N; ++l)
    if (!(lam[static_cast<std::size_t>(l)] > 1e-12 * G.first_row[0]))
      throw UnstableError("ALO: Strang eigenvalue nonpositive, Riesz violation at nu = " + std::to_string(l) + "/" +
                          std::to_string(N));
  std::vector<double> w(static_cast<std::size_t>(N));
  for (long l = 0; l < N; ++l) w[static_cast<std::size_t>(l)] = 1.0 / std::sqrt(lam[static_cast<std::size_t>(l)]);

  const long s = shift_in_samples(T, p.dt());
  const long first = p.first() - M * s;
  const long len = p.size() + 2 * M * s;
  std::vector<std::vector<double>> data(static_cast<std::size_t>(N), std::vector<double>(static_cast<std::size_t>(len), 0.0));
  detail::FftPlan fwd(static_cast<int>(N), FFTW_FORWARD), inv(static_cast<int>(N), FFTW_BACKWARD);
  std::vector<cd> v(static_cast<std::size_t>(N)), V(static_cast<std::size_t>(N)), out(static_cast<std::size_t>(N));
  const long win2 = (2 * M - K) * s;  // |t| <= (M - K/2) T  <=>  2|i| <= (2M - K) s
  for (long i = first; i < first + len; ++i) {
    if (2 * std::abs(i) > win2) continue;
    for (long n = -M; n <= M; ++n) v[static_cast<std::size_t>((n + N) % N)] = p.at(i - n * s);
    fwd.run(v.data(), V.data());
    for (long l = 0; l < N; ++l) V[static_cast<std::size_t>(l)] *= w[static_cast<std::size_t>(l)];
    inv.run(V.data(), out.data());
    for (long k = -M; k <= M; ++k)
      data[static_cast<std::size_t>(k + M)][static_cast<std::size_t>(i - first)] =
          out[static_cast<std::size_t>((k + N) % N)].real() / static_cast<double>(N);
  }
  OrthogonalFamily fam;
  fam.kind = FamilyKind::ALO;
  fam.M = M;
  fam.K = K;
  fam.T = T;
  const double lo = p.support_lo() - static_cast<double>(M * s) * p.dt();
  const double hi = p.support_hi() + static_cast<double>(M * s) * p.dt();
  for (long k = 0; k < N; ++k) fam.pulses.emplace_back(p.dt(), first, std::move(data[static_cast<std::size_t>(k)]), lo, hi);
  // Equivalent circulant coefficients: first row of G~^{-1/2} = IDFT of lambda^{-1/2}.
  std::vector<cd> wc(w.begin(), w.end()), c(static_cast<std::size_t>(N));
  inv.run(wc.data(), c.data());
  fam.filters.resize(N, N);
  for (long m = 0; m < N; ++m)
    for (long n = 0; n < N; ++n)
      fam.filters(m, n) = c[static_cast<std::size_t>(((n - m) % N + N) % N)].real() / static_cast<double>(N);
  return fam;
}

namespace {

// Pulse spectrum on an FFT grid of size s * 2^j together with Phi at the
// 2^j distinct residues nu T mod 1.
struct LimitContext {
  long s = 0;
  long cycles = 0;  // 2^j
  long nfft = 0;
  double dt = 0.0;
  std::vector<cd> X;
  std::vector<double> phi;

  double phi_at(long k) const { return phi[static_cast<std::size_t>(k % cycles)]; }
  double u_at(long k) const { return static_cast<double>(k % cycles) / static_cast<double>(cycles); }
};

LimitContext make_context(const SampledPulse& p, double T, long cycles) {
  LimitContext ctx;
  ctx.s = shift_in_samples(T, p.dt());
  ctx.cycles = cycles;
  ctx.nfft = ctx.s * cycles;
  ctx.dt = p.dt();
  std::vector<cd> x(static_cast<std::size_t>(ctx.nfft), 0.0);
  for (long k = 0; k < p.size(); ++k) {
    const long i = p.first() + k;
    x[static_cast<std::size_t>(((i % ctx.nfft) + ctx.nfft) % ctx.nfft)] += p[k];
  }
  ctx.X.resize(static_cast<std::size_t>(ctx.nfft));
  detail::FftPlan plan(static_cast<int>(ctx.nfft), FFTW_FORWARD);
  plan.run(x.data(), ctx.X.data());
  const ShiftSymbol sym(p, T);
  std::vector<double> u(static_cast<std::size_t>(cycles));
  for (long k = 0; k < cycles; ++k) u[static_cast<std::size_t>(k)] = static_cast<double>(k) / static_cast<double>(cycles);
  ctx.phi = sym.evaluate(u);
  for (double v : ctx.phi)
    if (!(v > 0.0)) throw UnstableError("limit pulse: Phi vanishes, generator is not stable");
  return ctx;
}

long initial_cycles(const SampledPulse& p, long s) {
  long c = 16;
  while (c * s < 8 * p.size()) c *= 2;
  return c;
}

std::vector<double> inverse_real(const std::vector<cd>& Y) {
  const long n = static_cast<long>(Y.size());
  std::vector<cd> y(static_cast<std::size_t>(n));
  detail::FftPlan plan(static_cast<int>(n), FFTW_BACKWARD);
  plan.run(Y.data(), y.data());
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = y[static_cast<std::size_t>(k)].real() / static_cast<double>(n);
  return out;
}

}  // namespace

LimitPulse limit_pulse(const SampledPulse& p, double T) {
  const long s = shift_in_samples(T, p.dt());
  for (long cycles = initial_cycles(p, s);; cycles *= 2) {
    const auto ctx = make_context(p, T, cycles);
    std::vector<cd> Y(ctx.X.size());
    for (long k = 0; k < ctx.nfft; ++k) Y[static_cast<std::size_t>(k)] = ctx.X[static_cast<std::size_t>(k)] / std::sqrt(ctx.phi_at(k));
    const auto y = inverse_real(Y);
    double peak = 0.0, far = 0.0;
    const long n = ctx.nfft;
    const long center = std::lround(0.5 * static_cast<double>(p.first() + p.last()));
    for (long k = 0; k < n; ++k) {
      peak = std::max(peak, std::abs(y[static_cast<std::size_t>(k)]));
      long d = ((k - center) % n + n) % n;
      if (d > n / 2) d = n - d;
      if (d > n / 4) far = std::max(far, std::abs(y[static_cast<std::size_t>(k)]));
    }
    if (far > 1e-13 * peak && n < (1L << 24)) continue;
    // Signed index relative to the pulse center, then truncation at 1e-12 of peak.
    long lo = std::numeric_limits<long>::max(), hi = std::numeric_limits<long>::min();
    for (long k = 0; k < n; ++k) {
      if (std::abs(y[static_cast<std::size_t>(k)]) < 1e-12 * peak) continue;
      long d = ((k - center) % n + n) % n;
      if (d >= n / 2) d -= n;
      lo = std::min(lo, center + d);
      hi = std::max(hi, center + d);
    }
    std::vector<double> out(static_cast<std::size_t>(hi - lo + 1));
    for (long i = lo; i <= hi; ++i) out[static_cast<std::size_t>(i - lo)] = y[static_cast<std::size_t>(((i % n) + n) % n)];
    LimitPulse lp;
    lp.nfft = n;
    lp.truncation_radius = static_cast<double>(std::max(std::abs(lo - center), std::abs(hi - center))) * p.dt();
    lp.pulse = SampledPulse(p.dt(), lo, std::move(out));
    return lp;
  }
}

std::vector<double> sqrt_nyquist_power(const SampledPulse& p, double T, std::span<const double> freqs) {
  const ShiftSymbol sym(p, T);
  std::vector<double> u(freqs.size());
  for (std::size_t j = 0; j < freqs.size(); ++j) u[j] = freqs[j] * T - std::floor(freqs[j] * T);
  const auto phi = sym.evaluate(u);
  auto pw = power_spectrum(p, freqs);
  for (std::size_t j = 0; j < pw.size(); ++j) {
    if (!(phi[j] > 0.0)) throw UnstableError("Phi vanishes; no shift-orthonormal limit");
    pw[j] /= phi[j];
  }
  return pw;
}

Eigen::MatrixXd gram_schmidt_coefficients(const Eigen::MatrixXd& G) {
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw UnstableError("Gram-Schmidt: Gram matrix not positive definite");
  const Eigen::MatrixXd Lm = llt.matrixL();
  return Lm.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(G.rows(), G.cols()));
}

double coefficient_distortion(const Eigen::MatrixXd& C, const Eigen::MatrixXd& G) {
  const Eigen::MatrixXd D = C - Eigen::MatrixXd::Identity(C.rows(), C.cols());
  return (D * G * D.transpose()).trace();
}

double family_distortion(const OrthogonalFamily& fam, const SampledPulse& p) {
  const long s = shift_in_samples(fam.T, p.dt());
  double d = 0.0;
  for (long m = 0; m < fam.N(); ++m) {
    const auto& f = fam.pulses[static_cast<std::size_t>(m)];
    const auto pm = p.shifted((m - fam.M) * s);
    d += inner(f, f) - 2.0 * inner(f, pm) + inner(pm, pm);
  }
  return d;
}

double family_orthonormality_error(const OrthogonalFamily& fam) {
  double e = 0.0;
  for (long m = 0; m < fam.N(); ++m)
    for (long n = m; n < fam.N(); ++n) {
      const double v = inner(fam.pulses[static_cast<std::size_t>(m)], fam.pulses[static_cast<std::size_t>(n)]);
      e = std::max(e, std::abs(v - (m == n ? 1.0 : 0.0)));
    }
  return e;
}

namespace {

double distance_sq(const LimitContext& ctx, const std::function<cd(long)>& phase) {
  double s = 0.0;
  for (long k = 0; k < ctx.nfft; ++k) {
    const cd ratio = phase(k) / std::sqrt(ctx.phi_at(k));
    s += std::norm(ctx.X[static_cast<std::size_t>(k)]) * std::norm(1.0 - ratio);
  }
  return s * ctx.dt / static_cast<double>(ctx.nfft);
}

cd phase_from(const LimitContext& ctx, long k, const std::function<double(double)>& alpha) {
  const double u = ctx.u_at(k);
  const double a = u <= 0.5 ? alpha(u) : -alpha(1.0 - u);
  return std::polar(1.0, a);
}

}  // namespace

double alternative_generator_distance(const SampledPulse& p, double T, const std::function<double(double)>& alpha) {
  const long s = shift_in_samples(T, p.dt());
  const auto ctx = make_context(p, T, initial_cycles(p, s));
  return distance_sq(ctx, [&](long k) { return phase_from(ctx, k, alpha); });
}

OptimalityReport lowdin_optimality_probe(const SampledPulse& p, double T, int trials, std::uint64_t seed) {
  const long s = shift_in_samples(T, p.dt());
  const auto ctx = make_context(p, T, initial_cycles(p, s));
  OptimalityReport rep;
  rep.trials = trials;
  rep.lowdin_distance_sq = distance_sq(ctx, [](long) { return cd(1.0); });
  rep.min_alternative_sq = std::numeric_limits<double>::infinity();
  rep.min_gap = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pieces(2, 16);
  for (int t = 0; t < trials; ++t) {
    const int np = pieces(rng);
    std::vector<double> edges(static_cast<std::size_t>(np - 1));
    for (double& e : edges) e = 0.5 * unit(rng);
    std::sort(edges.begin(), edges.end());
    std::vector<double> level(static_cast<std::size_t>(np));
    for (double& a : level) a = std::numbers::pi * (2.0 * unit(rng) - 1.0);
    auto alpha = [&](double u) {
      const auto it = std::upper_bound(edges.begin(), edges.end(), u);
      return level[static_cast<std::size_t>(it - edges.begin())];
    };
    const double d = distance_sq(ctx, [&](long k) { return phase_from(ctx, k, alpha); });
    rep.min_alternative_sq = std::min(rep.min_alternative_sq, d);
    rep.min_gap = std::min(rep.min_gap, d - rep.lowdin_distance_sq);
    if (d < rep.lowdin_distance_sq) ++rep.violations;
  }
  const auto lim = limit_pulse(p, T).pulse;
  rep.closed_form = 2.0 * (1.0 - inner(p, lim));
  const auto parts = std::vector<SampledPulse>{p, lim};
  const double wts[2] = {1.0, -1.0};
  const auto diff = sum_pulses(parts, wts);
  rep.direct = diff.energy();
  return rep;
}

}  // namespace uwbpulse
