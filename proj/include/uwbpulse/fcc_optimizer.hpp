#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uwbpulse/signals.hpp"
#include "uwbpulse/spectrum.hpp"

namespace uwbpulse {

struct FilterTaps {
  std::vector<double> taps;
  double clock = kT0;

  // r_g(n) = sum_k g_k g_{k+n}, n = 0..L-1
  std::vector<double> autocorrelation() const;
};

struct AutocorrVector {
  std::vector<double> r;
  double T0 = kT0;

  CosinePoly spectrum() const { return CosinePoly{r, T0}; }
  long order() const { return static_cast<long>(r.size()); }
};

// c_n = int_{passband} |q^(nu)|^2 phi_n(nu) dnu by composite Simpson on `points` nodes.
std::vector<double> objective_weights(const SampledPulse& q, double f_lo, double f_hi, int L, long points = 4097);

struct LpOptions {
  int grid_density = 512;
  int verify_factor = 4;
  // Lower bound on r^ relative to the largest Gamma value, keeps the factorization away from zero.
  double positivity_floor = 1e-7;
  int max_exchange_rounds = 40;
  // Upper edge of the positivity constraint; 1/(2 T0) when zero.
  double band_top = 0.0;
};

struct LpSolution {
  AutocorrVector r;
  double objective = 0.0;       // c'r at the returned point
  double dual_bound = 0.0;      // dual objective of the final discretized LP
  double lp_objective = 0.0;    // primal objective before back-off
  double feasibility_margin = 0.0;  // min over the verification grid of min(r^, Gamma_i - r^), relative
  double backoff_scale = 1.0;
  double backoff_shift = 0.0;
  int simplex_iterations = 0;
  int exchange_rounds = 0;
  long constraints = 0;
};

LpSolution solve_autocorr_lp(std::span<const double> weights, const MaskFit& fit, const LpOptions& opt = {});

struct FactorizeOptions {
  // r^ must stay above eps * r0 on the check grid.
  double positivity_eps = 1e-12;
  int newton_iterations = 60;
  bool force_bauer = false;
};

struct Factorization {
  FilterTaps g;
  std::string method;
  double max_lag_error = 0.0;
  double max_root_modulus = 0.0;
};

Factorization spectral_factorize_report(const AutocorrVector& r, const FactorizeOptions& opt = {});
FilterTaps spectral_factorize(const AutocorrVector& r, const FactorizeOptions& opt = {});

// Roots of g_0 z^{L-1} + g_1 z^{L-2} + ... + g_{L-1}.
std::vector<std::complex<double>> filter_zeros(std::span<const double> g);

// max_{k != 0} |r_g(k Delta)|
double orthogonality_preserving_check(const FilterTaps& g, int Delta);

// |g~_{2,g}(nu)|^2 = (1 + (2 r_{g,0}/r^_g(nu) - 1) Phi'_q(nu)/Phi_q(nu))^{-1}, evaluated directly.
std::vector<double> interdependence_power_delta2(const FilterTaps& g, const SampledPulse& q,
                                                 std::span<const double> nu);
// The same function as a cosine polynomial in the T0 basis, by DCT of one period.
CosinePoly interdependence_filter_delta2(const FilterTaps& g, const SampledPulse& q);

struct DesignOptions {
  double fc = 6.85e9;
  double Tq = 6.0 * kT0;
  int L = 25;
  int samples_per_T0 = kSamplesPerT0;
  Window window = Window::triangle;
  FitOptions fit;
  LpOptions lp;
  FactorizeOptions factor;
};

struct Design {
  SampledPulse q;
  MaskFit fit;
  std::vector<double> weights;
  LpSolution lp;
  Factorization factor;
  SampledPulse p;  // unit-energy optimized pulse, centered
  double alpha_star = 0.0;
  double nesp = 0.0;
};

SampledPulse default_monocycle(const DesignOptions& opt);
Design design_pulse(const SpectralMask& mask, const DesignOptions& opt = {});

}  // namespace uwbpulse
