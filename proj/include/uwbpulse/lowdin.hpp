#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "uwbpulse/signals.hpp"

namespace uwbpulse {

struct ToeplitzGram {
  std::vector<double> first_row;  // r_p(nT), n = 0..K
  long N = 0;
  double T = 0.0;

  long K() const { return static_cast<long>(first_row.size()) - 1; }
  long M() const { return (N - 1) / 2; }
  Eigen::MatrixXd dense() const;
};

struct CirculantGram {
  std::vector<double> first_row;  // length N
  long N = 0;

  Eigen::MatrixXd dense() const;
  // DFT of the first row
  std::vector<double> eigenvalues() const;
};

enum class FamilyKind { LO, ALO };

struct OrthogonalFamily {
  std::vector<SampledPulse> pulses;  // member m is attached to the translate (m - M) T
  FamilyKind kind = FamilyKind::LO;
  long M = 0;
  long K = 0;
  double T = 0.0;
  Eigen::MatrixXd filters;  // row m: h^M_m, the coefficients on p(. - nT), n = -M..M

  const SampledPulse& centered() const { return pulses[static_cast<std::size_t>(M)]; }
  long N() const { return 2 * M + 1; }
};

ToeplitzGram gram(const SampledPulse& p, double T, long M);
Eigen::MatrixXd inv_sqrt_spd(const ToeplitzGram& G);
CirculantGram strang(const ToeplitzGram& G);

// The translates p(. - nT), n = -M..M, on a common grid.
std::vector<SampledPulse> translates(const SampledPulse& p, double T, long M);
// Members sum_n C(m, n) p(. - nT) on the translates' common grid.
std::vector<SampledPulse> combine_translates(const SampledPulse& p, double T, long M, const Eigen::MatrixXd& C);

OrthogonalFamily lowdin_family(const SampledPulse& p, double T, long M);
OrthogonalFamily alo_family(const SampledPulse& p, double T, long M);

struct RieszBounds {
  double A = 0.0;
  double B = 0.0;
  double nu_A = 0.0;
  double nu_B = 0.0;
};

RieszBounds riesz_bounds(const SampledPulse& p, double T, long grid = 4096);

struct LimitPulse {
  SampledPulse pulse;
  double truncation_radius = 0.0;  // seconds
  long nfft = 0;
};

LimitPulse limit_pulse(const SampledPulse& p, double T);
// |p^(nu)|^2 / Phi_p(nu T): power spectrum of the shift-orthonormal limit.
std::vector<double> sqrt_nyquist_power(const SampledPulse& p, double T, std::span<const double> freqs);

// Gram-Schmidt on the translates in order n = -M..M: coefficient matrix C with
// members sum_n C(m, n) p(. - nT).
Eigen::MatrixXd gram_schmidt_coefficients(const Eigen::MatrixXd& G);
// sum_m || sum_n C(m,n) p_n - p_m ||^2 = tr((C - I) G (C - I)')
double coefficient_distortion(const Eigen::MatrixXd& C, const Eigen::MatrixXd& G);
// sum_m || family_m - p(. - (m - M) T) ||^2 by quadrature
double family_distortion(const OrthogonalFamily& fam, const SampledPulse& p);

// Max |<f_m, f_n> - delta_mn|
double family_orthonormality_error(const OrthogonalFamily& fam);

struct OptimalityReport {
  int trials = 0;
  double lowdin_distance_sq = 0.0;   // ||p - p°||^2 on the FFT grid
  double min_alternative_sq = 0.0;  // smallest ||p - p°_phi||^2 over the trials
  double min_gap = 0.0;             // min over trials of alternative - lowdin
  int violations = 0;               // trials with alternative < lowdin
  double closed_form = 0.0;         // 2 (1 - <p, p°>)
  double direct = 0.0;              // ||p - p°||^2 by time-domain quadrature
};

// alpha(u) is the phase on [0, 1/2] (u in cycles per shift); it is extended by
// alpha(1 - u) = -alpha(u) so the alternative generator stays real.
double alternative_generator_distance(const SampledPulse& p, double T, const std::function<double(double)>& alpha);

OptimalityReport lowdin_optimality_probe(const SampledPulse& p, double T, int trials, std::uint64_t seed = 1);

}  // namespace uwbpulse
