#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "uwbpulse/lowdin.hpp"
#include "uwbpulse/signals.hpp"

namespace uwbpulse {

enum class Scheme { PSM, OPPM_LO, OPPM_ALO };

const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);  // psm | oppm-lo | oppm-alo

struct LinkConfig {
  int N = 2;
  double T = 0.0;   // PPM shift
  double Ts = 0.0;  // symbol duration
  double energy = 1.0;
  double N0 = 1.0;
  Scheme scheme = Scheme::PSM;
  bool antipodal = false;

  void validate() const;
  bool is_oppm() const { return scheme != Scheme::PSM; }
};

struct SerResult {
  long trials = 0;
  long errors = 0;
  double ser = 0.0;
  double ci95 = 0.0;
  double bound = 0.0;
};

// Slot n is centered at n * Ts. PSM sends family member m; OPPM sends the
// template at offset (m - (N-1)/2) T within the slot.
SampledPulse modulate(const LinkConfig& cfg, const OrthogonalFamily& family, std::span<const int> messages,
                      std::uint64_t seed);
SampledPulse modulate(const LinkConfig& cfg, const SampledPulse& pulse, std::span<const int> messages,
                      std::uint64_t seed);

// Per-sample variance N0 / (2 dt).
SampledPulse awgn(const SampledPulse& u, double N0, std::uint64_t seed);

// Member m is assumed to sit in slot 0.
int receive_psm(const SampledPulse& r, const OrthogonalFamily& family);
int receive_oppm_slot(const SampledPulse& r, const SampledPulse& tmpl, const LinkConfig& cfg, long slot);
std::vector<int> receive_oppm(const SampledPulse& r, const SampledPulse& tmpl, const LinkConfig& cfg, long slots);

double bound_orthogonal(int N, double E, double N0);
double bound_oppm(std::span<const double> rho, double E, double N0);
// rho_{1j} = r((j-1) T) / r(0), j = 2..N
std::vector<double> measured_rho(const SampledPulse& tmpl, double T, int N);
// log2(N) / Ts
double uncoded_rate(int N, double Ts);
// N = 4K + 1 symbols in Ts = 150 T0
double bit_rate(int K);

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial);

// PSM uses the family members, OPPM the centered member as template.
SerResult simulate_ser(const LinkConfig& cfg, const OrthogonalFamily& family, long trials, std::uint64_t seed);

}  // namespace uwbpulse
