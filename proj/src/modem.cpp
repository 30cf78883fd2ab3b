#include "uwbpulse/modem.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>
#include <thread>

#include "uwbpulse/errors.hpp"
#include "uwbpulse/simd.hpp"

namespace uwbpulse {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::PSM: return "psm";
    case Scheme::OPPM_LO: return "oppm-lo";
    case Scheme::OPPM_ALO: return "oppm-alo";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "psm") return Scheme::PSM;
  if (name == "oppm-lo") return Scheme::OPPM_LO;
  if (name == "oppm-alo") return Scheme::OPPM_ALO;
  throw ConfigError("unknown scheme '" + name + "' (expected psm, oppm-lo or oppm-alo)");
}

void LinkConfig::validate() const {
  if (N < 2) throw ConfigError("link: N must be at least 2");
  if (!(energy > 0.0)) throw ConfigError("link: energy must be positive");
  if (!(N0 >= 0.0)) throw ConfigError("link: N0 must be nonnegative");
  if (!(Ts > 0.0)) throw ConfigError("link: Ts must be positive");
  if (is_oppm()) {
    if (!(T > 0.0)) throw ConfigError("link: T must be positive for OPPM");
    if (static_cast<double>(N) * T > Ts * (1.0 + 1e-12)) throw ConfigError("link: N T exceeds Ts");
  }
}

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) {
  std::uint64_t z = (base ^ trial) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

void check_messages(std::span<const int> messages, int N) {
  for (int m : messages)
    if (m < 0 || m >= N) throw ConfigError("message " + std::to_string(m) + " outside 0.." + std::to_string(N - 1));
}

double flip(std::mt19937_64& rng, bool antipodal) {
  if (!antipodal) return 1.0;
  return (rng() >> 63) ? -1.0 : 1.0;
}

long oppm_offset(int m, int N, long s) { return static_cast<long>(m) * s - (static_cast<long>(N - 1) * s) / 2; }

// Places scaled copies of pulses at absolute sample offsets.
SampledPulse place(const std::vector<const SampledPulse*>& parts, const std::vector<long>& offsets,
                   const std::vector<double>& weights) {
  const double dt = parts.front()->dt();
  long first = parts[0]->first() + offsets[0], last = parts[0]->last() + offsets[0];
  for (std::size_t j = 0; j < parts.size(); ++j) {
    first = std::min(first, parts[j]->first() + offsets[j]);
    last = std::max(last, parts[j]->last() + offsets[j]);
  }
  std::vector<double> y(static_cast<std::size_t>(last - first + 1), 0.0);
  for (std::size_t j = 0; j < parts.size(); ++j) {
    const auto& p = *parts[j];
    std::span<double> dst(y.data() + (p.first() + offsets[j] - first), static_cast<std::size_t>(p.size()));
    simd::axpy(weights[j], p.view(), dst);
  }
  return SampledPulse(dt, first, std::move(y), static_cast<double>(first) * dt, static_cast<double>(last) * dt);
}

SampledPulse modulate_psm(const LinkConfig& cfg, const OrthogonalFamily& family, std::span<const int> messages,
                          std::mt19937_64& rng) {
  if (messages.empty()) throw ConfigError("modulate: no messages");
  if (cfg.N > family.N()) throw ConfigError("modulate: N exceeds the family size");
  check_messages(messages, cfg.N);
  const double dt = family.pulses.front().dt();
  const long ts = shift_in_samples(cfg.Ts, dt);
  std::vector<const SampledPulse*> parts;
  std::vector<long> offsets;
  std::vector<double> weights;
  for (std::size_t n = 0; n < messages.size(); ++n) {
    parts.push_back(&family.pulses[static_cast<std::size_t>(messages[n])]);
    offsets.push_back(static_cast<long>(n) * ts);
    weights.push_back(std::sqrt(cfg.energy) * flip(rng, cfg.antipodal));
  }
  return place(parts, offsets, weights);
}

SampledPulse modulate_oppm(const LinkConfig& cfg, const SampledPulse& pulse, std::span<const int> messages,
                           std::mt19937_64& rng) {
  if (messages.empty()) throw ConfigError("modulate: no messages");
  check_messages(messages, cfg.N);
  const long ts = shift_in_samples(cfg.Ts, pulse.dt());
  const long s = shift_in_samples(cfg.T, pulse.dt());
  std::vector<const SampledPulse*> parts;
  std::vector<long> offsets;
  std::vector<double> weights;
  for (std::size_t n = 0; n < messages.size(); ++n) {
    parts.push_back(&pulse);
    offsets.push_back(static_cast<long>(n) * ts + oppm_offset(messages[n], cfg.N, s));
    weights.push_back(std::sqrt(cfg.energy) * flip(rng, cfg.antipodal));
  }
  return place(parts, offsets, weights);
}

void add_noise(std::vector<double>& x, double sigma, std::mt19937_64& rng) {
  if (sigma == 0.0) return;
  std::normal_distribution<double> g(0.0, sigma);
  for (double& v : x) v += g(rng);
}

// <r, tmpl(. - shift)>
double correlate(const SampledPulse& r, const SampledPulse& tmpl, long shift) {
  const long lo = std::max(r.first(), tmpl.first() + shift);
  const long hi = std::min(r.last(), tmpl.last() + shift);
  if (hi < lo) return 0.0;
  const auto n = static_cast<std::size_t>(hi - lo + 1);
  return simd::dot(r.view().subspan(static_cast<std::size_t>(lo - r.first()), n),
                   tmpl.view().subspan(static_cast<std::size_t>(lo - shift - tmpl.first()), n)) *
         r.dt();
}

SampledPulse crop(const SampledPulse& u, long lo, long hi) {
  std::vector<double> v(static_cast<std::size_t>(hi - lo + 1));
  for (long i = lo; i <= hi; ++i) v[static_cast<std::size_t>(i - lo)] = u.at(i);
  return SampledPulse(u.dt(), lo, std::move(v), static_cast<double>(lo) * u.dt(), static_cast<double>(hi) * u.dt());
}

}  // namespace

SampledPulse modulate(const LinkConfig& cfg, const OrthogonalFamily& family, std::span<const int> messages,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return modulate_psm(cfg, family, messages, rng);
}

SampledPulse modulate(const LinkConfig& cfg, const SampledPulse& pulse, std::span<const int> messages,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return modulate_oppm(cfg, pulse, messages, rng);
}

SampledPulse awgn(const SampledPulse& u, double N0, std::uint64_t seed) {
  if (!(N0 >= 0.0)) throw ConfigError("awgn: N0 must be nonnegative");
  std::vector<double> x = u.samples();
  std::mt19937_64 rng(seed);
  add_noise(x, std::sqrt(N0 / (2.0 * u.dt())), rng);
  return SampledPulse(u.dt(), u.first(), std::move(x), u.support_lo(), u.support_hi());
}

int receive_psm(const SampledPulse& r, const OrthogonalFamily& family) {
  int best = 0;
  double best_v = -1.0;
  for (long m = 0; m < family.N(); ++m) {
    const double v = std::abs(inner(r, family.pulses[static_cast<std::size_t>(m)]));
    if (v > best_v) {
      best_v = v;
      best = static_cast<int>(m);
    }
  }
  return best;
}

int receive_oppm_slot(const SampledPulse& r, const SampledPulse& tmpl, const LinkConfig& cfg, long slot) {
  const long ts = shift_in_samples(cfg.Ts, r.dt());
  const long s = shift_in_samples(cfg.T, r.dt());
  int best = 0;
  double best_v = -1.0;
  for (int m = 0; m < cfg.N; ++m) {
    const double v = std::abs(correlate(r, tmpl, slot * ts + oppm_offset(m, cfg.N, s)));
    if (v > best_v) {
      best_v = v;
      best = m;
    }
  }
  return best;
}

std::vector<int> receive_oppm(const SampledPulse& r, const SampledPulse& tmpl, const LinkConfig& cfg, long slots) {
  std::vector<int> out;
  for (long n = 0; n < slots; ++n) out.push_back(receive_oppm_slot(r, tmpl, cfg, n));
  return out;
}

double bound_orthogonal(int N, double E, double N0) {
  if (N < 2) throw ConfigError("bound: N must be at least 2");
  const double ratio = N0 > 0.0 ? E / N0 : std::numeric_limits<double>::infinity();
  return std::min(1.0, static_cast<double>(N - 1) * std::erfc(std::sqrt(ratio)));
}

double bound_oppm(std::span<const double> rho, double E, double N0) {
  double b = 0.0;
  const double ratio = N0 > 0.0 ? E / (2.0 * N0) : std::numeric_limits<double>::infinity();
  for (double r : rho) {
    if (!(std::abs(r) <= 1.0)) throw ConfigError("bound: |rho| > 1, correlations are not normalized");
    const double a = 1.0 - r;
    b += std::erfc(a == 0.0 ? 0.0 : std::sqrt(ratio * a));
  }
  return 0.5 * b;
}

std::vector<double> measured_rho(const SampledPulse& tmpl, double T, int N) {
  const long s = shift_in_samples(T, tmpl.dt());
  const double r0 = autocorr_at(tmpl, 0);
  std::vector<double> rho;
  for (int j = 2; j <= N; ++j) rho.push_back(autocorr_at(tmpl, static_cast<long>(j - 1) * s) / r0);
  return rho;
}

double uncoded_rate(int N, double Ts) {
  if (N < 1) throw ConfigError("rate: N must be at least 1");
  if (!(Ts > 0.0)) throw ConfigError("rate: Ts must be positive");
  return std::log2(static_cast<double>(N)) / Ts;
}

double bit_rate(int K) {
  if (K < 0) throw ConfigError("bit_rate: K must be nonnegative");
  return uncoded_rate(4 * K + 1, 150.0 * kT0);
}

namespace {

bool psm_trial(const LinkConfig& cfg, const OrthogonalFamily& family, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> msg(0, cfg.N - 1);
  const int m = msg(rng);
  const int one[1] = {m};
  auto u = modulate_psm(cfg, family, one, rng);
  std::vector<double> x = u.samples();
  add_noise(x, std::sqrt(cfg.N0 / (2.0 * u.dt())), rng);
  const SampledPulse r(u.dt(), u.first(), std::move(x), u.support_lo(), u.support_hi());
  int best = 0;
  double best_v = -1.0;
  for (int k = 0; k < cfg.N; ++k) {
    const double v = std::abs(inner(r, family.pulses[static_cast<std::size_t>(k)]));
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  return best != m;
}

// Three consecutive symbols; only the middle slot is decided, so both
// neighbours leak into its matched-filter window.
bool oppm_trial(const LinkConfig& cfg, const SampledPulse& tmpl, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> msg(0, cfg.N - 1);
  const int m[3] = {msg(rng), msg(rng), msg(rng)};
  const auto u = modulate_oppm(cfg, tmpl, m, rng);
  const long ts = shift_in_samples(cfg.Ts, u.dt());
  const long s = shift_in_samples(cfg.T, u.dt());
  const long lo = ts + oppm_offset(0, cfg.N, s) + tmpl.first();
  const long hi = ts + oppm_offset(cfg.N - 1, cfg.N, s) + tmpl.last();
  auto w = crop(u, lo, hi);
  std::vector<double> x = w.samples();
  add_noise(x, std::sqrt(cfg.N0 / (2.0 * u.dt())), rng);
  const SampledPulse r(u.dt(), lo, std::move(x), w.support_lo(), w.support_hi());
  return receive_oppm_slot(r, tmpl, cfg, 1) != m[1];
}

}  // namespace

SerResult simulate_ser(const LinkConfig& cfg, const OrthogonalFamily& family, long trials, std::uint64_t seed) {
  cfg.validate();
  if (trials < 1) throw ConfigError("simulate: trials must be positive");
  const SampledPulse& tmpl = family.centered();
  const unsigned workers = std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
  const long chunk = (trials + workers - 1) / workers;
  std::vector<std::future<long>> jobs;
  for (long start = 0; start < trials; start += chunk) {
    const long stop = std::min(trials, start + chunk);
    jobs.push_back(std::async(std::launch::async, [&, start, stop] {
      long e = 0;
      for (long t = start; t < stop; ++t) {
        const auto sd = trial_seed(seed, static_cast<std::uint64_t>(t));
        e += cfg.is_oppm() ? oppm_trial(cfg, tmpl, sd) : psm_trial(cfg, family, sd);
      }
      return e;
    }));
  }
  SerResult res;
  res.trials = trials;
  for (auto& j : jobs) res.errors += j.get();
  res.ser = static_cast<double>(res.errors) / static_cast<double>(trials);
  res.ci95 = 1.96 * std::sqrt(res.ser * (1.0 - res.ser) / static_cast<double>(trials));
  res.bound = cfg.is_oppm() ? bound_oppm(measured_rho(tmpl, cfg.T, cfg.N), cfg.energy, cfg.N0)
                            : bound_orthogonal(cfg.N, cfg.energy, cfg.N0);
  return res;
}

}  // namespace uwbpulse
