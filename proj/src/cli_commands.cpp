#include <cmath>
#include <limits>
#include <map>
#include <fstream>
#include <future>
#include <iostream>

#include "CLI11.hpp"
#include "uwbpulse/cli.hpp"
#include "uwbpulse/errors.hpp"
#include "uwbpulse/fcc_optimizer.hpp"
#include "uwbpulse/io.hpp"
#include "uwbpulse/linalg.hpp"
#include "uwbpulse/lowdin.hpp"
#include "uwbpulse/modem.hpp"

namespace uwbpulse::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kCommands = {"design", "orthogonalize", "analyze", "simulate", "sweep"};

json design_defaults() {
  return {{"mask", ""},     {"fc_hz", 6.85e9},      {"tq_s", 6.0 * kT0},   {"L", 25},
          {"window", "triangle"}, {"samples_per_t0", kSamplesPerT0}, {"grid_density", 512},
          {"cap_factor", 2.0}, {"verify_factor", 4}};
}

}  // namespace

json default_config(const std::string& command) {
  json c = design_defaults();
  c["out"] = ".";
  if (command == "design") return c;
  c["pulse"] = "";
  if (command == "orthogonalize") {
    c["shift_ratio"] = 5.0;
    c["shift_s"] = 0.0;
    c["m_multiple"] = 2;
    c["kind"] = "lo";
  } else if (command == "analyze") {
    c["shift_ratio"] = 5.0;
    c["shift_s"] = 0.0;
  } else if (command == "simulate") {
    c["scheme"] = "psm";
    c["ebn0_db"] = {0.0, 10.0 * std::log10(2.0), 10.0 * std::log10(4.0), 10.0 * std::log10(8.0)};
    c["trials"] = 10000;
    c["seed"] = 1;
    c["K"] = 2;
    c["m_multiple"] = 2;
    c["antipodal"] = true;
  } else if (command == "sweep") {
    c["k_list"] = {1, 2, 3, 4, 5, 6};
    c["m_multiple"] = 2;
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return c;
}

json merge_config(const std::string& command, const json& base, const json& overrides) {
  json c = base;
  for (const auto& [k, v] : overrides.items()) {
    if (!c.contains(k)) throw ConfigError("config key '" + k + "' is not used by " + command);
    const auto& d = c[k];
    const bool ok = (d.is_number() && v.is_number()) || (d.is_string() && v.is_string()) ||
                    (d.is_boolean() && v.is_boolean()) || (d.is_array() && v.is_array());
    if (!ok) throw ConfigError("config key '" + k + "' has the wrong type");
    if (d.is_number_integer() && !v.is_number_integer()) throw ConfigError("config key '" + k + "' must be an integer");
    c[k] = v;
  }
  return c;
}

json load_config(const fs::path& path, const std::string& command) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  if (j.contains("tool") && j.contains("config")) {
    if (j.value("command", "") != command)
      throw ConfigError("manifest was written by '" + j.value("command", "") + "', not '" + command + "'");
    j = j["config"];
  }
  if (!j.is_object()) throw ConfigError("config " + path.string() + " is not a JSON object");
  return merge_config(command, default_config(command), j);
}

namespace {

fs::path out_dir(const json& cfg) {
  fs::path out = cfg.at("out").get<std::string>();
  fs::create_directories(out);
  return out;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

SpectralMask mask_from(const json& cfg, Artifacts& art) {
  const auto path = cfg.at("mask").get<std::string>();
  if (path.empty()) return fcc_mask_default();
  art.inputs.emplace_back(path);
  return SpectralMask::load(path);
}

DesignOptions design_options(const json& cfg) {
  DesignOptions o;
  o.fc = cfg.at("fc_hz").get<double>();
  o.Tq = cfg.at("tq_s").get<double>();
  o.L = cfg.at("L").get<int>();
  const auto w = cfg.at("window").get<std::string>();
  if (w == "triangle")
    o.window = Window::triangle;
  else if (w == "hann")
    o.window = Window::hann;
  else
    throw ConfigError("window must be triangle or hann");
  o.samples_per_T0 = cfg.at("samples_per_t0").get<int>();
  o.fit.grid_density = cfg.at("grid_density").get<int>();
  o.lp.grid_density = o.fit.grid_density;
  o.fit.cap_factor = cfg.at("cap_factor").get<double>();
  o.fit.verify_factor = cfg.at("verify_factor").get<int>();
  o.lp.verify_factor = o.fit.verify_factor;
  if (o.L < 1) throw ConfigError("L must be at least 1");
  if (o.samples_per_T0 < 2) throw ConfigError("samples_per_t0 must be at least 2");
  return o;
}

SampledPulse pulse_from(const json& cfg, Artifacts& art, const SpectralMask& mask) {
  const auto path = cfg.at("pulse").get<std::string>();
  if (!path.empty()) {
    art.inputs.emplace_back(path);
    return read_pulse_csv(path);
  }
  return design_pulse(mask, design_options(cfg)).p;
}

double shift_from(const json& cfg) {
  const double s = cfg.at("shift_s").get<double>();
  if (s > 0.0) return s;
  const double r = cfg.at("shift_ratio").get<double>();
  if (!(r > 0.0)) throw ConfigError("shift must be positive");
  return r * kT0;
}

long span_samples(const SampledPulse& p) { return std::lround(p.duration() / p.dt()); }

// Shift T = Tp / K on the pulse grid.
double shift_for_K(const SampledPulse& p, int K) {
  if (K < 1) throw ConfigError("K must be at least 1");
  const long n = span_samples(p);
  if (n % K != 0) throw ResolutionError("Tp / K is not a whole number of samples for K = " + std::to_string(K));
  return static_cast<double>(n / K) * p.dt();
}

double offdiag_max(const SampledPulse& c, double T, long count) {
  const long s = shift_in_samples(T, c.dt());
  const double r0 = autocorr_at(c, 0);
  double m = 0.0;
  for (long k = 1; k <= count; ++k) m = std::max(m, std::abs(autocorr_at(c, k * s)) / r0);
  return m;
}

}  // namespace

Artifacts cmd_design(const json& cfg) {
  Artifacts art;
  const auto out = out_dir(cfg);
  const auto mask = mask_from(cfg, art);
  const auto d = design_pulse(mask, design_options(cfg));

  std::vector<std::vector<double>> taps;
  for (std::size_t k = 0; k < d.factor.g.taps.size(); ++k) taps.push_back({static_cast<double>(k), d.factor.g.taps[k]});
  write_csv(out / "taps.csv", {"index", "tap"}, taps);
  write_pulse_csv(out / "pulse.csv", d.p);
  const auto f = sup_grid(mask, 4097);
  const auto pw = power_spectrum(d.p, f);
  std::vector<std::vector<double>> spec;
  for (std::size_t j = 0; j < f.size(); ++j) spec.push_back({f[j], d.alpha_star * d.alpha_star * pw[j]});
  write_csv(out / "spectrum.csv", {"f_hz", "psd_w_per_hz"}, spec);

  art.report = {{"objective", d.lp.objective},
                {"dual_bound", d.lp.dual_bound},
                {"lp_objective", d.lp.lp_objective},
                {"feasibility_margin", d.lp.feasibility_margin},
                {"nesp", d.nesp},
                {"alpha_star", d.alpha_star},
                {"L", static_cast<int>(d.factor.g.taps.size())},
                {"Tp_s", d.p.duration()},
                {"Tp_over_T0", d.p.duration() / kT0},
                {"factorization", d.factor.method},
                {"factorization_error", d.factor.max_lag_error},
                {"exchange_rounds", d.lp.exchange_rounds},
                {"simplex_iterations", d.lp.simplex_iterations}};
  write_json(out / "report.json", art.report);
  art.outputs = {out / "taps.csv", out / "pulse.csv", out / "spectrum.csv", out / "report.json"};
  return art;
}

Artifacts cmd_orthogonalize(const json& cfg) {
  Artifacts art;
  const auto out = out_dir(cfg);
  const auto mask = mask_from(cfg, art);
  const auto p = pulse_from(cfg, art, mask);
  const double T = shift_from(cfg);
  const long K = band_width(p.duration(), T);
  const long M = static_cast<long>(cfg.at("m_multiple").get<int>()) * K;
  if (M < 1) throw ConfigError("m_multiple must be at least 1");
  const auto kind = cfg.at("kind").get<std::string>();
  const auto rb = riesz_bounds(p, T);
  art.report = {{"kind", kind}, {"T_s", T}, {"T_over_T0", T / kT0}, {"K", K}, {"M", M}, {"A", rb.A}, {"B", rb.B}};
  if (kind == "limit") {
    const auto lim = limit_pulse(p, T);
    write_pulse_csv(out / "pulse_0.csv", lim.pulse);
    art.outputs.push_back(out / "pulse_0.csv");
    art.report["offdiag_max"] = offdiag_max(lim.pulse, T, 4 * K + 4);
    art.report["truncation_radius_s"] = lim.truncation_radius;
    art.report["nfft"] = lim.nfft;
  } else if (kind == "lo" || kind == "alo") {
    const auto fam = kind == "lo" ? lowdin_family(p, T, M) : alo_family(p, T, M);
    for (long m = -M; m <= M; ++m) {
      const auto path = out / ("pulse_" + std::to_string(m) + ".csv");
      write_pulse_csv(path, fam.pulses[static_cast<std::size_t>(m + M)]);
      art.outputs.push_back(path);
    }
    double off = 0.0;
    for (long a = 0; a < fam.N(); ++a)
      for (long b = a + 1; b < fam.N(); ++b)
        off = std::max(off, std::abs(inner(fam.pulses[static_cast<std::size_t>(a)], fam.pulses[static_cast<std::size_t>(b)])));
    const auto G = gram(p, T, M);
    const Eigen::MatrixXd gap = inv_sqrt_spd(strang(G).dense()) - inv_sqrt_spd(G);
    art.report["offdiag_max"] = off;
    art.report["orthonormality_error"] = family_orthonormality_error(fam);
    art.report["weak_norm_gap"] = weak_norm(gap);
    art.report["centered_autocorr_offdiag_max"] = offdiag_max(fam.centered(), T, 2 * M);
  } else {
    throw ConfigError("kind must be lo, alo or limit");
  }
  write_json(out / "gram_report.json", art.report);
  art.outputs.push_back(out / "gram_report.json");
  return art;
}

Artifacts cmd_analyze(const json& cfg) {
  Artifacts art;
  const auto out = out_dir(cfg);
  const auto mask = mask_from(cfg, art);
  const auto p = pulse_from(cfg, art, mask);
  const double T = shift_from(cfg);
  const ShiftSymbol sym(p, T);
  const auto rb = riesz_bounds(p, T);
  json ac = json::array();
  for (double r : sym.lags()) ac.push_back(r);
  art.report = {{"energy", p.energy()},
                {"Tp", p.duration()},
                {"Tp_over_T0", p.duration() / kT0},
                {"nesp", compliant_nesp(p, mask)},
                {"alpha_star", alpha_star(p, mask)},
                {"T_s", T},
                {"K", sym.K()},
                {"A", rb.A},
                {"B", rb.B},
                {"autocorr_samples", ac}};
  write_json(out / "analysis.json", art.report);
  art.outputs.push_back(out / "analysis.json");
  return art;
}

Artifacts cmd_simulate(const json& cfg) {
  Artifacts art;
  const auto out = out_dir(cfg);
  const auto mask = mask_from(cfg, art);
  const auto p = pulse_from(cfg, art, mask);
  const int K = cfg.at("K").get<int>();
  const double T = shift_for_K(p, K);
  const long M = static_cast<long>(cfg.at("m_multiple").get<int>()) * K;
  LinkConfig link;
  link.scheme = parse_scheme(cfg.at("scheme").get<std::string>());
  link.N = static_cast<int>(2 * M + 1);
  link.T = T;
  link.Ts = static_cast<double>(span_samples(p) + 2 * M * shift_in_samples(T, p.dt())) * p.dt();
  link.antipodal = cfg.at("antipodal").get<bool>();
  link.energy = 1.0;
  const auto fam = link.scheme == Scheme::OPPM_ALO ? alo_family(p, T, M) : lowdin_family(p, T, M);
  const long trials = cfg.at("trials").get<long>();
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  std::vector<std::vector<double>> rows;
  json pts = json::array();
  const auto list = cfg.at("ebn0_db").get<std::vector<double>>();
  for (std::size_t k = 0; k < list.size(); ++k) {
    link.N0 = link.energy / std::pow(10.0, list[k] / 10.0);
    const auto res = simulate_ser(link, fam, trials, trial_seed(seed, 0x5eed0000ULL + k));
    rows.push_back({list[k], res.ser, res.ci95, res.bound});
    pts.push_back({{"ebn0_db", list[k]}, {"errors", res.errors}, {"trials", res.trials}});
  }
  write_csv(out / "ser.csv", {"ebn0_db", "ser", "ci95", "bound"}, rows);
  art.outputs.push_back(out / "ser.csv");
  art.report = {{"scheme", scheme_name(link.scheme)}, {"N", link.N}, {"T_s", link.T}, {"Ts_s", link.Ts}, {"points", pts}};
  return art;
}

Artifacts cmd_sweep(const json& cfg) {
  Artifacts art;
  const auto out = out_dir(cfg);
  const auto mask = mask_from(cfg, art);
  const auto p = pulse_from(cfg, art, mask);
  const auto ks = cfg.at("k_list").get<std::vector<int>>();
  const int mm = cfg.at("m_multiple").get<int>();
  struct Row {
    std::vector<double> values;
    std::string error;
    fs::path file;
  };
  std::vector<std::future<Row>> jobs;
  for (int K : ks) {
    jobs.push_back(std::async(std::launch::async, [&, K] {
      Row row;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      const double rb = K >= 0 ? bit_rate(K) / 1e9 : nan;
      try {
        const double T = shift_for_K(p, K);
        const long M = static_cast<long>(mm) * K;
        const auto bounds = riesz_bounds(p, T);
        const auto fam = lowdin_family(p, T, M);
        const auto& c = fam.centered();
        const fs::path dir = out / ("K" + std::to_string(K));
        fs::create_directories(dir);
        row.file = dir / "centered.csv";
        write_pulse_csv(row.file, c);
        row.values = {static_cast<double>(K), T / kT0, rb, compliant_nesp(c, mask), offdiag_max(c, T, 2 * M),
                      bounds.A, bounds.B};
      } catch (const std::exception& e) {
        row.values = {static_cast<double>(K), nan, rb, nan, nan, nan, nan};
        row.error = e.what();
      }
      return row;
    }));
  }
  std::vector<std::vector<double>> rows;
  json errors = json::array();
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    auto row = jobs[j].get();
    rows.push_back(row.values);
    if (!row.error.empty()) errors.push_back({{"K", ks[j]}, {"error", row.error}});
    if (!row.file.empty()) art.outputs.push_back(row.file);
  }
  write_csv(out / "sweep.csv", {"K", "T_over_T0", "Rb_gbps", "nesp", "offdiag_max", "A", "B"}, rows);
  art.outputs.insert(art.outputs.begin(), out / "sweep.csv");
  if (!errors.empty()) {
    write_json(out / "sweep_errors.json", errors);
    art.outputs.push_back(out / "sweep_errors.json");
  }
  art.report = {{"rows", rows.size()}, {"errors", errors}};
  return art;
}

Artifacts run_command(const std::string& command, const json& cfg) {
  Artifacts art;
  if (command == "design")
    art = cmd_design(cfg);
  else if (command == "orthogonalize")
    art = cmd_orthogonalize(cfg);
  else if (command == "analyze")
    art = cmd_analyze(cfg);
  else if (command == "simulate")
    art = cmd_simulate(cfg);
  else if (command == "sweep")
    art = cmd_sweep(cfg);
  else
    throw ConfigError("unknown command '" + command + "'");
  write_manifest(command, cfg, art);
  return art;
}

namespace {

enum class Kind { real, integer, text, flag, real_list, int_list };

struct Flag {
  std::string name;
  std::string key;
  Kind kind;
  std::string help;
};

const std::vector<Flag>& flags_for(const std::string& command) {
  static const std::vector<Flag> design = {
      {"--mask", "mask", Kind::text, "mask CSV (f_lo_hz,f_hi_hz,level_w_per_hz); bundled FCC indoor mask if empty"},
      {"--fc", "fc_hz", Kind::real, "monocycle center frequency in Hz"},
      {"--tq", "tq_s", Kind::real, "monocycle window length in seconds"},
      {"--taps", "L", Kind::integer, "FIR length L"},
      {"--window", "window", Kind::text, "triangle or hann"},
      {"--samples-per-t0", "samples_per_t0", Kind::integer, "grid samples per T0"},
      {"--grid-density", "grid_density", Kind::integer, "LP points per mask segment"},
      {"--cap-factor", "cap_factor", Kind::real, "mask fit cap relative to the segment minimum"},
      {"--verify-factor", "verify_factor", Kind::integer, "verification grid density multiple"}};
  static const std::vector<Flag> pulse = {{"--pulse", "pulse", Kind::text, "input pulse CSV; runs design when empty"}};
  static const std::vector<Flag> shift = {
      {"--shift-ratio", "shift_ratio", Kind::real, "shift T in units of T0"},
      {"--shift-seconds", "shift_s", Kind::real, "shift T in seconds (overrides --shift-ratio)"}};
  static std::map<std::string, std::vector<Flag>> table;
  if (table.empty()) {
    auto add = [](std::vector<Flag>& v, const std::vector<Flag>& w) { v.insert(v.end(), w.begin(), w.end()); };
    table["design"] = design;
    auto& o = table["orthogonalize"];
    add(o, design), add(o, pulse), add(o, shift);
    o.push_back({"--m-multiple", "m_multiple", Kind::integer, "M = m K"});
    o.push_back({"--kind", "kind", Kind::text, "lo, alo or limit"});
    auto& a = table["analyze"];
    add(a, design), add(a, pulse), add(a, shift);
    auto& s = table["simulate"];
    add(s, design), add(s, pulse);
    s.push_back({"--scheme", "scheme", Kind::text, "psm, oppm-lo or oppm-alo"});
    s.push_back({"--ebn0-list", "ebn0_db", Kind::real_list, "symbol E/N0 values in dB"});
    s.push_back({"--trials", "trials", Kind::integer, "Monte Carlo trials per point"});
    s.push_back({"--seed", "seed", Kind::integer, "base seed"});
    s.push_back({"--K", "K", Kind::integer, "overlap factor, T = Tp / K"});
    s.push_back({"--m-multiple", "m_multiple", Kind::integer, "M = m K"});
    s.push_back({"--antipodal", "antipodal", Kind::flag, "random amplitude flips (true/false)"});
    auto& w = table["sweep"];
    add(w, design), add(w, pulse);
    w.push_back({"--k-list", "k_list", Kind::int_list, "overlap factors"});
    w.push_back({"--m-multiple", "m_multiple", Kind::integer, "M = m K"});
  }
  return table.at(command);
}

json convert(const Flag& f, const std::vector<std::string>& raw) {
  try {
    switch (f.kind) {
      case Kind::real: return std::stod(raw.at(0));
      case Kind::integer: return std::stoll(raw.at(0));
      case Kind::text: return raw.at(0);
      case Kind::flag: {
        const auto& v = raw.at(0);
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw ConfigError(f.name + " expects true or false");
      }
      case Kind::real_list: {
        json a = json::array();
        for (const auto& v : raw) a.push_back(std::stod(v));
        return a;
      }
      case Kind::int_list: {
        json a = json::array();
        for (const auto& v : raw) a.push_back(std::stoll(v));
        return a;
      }
    }
  } catch (const std::logic_error&) {
    throw ConfigError(f.name + ": cannot parse '" + (raw.empty() ? "" : raw[0]) + "'");
  }
  return nullptr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UWB pulse design, orthogonalization and OPPM analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(UWBPULSE_VERSION));
  struct Sub {
    CLI::App* app;
    std::string config;
    std::string out;
    std::vector<std::pair<const Flag*, std::vector<std::string>>> values;
  };
  std::map<std::string, Sub> subs;
  for (const auto& c : kCommands) {
    auto& s = subs[c];
    s.app = app.add_subcommand(c, "run " + c);
    s.app->add_option("--config", s.config, "JSON config or a manifest.json from an earlier run");
    s.app->add_option("--out", s.out, "output directory");
    const auto& fl = flags_for(c);
    s.values.reserve(fl.size());
    for (const auto& f : fl) {
      s.values.push_back({&f, {}});
      auto* opt = s.app->add_option(f.name, s.values.back().second, f.help);
      if (f.kind == Kind::real_list || f.kind == Kind::int_list)
        opt->delimiter(',');
      else
        opt->expected(1);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  for (auto& [name, s] : subs) {
    if (!s.app->parsed()) continue;
    try {
      json cfg = s.config.empty() ? default_config(name) : load_config(s.config, name);
      json over = json::object();
      for (const auto& [f, raw] : s.values)
        if (!raw.empty()) over[f->key] = convert(*f, raw);
      if (!s.out.empty()) over["out"] = s.out;
      cfg = merge_config(name, cfg, over);
      const auto art = run_command(name, cfg);
      std::cout << art.report.dump(2) << '\n';
      return 0;
    } catch (const InfeasibleError& e) {
      std::cerr << name << ": infeasible: " << e.what() << '\n';
      return 2;
    } catch (const UnboundedError& e) {
      std::cerr << name << ": unbounded: " << e.what() << '\n';
      return 2;
    } catch (const UnstableError& e) {
      std::cerr << name << ": unstable: " << e.what() << '\n';
      return 2;
    } catch (const ConfigError& e) {
      std::cerr << name << ": configuration: " << e.what() << '\n';
      return 2;
    } catch (const ResolutionError& e) {
      std::cerr << name << ": resolution: " << e.what() << '\n';
      return 2;
    } catch (const ParseError& e) {
      std::cerr << name << ": input: " << e.what() << '\n';
      return 1;
    } catch (const std::exception& e) {
      std::cerr << name << ": internal error: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}

}  // namespace uwbpulse::cli
