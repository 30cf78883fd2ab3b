#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "uwbpulse/errors.hpp"
#include "uwbpulse/io.hpp"

namespace uwbpulse {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, int line) {
  double v = 0.0;
  const auto* b = s.data();
  const auto* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) throw ParseError("not a number: '" + s + "'", line);
  return v;
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, ptr);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_number(row[j]);
    out << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<std::vector<double>> parse_numeric_csv(const std::string& text, const std::vector<std::string>& header) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto cells = split(line);
    if (!have_header) {
      if (cells != header) {
        std::string want;
        for (std::size_t j = 0; j < header.size(); ++j) want += (j ? "," : "") + header[j];
        throw ParseError("expected header '" + want + "'", lineno);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " columns, got " + std::to_string(cells.size()),
                       lineno);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      const double v = parse_double(c, lineno);
      if (!std::isfinite(v)) throw ParseError("non-finite value", lineno);
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("missing header", lineno);
  return rows;
}

void write_pulse_csv(const std::filesystem::path& path, const SampledPulse& p) {
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(p.size()));
  for (long k = 0; k < p.size(); ++k) rows.push_back({p.time_at(p.first() + k), p[k]});
  write_csv(path, {"t_seconds", "amplitude"}, rows);
}

SampledPulse parse_pulse_csv(const std::string& text) {
  const auto rows = parse_numeric_csv(text, {"t_seconds", "amplitude"});
  if (rows.size() < 2) throw ParseError("pulse needs at least two samples", 2);
  const std::size_t n = rows.size();
  const double t0 = rows.front()[0];
  const double dt = (rows.back()[0] - t0) / static_cast<double>(n - 1);
  if (!(dt > 0.0)) throw ParseError("times must increase", 3);
  for (std::size_t k = 1; k < n; ++k) {
    const double step = rows[k][0] - rows[k - 1][0];
    if (std::abs(step - dt) > 1e-6 * dt)
      throw ParseError("non-uniform time spacing", static_cast<int>(k) + 2);
  }
  const double f = t0 / dt;
  const double first = std::nearbyint(f);
  if (std::abs(f - first) > 1e-6) throw ParseError("sample times are not integer multiples of dt", 2);
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = rows[k][1];
  const long fi = static_cast<long>(first);
  return SampledPulse(dt, fi, std::move(x), static_cast<double>(fi) * dt,
                      static_cast<double>(fi + static_cast<long>(n) - 1) * dt);
}

SampledPulse read_pulse_csv(const std::filesystem::path& path) { return parse_pulse_csv(read_text(path)); }

}  // namespace uwbpulse
