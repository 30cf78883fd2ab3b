#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "uwbpulse/signals.hpp"

namespace uwbpulse {

inline constexpr int kPulseCsvSchema = 1;

std::string format_number(double x);

void write_pulse_csv(const std::filesystem::path& path, const SampledPulse& p);
// Rejects non-uniform spacing and grids whose times are not integer multiples of dt.
SampledPulse read_pulse_csv(const std::filesystem::path& path);
SampledPulse parse_pulse_csv(const std::string& text);

// Writes header plus rows; numbers use 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Splits CSV text into numeric rows after checking the header.
std::vector<std::vector<double>> parse_numeric_csv(const std::string& text, const std::vector<std::string>& header);

std::string read_text(const std::filesystem::path& path);

}  // namespace uwbpulse
