#pragma once

#include "qlna/two_port.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace qlna::rf {

struct TouchstoneData {
    std::vector<TwoPortRecord> records;
    std::vector<NoiseRecord> noise;  // optional noise-parameter block
};

/// Parses a version 1 two-port file. Data rows carry S11 S21 S12 S22 in that
/// order; a trailing block of 5-column rows (freq, F_min dB, |Gopt|, angle deg,
/// r_n) is read as noise parameters. Throws ParseError with the line number.
TouchstoneData parse_touchstone(std::string_view text);

/// Emits "# Hz S RI R <z0>" with round-trip precision. Throws ValidationError
/// on empty, unsorted or mixed-reference input.
std::string write_touchstone(const TouchstoneData& data);

TouchstoneData read_touchstone_file(const std::string& path);

}  // namespace qlna::rf
