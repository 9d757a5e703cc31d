#pragma once

#include <cstddef>
#include <string>

namespace pdm {

constexpr std::size_t kInteriorBand = 2;
constexpr std::size_t kProbeCount = 32;

// absolute and relative sizes of one residual, measured on interior rows.
// roundoff_floor estimates the relative residual that double rounding alone
// produces for the operands; zero where no estimate applies.
struct ResidualReport {
    std::string name;
    double absolute = 0.0;
    double relative = 0.0;
    std::size_t grid_n = 0;
    std::size_t interior_band = kInteriorBand;
    double roundoff_floor = 0.0;
};

}  // namespace pdm
