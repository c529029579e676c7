#pragma once

#include "lvflux/basin.hpp"
#include "lvflux/stability.hpp"

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>

namespace lvflux::io {

/// Shortest decimal that round-trips to the same double ("0", "0.1", "1.6547521286895748").
std::string format_double(double v);

using Rgb = std::array<std::uint8_t, 3>;

Rgb regime_color(Regime r);
Rgb basin_color(BasinOutcome o);

/// Binary PPM (P6), maxval 255. `pixels` is row-major, top row first.
void write_ppm(std::ostream& os, std::size_t width, std::size_t height, std::span<const Rgb> pixels);

/// CSV "bx,by,regime_code", one row per cell in grid order.
void write_regime_csv(std::ostream& os, const RegimeGrid& grid);
/// Image with by increasing upwards (last grid row on top).
void write_regime_ppm(std::ostream& os, const RegimeGrid& grid);

/// CSV "x,y,outcome" with the outcome as its name.
void write_basin_csv(std::ostream& os, const BasinGrid& grid);
void write_basin_ppm(std::ostream& os, const BasinGrid& grid);

}  // namespace lvflux::io
