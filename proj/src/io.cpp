#include "lvflux/io.hpp"

#include <charconv>
#include <stdexcept>
#include <vector>

namespace lvflux::io {

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

Rgb regime_color(Regime r) {
  switch (r) {
    case Regime::NoStationary: return {255, 0, 0};
    case Regime::NonPhysical: return {0, 0, 0};
    case Regime::Unstable: return {255, 255, 0};
    case Regime::ZeroStability: return {150, 75, 0};
    case Regime::Stable: return {0, 200, 0};
  }
  return {255, 255, 255};
}

Rgb basin_color(BasinOutcome o) {
  switch (o) {
    case BasinOutcome::Converged: return {0, 200, 0};
    case BasinOutcome::Diverged: return {255, 0, 0};
    case BasinOutcome::Undecided: return {128, 128, 128};
    case BasinOutcome::NonPhysical: return {0, 0, 0};
  }
  return {255, 255, 255};
}

void write_ppm(std::ostream& os, std::size_t width, std::size_t height, std::span<const Rgb> pixels) {
  if (pixels.size() != width * height) throw std::invalid_argument("write_ppm: size mismatch");
  os << "P6\n" << width << ' ' << height << "\n255\n";
  for (const Rgb& p : pixels) os.write(reinterpret_cast<const char*>(p.data()), 3);
}

namespace {

template <typename Cell, typename Color>
void write_flipped(std::ostream& os, std::size_t rows, std::size_t cols,
                   const std::vector<Cell>& cells, Color color) {
  std::vector<Rgb> px;
  px.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t i = rows - 1 - r;
    for (std::size_t j = 0; j < cols; ++j) px.push_back(color(cells[i * cols + j]));
  }
  write_ppm(os, cols, rows, px);
}

}  // namespace

void write_regime_csv(std::ostream& os, const RegimeGrid& grid) {
  os << "bx,by,regime_code\n";
  for (std::size_t i = 0; i < grid.rows; ++i)
    for (std::size_t j = 0; j < grid.cols; ++j)
      os << format_double(grid.bx_axis.at(j)) << ',' << format_double(grid.by_axis.at(i)) << ','
         << static_cast<int>(grid.at(i, j)) << '\n';
}

void write_regime_ppm(std::ostream& os, const RegimeGrid& grid) {
  write_flipped(os, grid.rows, grid.cols, grid.cells, regime_color);
}

void write_basin_csv(std::ostream& os, const BasinGrid& grid) {
  os << "x,y,outcome\n";
  for (std::size_t i = 0; i < grid.rows; ++i)
    for (std::size_t j = 0; j < grid.cols; ++j)
      os << format_double(grid.x_axis.at(j)) << ',' << format_double(grid.y_axis.at(i)) << ','
         << to_string(grid.at(i, j)) << '\n';
}

void write_basin_ppm(std::ostream& os, const BasinGrid& grid) {
  write_flipped(os, grid.rows, grid.cols, grid.outcome, basin_color);
}

}  // namespace lvflux::io
