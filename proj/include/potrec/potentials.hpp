#pragma once

#include <string>

#include "potrec/grid.hpp"

namespace potrec {

enum class PotentialKind { Zero, Gaussian, Bump, Dyadic, File };

/// Symbolic potential that can be sampled on any grid.
///
///  gaussian: amplitude exp(-|x - c|^2 / width^2)
///  bump:     amplitude exp(1 - 1/(1 - |x - c|^2 / width^2)) on |x - c| < width
///  dyadic:   amplitude 2^{-rate j} on the annulus D_j (piecewise constant)
///  file:     an SSFLD1 field; only samplable on its own grid
struct PotentialSpec {
  PotentialKind kind = PotentialKind::Zero;
  double amplitude = 1.0;
  double width = 1.0;
  double rate = 2.0;
  Point center{0.0, 0.0, 0.0};
  std::string path;

  static PotentialSpec zero();
  static PotentialSpec gaussian(double amplitude, double width, Point center = {0.0, 0.0, 0.0});
  static PotentialSpec bump(double amplitude, double width, Point center = {0.0, 0.0, 0.0});
  static PotentialSpec dyadic(double amplitude, double rate);
  static PotentialSpec file(std::string path);
};

ScalarField sample_potential(const PotentialSpec& spec, const Grid& grid);

/// Continuum Fourier transform (2pi)^{-n/2} int e^{-i x.xi} V(x) dx where it
/// is known in closed form (zero and gaussian); throws otherwise.
Complex potential_fourier(const PotentialSpec& spec, int n, const Point& xi);

PotentialKind parse_potential_kind(const std::string& name);
std::string to_string(PotentialKind kind);

}  // namespace potrec
