#include "potrec/potentials.hpp"

#include <cmath>

#include "potrec/error.hpp"
#include "potrec/norms.hpp"

namespace potrec {

PotentialSpec PotentialSpec::zero() { return {}; }

PotentialSpec PotentialSpec::gaussian(double amplitude, double width, Point center) {
  PotentialSpec s;
  s.kind = PotentialKind::Gaussian;
  s.amplitude = amplitude;
  s.width = width;
  s.center = center;
  return s;
}

PotentialSpec PotentialSpec::bump(double amplitude, double width, Point center) {
  PotentialSpec s = gaussian(amplitude, width, center);
  s.kind = PotentialKind::Bump;
  return s;
}

PotentialSpec PotentialSpec::dyadic(double amplitude, double rate) {
  PotentialSpec s;
  s.kind = PotentialKind::Dyadic;
  s.amplitude = amplitude;
  s.rate = rate;
  return s;
}

PotentialSpec PotentialSpec::file(std::string path) {
  PotentialSpec s;
  s.kind = PotentialKind::File;
  s.path = std::move(path);
  return s;
}

ScalarField sample_potential(const PotentialSpec& spec, const Grid& grid) {
  auto dist2 = [&spec](const Point& x) {
    double r2 = 0.0;
    for (int d = 0; d < 3; ++d) r2 += (x[d] - spec.center[d]) * (x[d] - spec.center[d]);
    return r2;
  };
  switch (spec.kind) {
    case PotentialKind::Zero:
      return ScalarField(grid);
    case PotentialKind::Gaussian:
      if (!(spec.width > 0.0)) throw Error(ErrorCode::InvalidArgument, "gaussian width must be positive");
      return sample(grid, [&](const Point& x) {
        return Complex{spec.amplitude * std::exp(-dist2(x) / (spec.width * spec.width)), 0.0};
      });
    case PotentialKind::Bump:
      if (!(spec.width > 0.0)) throw Error(ErrorCode::InvalidArgument, "bump width must be positive");
      return sample(grid, [&](const Point& x) {
        const double t = dist2(x) / (spec.width * spec.width);
        return Complex{t < 1.0 ? spec.amplitude * std::exp(1.0 - 1.0 / (1.0 - t)) : 0.0, 0.0};
      });
    case PotentialKind::Dyadic:
      return sample(grid, [&](const Point& x) {
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        return Complex{spec.amplitude * std::pow(2.0, -spec.rate * annulus_of(r)), 0.0};
      });
    case PotentialKind::File: {
      ScalarField f = read_field(spec.path);
      if (!(f.grid() == grid)) throw Error(ErrorCode::GridMismatch, spec.path + " was sampled on a different grid");
      if (f.space() != Space::Physical) throw Error(ErrorCode::WrongSpace, spec.path + " is not a physical-space field");
      return f;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown potential kind");
}

Complex potential_fourier(const PotentialSpec& spec, int n, const Point& xi) {
  if (spec.kind == PotentialKind::Zero) return {0.0, 0.0};
  if (spec.kind != PotentialKind::Gaussian)
    throw Error(ErrorCode::InvalidArgument, "closed-form transform only for zero and gaussian presets");
  const double s2 = spec.width * spec.width;
  double xi2 = 0.0, phase = 0.0;
  for (int d = 0; d < n; ++d) {
    xi2 += xi[d] * xi[d];
    phase -= xi[d] * spec.center[d];
  }
  return std::polar(spec.amplitude * std::pow(0.5 * s2, 0.5 * n) * std::exp(-0.25 * s2 * xi2), phase);
}

PotentialKind parse_potential_kind(const std::string& name) {
  if (name == "zero") return PotentialKind::Zero;
  if (name == "gaussian") return PotentialKind::Gaussian;
  if (name == "bump") return PotentialKind::Bump;
  if (name == "dyadic") return PotentialKind::Dyadic;
  if (name == "file") return PotentialKind::File;
  throw Error(ErrorCode::Config, "unknown potential preset '" + name + "'");
}

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Zero: return "zero";
    case PotentialKind::Gaussian: return "gaussian";
    case PotentialKind::Bump: return "bump";
    case PotentialKind::Dyadic: return "dyadic";
    case PotentialKind::File: return "file";
  }
  return "unknown";
}

}  // namespace potrec
