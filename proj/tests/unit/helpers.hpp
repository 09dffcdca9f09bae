#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <doctest.h>

#include "potrec/grid.hpp"

namespace testing {

using potrec::Complex;
using potrec::Grid;
using potrec::Point;
using potrec::ScalarField;

inline ScalarField random_field(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> G;
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = {G(rng), G(rng)};
  return f;
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const ScalarField& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

inline double rel_l2(const ScalarField& a, const ScalarField& b) { return potrec::l2_norm(a - b) / potrec::l2_norm(b); }

inline ScalarField packet(const Grid& g, double width2, Point centre = {0, 0, 0}, Point momentum = {0, 0, 0}) {
  return potrec::sample(g, [=](const Point& x) {
    double r2 = 0.0, ph = 0.0;
    for (int d = 0; d < 3; ++d) {
      r2 += (x[d] - centre[d]) * (x[d] - centre[d]);
      ph += momentum[d] * x[d];
    }
    return std::exp(-r2 / width2) * std::polar(1.0, ph);
  });
}

// Composite Simpson on [a, b] with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace testing
