#pragma once

#include <array>
#include <functional>
#include <vector>

#include "potrec/grid.hpp"

namespace potrec {

/// n x n orthogonal matrix (n <= 3), row-major in the leading block.
struct Rotation {
  int n = 0;
  std::array<std::array<double, 3>, 3> m{};

  static Rotation identity(int n);
  Point apply(const Point& v) const noexcept;
  Point apply_transpose(const Point& v) const noexcept;
  /// max |(Q^T Q - I)_{ij}|.
  double orthogonality_defect() const noexcept;
};

/// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int M, double a, double b, std::vector<double>& nodes, std::vector<double>& weights);

/// Nodes and positive weights for integrals over the unit sphere S^{n-1}.
///
/// A global rule integrates over the whole sphere. A cap rule only covers the
/// geodesic cap of radius `cap_radius` around `center`; it integrates exactly
/// the functions supported there, which is all a concentrated density needs.
struct SphereQuadrature {
  int n = 0;
  std::vector<Point> nodes;
  std::vector<double> weights;
  /// Largest geodesic distance between neighbouring nodes.
  double spacing = 0.0;
  bool is_cap = false;
  Point center{0.0, 0.0, 0.0};
  double cap_radius = 0.0;
};

/// n=2: M equispaced angles, weight 2pi/M. n=3: M Gauss-Legendre nodes in
/// cos(polar) times M equispaced azimuths.
SphereQuadrature make_quadrature(int n, int M);

/// Rule on the cap of radius `radius` around Q e_n. n=2: M equispaced angles
/// spanning the cap including both ends. n=3: M Gauss-Legendre polar nodes on
/// [0, radius] times M azimuths. Nodes are Q applied to the rule around e_n.
SphereQuadrature make_cap_quadrature(const Rotation& Q, double radius, int M);

/// |S^{n-1}|.
double sphere_area(int n);

/// Default bump chi(xi) = exp(1 - 1/(1 - |4 xi|^2)) on |xi| < 1/4, else 0.
double bump_chi(const Point& xi) noexcept;

/// Householder reflection with Q e_n = omega. Throws NonUnitVector.
Rotation rotation_to(int n, const Point& omega);

/// Angular radius of the support of f_eps^{e_n} around e_n for the default bump.
double cap_support_radius(double eps);

/// Cap rules must put nodes at most eps / kCapSpacingDivisor apart.
inline constexpr double kCapSpacingDivisor = 16.0;
/// Cap-rule resolution used by the pipeline: nodes per cap axis.
inline constexpr int default_cap_nodes(int n) { return n == 2 ? 48 : 32; }

/// Values of the parabolically scaled density
/// f(theta) = eps^{-(n-1)} chi((Q^T theta)'/eps, ((Q^T theta)_n - 1)/eps^2)
/// on the nodes of a quadrature.
struct SphericalDensity {
  SphereQuadrature quadrature;
  std::vector<double> values;
  double eps = 0.0;
  Rotation rotation;
};

/// Throws UnderresolvedCap when the quadrature is too coarse for eps or a cap
/// rule does not cover the density's support.
SphericalDensity make_density(double eps, const Rotation& Q, const SphereQuadrature& quad);
/// The density on a cap rule sized to its support: the usual way to build one.
/// M = 0 picks default_cap_nodes(n).
SphericalDensity make_cap_density(double eps, const Rotation& Q, int M = 0);
/// Arbitrary density sampled from a function on the nodes (eps is 0).
SphericalDensity density_from(const SphereQuadrature& quad, const std::function<double(const Point&)>& fn);

/// f = 1 on a global rule fine enough for E_lambda f on the box [-L, L]^n:
/// M = max(16, ceil(lambda L sqrt(n)) + 24) nodes per axis.
SphericalDensity uniform_density(int n, double lambda, double L);

struct DensityNorms {
  double l1 = 0.0;
  double l2 = 0.0;
};

DensityNorms density_norms(const SphericalDensity& d);

/// int_{R^{n-1}} chi(eta, -|eta|^2/2) d eta, the eps -> 0 limit of the L1 norm.
double density_l1_limit(int n);

/// E_lambda f(x) = sum_m w_m f(theta_m) e^{-i lambda x . theta_m} on every
/// lattice point. Throws UnderresolvedGrid unless N >= 8 ceil(lambda L / pi).
ScalarField herglotz_wave(double lambda, const SphericalDensity& d, const Grid& grid);
/// Same sum at a single point.
Complex herglotz_at(double lambda, const SphericalDensity& d, const Point& x);

/// ||(Delta + lambda^2) u|| / (lambda^2 ||u||) on the window ||x||_inf <= fraction L.
double helmholtz_residual(double lambda, const ScalarField& u, double fraction = 0.5);

}  // namespace potrec
