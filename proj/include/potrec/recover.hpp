#pragma once

#include <vector>

#include "potrec/grid.hpp"
#include "potrec/herglotz.hpp"
#include "potrec/scatter.hpp"

namespace potrec {

enum class PairingMode {
  /// Pair F against u1 u2 only.
  Leading,
  /// Pair F against w1 w2 = (u1 + v1)(u2 + v2), with both corrections solved.
  Full,
};

/// eps(lambda) = scale * lambda^exponent. The default exponent is -(1 + 1/n).
struct EpsRule {
  double scale = 1.0;
  double exponent = 0.0;

  static EpsRule standard(int n) { return {1.0, -(1.0 + 1.0 / n)}; }
  double operator()(double lambda) const;
};

struct ModePlan {
  int n = 2;
  Point kappa{0.0, 0.0, 0.0};
  Point nu{0.0, 0.0, 0.0};
  std::vector<double> lambdas;
  EpsRule eps_rule;
  PairingMode mode = PairingMode::Leading;
  /// Nodes per cap axis; 0 picks default_cap_nodes(n).
  int cap_nodes = 0;
};

/// Deterministic unit nu with kappa . nu = 0: the first coordinate axis not
/// parallel to kappa, with its kappa component removed.
Point choose_nu(int n, const Point& kappa);

/// Plan with nu from choose_nu and the standard eps rule. Throws when the
/// schedule is not strictly increasing or starts below |kappa|/2.
ModePlan make_plan(int n, const Point& kappa, std::vector<double> lambdas, PairingMode mode = PairingMode::Leading);

struct Directions {
  Point omega1{0.0, 0.0, 0.0};
  Point omega2{0.0, 0.0, 0.0};
};

/// omega_{1,2} = kappa/(2 lambda) +- (1 - |kappa|^2/(4 lambda^2))^{1/2} nu,
/// so that lambda (omega1 + omega2) = kappa.
Directions directions(int n, const Point& kappa, double lambda, const Point& nu);

/// gamma(rho) = (2pi)^{-n/2} int sup_{|xi|<rho} |e^{i xi.x} - 1| |F(x)| dx,
/// using sup = 2 sin(rho|x|/2) for rho|x| <= pi and 2 beyond.
double gamma_modulus(const ScalarField& F, double rho);

/// (2pi)^{-n/2} h^n sum_x e^{-i x.xi} F(x) at an arbitrary frequency.
Complex fourier_at(const ScalarField& F, const Point& xi);

struct ModeSample {
  double lambda = 0.0;
  double eps = 0.0;
  Complex estimate{0.0, 0.0};
  /// int F u1 u2.
  Complex leading{0.0, 0.0};
  /// int F (u1 v2 + v1 u2 + v1 v2); zero in leading mode.
  Complex remainder{0.0, 0.0};
  /// int F w1 w2; equals leading in leading mode.
  Complex full{0.0, 0.0};
  double gamma = 0.0;
  DensityNorms density1;
  DensityNorms density2;
  /// (2pi)^{n/2} ||f1||_1 ||f2||_1.
  double normalization = 0.0;
  double residual1 = 0.0;
  double residual2 = 0.0;
};

struct ModeEstimate {
  Point kappa{0.0, 0.0, 0.0};
  Point nu{0.0, 0.0, 0.0};
  PairingMode mode = PairingMode::Leading;
  std::vector<ModeSample> samples;
};

/// Estimates F^(kappa), F = V1 - V2, from the pairing of two Herglotz-based
/// states at every energy of the plan. The grid of V1 and V2 must resolve the
/// largest lambda.
ModeEstimate recover_mode(const ScalarField& V1, const ScalarField& V2, const ModePlan& plan,
                          const ScatterConfig& solver = {});

struct EnvelopeRow {
  double lambda = 0.0;
  double error = 0.0;
  double gamma = 0.0;
  double envelope = 0.0;
  bool under = true;
};

struct EnvelopeReport {
  Complex truth{0.0, 0.0};
  /// C in gamma(lambda eps) + C lambda^{-1/n}, anchored at the first energy.
  double constant = 0.0;
  std::vector<EnvelopeRow> rows;
  bool all_under = true;
};

/// Errors against the transform of the sampled F, compared with the envelope
/// gamma(lambda eps) + C lambda^{-1/n}. C is fitted on the first (smallest)
/// energy only, so the later rows test the decay rate.
EnvelopeReport error_envelope(const ModeEstimate& estimate, const ScalarField& F);
EnvelopeReport error_envelope(const ModeEstimate& estimate, const ScalarField& F, Complex truth);

/// Square kappa lattice: spacing * (k - (count - 1)/2) per axis, count odd.
struct KappaLattice {
  int count = 17;
  double spacing = 1.0;
};

struct Reconstruction {
  ScalarField field;
  /// ||field - (V1 - V2)|| / ||V1 - V2||, or the absolute norm when V1 = V2.
  double relative_l2_error = 0.0;
  /// max |F^_est(-kappa) - conj F^_est(kappa)| before symmetrisation.
  double max_asymmetry = 0.0;
  std::vector<Point> kappas;
  std::vector<Complex> estimates;
};

/// Estimates F^ on the lattice with the last energy of `plan_template` and
/// sums the Fourier series sum_kappa F^(kappa) e^{i kappa.x} (spacing^n / (2pi)^{n/2})
/// on the fundamental cell ||x||_inf < pi/spacing (zero outside). For real
/// potentials the estimates are symmetrised so the field is real.
Reconstruction reconstruct(const ScalarField& V1, const ScalarField& V2, const KappaLattice& lattice,
                           const ModePlan& plan_template, const ScatterConfig& solver = {});

}  // namespace potrec
