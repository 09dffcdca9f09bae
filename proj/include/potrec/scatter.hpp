#pragma once

#include <vector>

#include "potrec/grid.hpp"
#include "potrec/resolvent.hpp"

namespace potrec {

struct ScatterConfig {
  double tol = 1e-10;
  int max_iter = 200;
  PvSettings pv;
  /// Interior window (fraction of L) where the PDE residual is measured.
  double window = 0.5;
};

struct ScatterResult {
  ScalarField v;
  int iterations = 0;
  /// ||v_{k+1} - v_k||_{B*} / ||v_k - v_{k-1}||_{B*}, one entry per step from the second on.
  std::vector<double> contraction_ratios;
  /// Interior relative norm of (Delta + lambda^2 - V)(u + v), scaled by lambda^2 ||u + v||.
  double residual = 0.0;
  /// ||v||_{B*} / ||u||_{B*}.
  double correction_ratio = 0.0;
};

/// lambda_V = C_n |||V|||. C_n is not known in closed form; 1 is a placeholder.
double lambda_threshold(const ScalarField& V, double C_n = 1.0);

/// Fixed point v_{k+1} = P_lambda(V (u + v_k)), v_0 = 0, i.e.
/// v = (Id - P_lambda V)^{-1} P_lambda(V u). Stops once
/// ||v_{k+1} - v_k||_{B*} <= tol ||u||_{B*}.
/// Throws DivergentSeries after three consecutive ratios >= 1, MaxIterations
/// when the budget runs out.
ScatterResult solve_correction(const ScalarField& V, double lambda, const ScalarField& u,
                               const ScatterConfig& cfg = {});

/// Interior residual of (Delta + lambda^2 - V) w, relative to lambda^2 ||w||.
double schroedinger_residual(const ScalarField& V, double lambda, const ScalarField& w, double window = 0.5);

/// Empirical lambda_V: the energy at which the observed contraction factor,
/// which scales like lambda_V / lambda, would reach one.
double empirical_threshold(const ScatterResult& probe, double lambda);

}  // namespace potrec
