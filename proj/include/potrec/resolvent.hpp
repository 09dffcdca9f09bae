#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "potrec/grid.hpp"

namespace potrec {

enum class EtaRule { Fixed, GridTied };

/// Regularisation of the principal-value symbol 1/(lambda^2 - |xi|^2).
///
/// The multiplier actually applied is d/(d^2 + eta^2), d = lambda^2 - |xi|^2,
/// the real part of the limiting-absorption symbol. With `extrapolate` set,
/// the multiplier is evaluated at every width in `eta_list` and the results
/// combined by Richardson extrapolation in eta^2, which cancels the O(eta^2)
/// bias off the shell.
struct PvSettings {
  EtaRule rule = EtaRule::GridTied;
  /// Width for EtaRule::Fixed.
  double eta = 1.0;
  /// eta = grid_factor (pi/L) 2 lambda for EtaRule::GridTied.
  double grid_factor = 2.0;
  bool extrapolate = false;
  /// Strictly decreasing widths used when extrapolating (two entries). Empty
  /// means {eta, eta/2} with eta from the rule.
  std::vector<double> eta_list;
};

double effective_eta(double lambda, const Grid& grid, const PvSettings& s);
/// The two widths an extrapolated multiplier combines.
std::vector<double> extrapolation_widths(double lambda, const Grid& grid, const PvSettings& s);

/// Symbol value at |xi|^2 with the settings' regularisation.
double pv_symbol(double lambda, double xi2, double eta);

/// Tabulated multiplier for repeated application at one lambda.
Multiplier make_pv_multiplier(double lambda, const Grid& grid, const PvSettings& s = {});

ScalarField apply_pv(double lambda, const ScalarField& f, const PvSettings& s = {});

struct ResolventProbeRow {
  double lambda = 0.0;
  double ratio = 0.0;  // b_star_norm(P f) / b_norm(f)
  double eta = 0.0;
};

struct ResolventProbeReport {
  std::vector<ResolventProbeRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ratio table for one f sampled on the grid.
ResolventProbeReport resolvent_bound_probe(const std::vector<double>& lambdas, const ScalarField& f,
                                           const PvSettings& s = {});

/// Ratio table where the probe field may depend on lambda (e.g. a bump
/// modulated onto the shell |xi| = lambda, which saturates the bound).
ResolventProbeReport resolvent_bound_probe(const std::vector<double>& lambdas,
                                           const std::function<ScalarField(double)>& make_f,
                                           const PvSettings& s = {});

/// Least-squares slope and intercept of log(y) against log(x).
std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace potrec
