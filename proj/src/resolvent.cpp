#include "potrec/resolvent.hpp"

#include <cmath>
#include <tuple>

#include "potrec/error.hpp"
#include "potrec/norms.hpp"

namespace potrec {

double effective_eta(double lambda, const Grid& grid, const PvSettings& s) {
  if (s.rule == EtaRule::Fixed) return s.eta;
  return s.grid_factor * grid.freq_step() * 2.0 * lambda;
}

std::vector<double> extrapolation_widths(double lambda, const Grid& grid, const PvSettings& s) {
  if (!s.eta_list.empty()) return s.eta_list;
  const double eta = effective_eta(lambda, grid, s);
  return {eta, 0.5 * eta};
}

double pv_symbol(double lambda, double xi2, double eta) {
  const double d = lambda * lambda - xi2;
  return d / (d * d + eta * eta);
}

Multiplier make_pv_multiplier(double lambda, const Grid& grid, const PvSettings& s) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  if (!s.extrapolate) {
    const double eta = effective_eta(lambda, grid, s);
    if (!(eta > 0.0)) throw Error(ErrorCode::InvalidArgument, "eta must be positive");
    return make_multiplier(grid, [&](double xi2) { return Complex{pv_symbol(lambda, xi2, eta), 0.0}; });
  }
  const std::vector<double> etas = extrapolation_widths(lambda, grid, s);
  if (etas.size() != 2 || !(etas[0] > etas[1]) || !(etas[1] > 0.0))
    throw Error(ErrorCode::InvalidArgument, "extrapolation needs two strictly decreasing positive widths");
  // S(eta) = 1/d - eta^2/d^3 + O(eta^4): eliminate the eta^2 term.
  const double ea = etas[0], eb = etas[1];
  const double a2 = ea * ea, b2 = eb * eb;
  return make_multiplier(grid, [&](double xi2) {
    const double sa = pv_symbol(lambda, xi2, ea);
    const double sb = pv_symbol(lambda, xi2, eb);
    return Complex{(a2 * sb - b2 * sa) / (a2 - b2), 0.0};
  });
}

ScalarField apply_pv(double lambda, const ScalarField& f, const PvSettings& s) {
  return apply_multiplier(f, make_pv_multiplier(lambda, f.grid(), s));
}

std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidArgument, "fit needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return {slope, (sy - slope * sx) / k};
}

ResolventProbeReport resolvent_bound_probe(const std::vector<double>& lambdas,
                                           const std::function<ScalarField(double)>& make_f,
                                           const PvSettings& s) {
  ResolventProbeReport report;
  std::vector<double> xs, ys;
  for (double lambda : lambdas) {
    const ScalarField f = make_f(lambda);
    const double bf = b_norm(f);
    if (!(bf > 0.0)) throw Error(ErrorCode::InvalidArgument, "probe field must be nonzero");
    const ScalarField pf = apply_pv(lambda, f, s);
    const double eta = s.extrapolate ? extrapolation_widths(lambda, f.grid(), s).back() : effective_eta(lambda, f.grid(), s);
    report.rows.push_back({lambda, b_star_norm(pf) / bf, eta});
    xs.push_back(lambda);
    ys.push_back(report.rows.back().ratio);
  }
  if (xs.size() >= 2) std::tie(report.slope, report.intercept) = loglog_fit(xs, ys);
  return report;
}

ResolventProbeReport resolvent_bound_probe(const std::vector<double>& lambdas, const ScalarField& f,
                                           const PvSettings& s) {
  return resolvent_bound_probe(lambdas, [&f](double) { return f; }, s);
}

}  // namespace potrec
