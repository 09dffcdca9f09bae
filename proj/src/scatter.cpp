#include "potrec/scatter.hpp"

#include <algorithm>
#include <cmath>

#include "potrec/error.hpp"
#include "potrec/herglotz.hpp"
#include "potrec/norms.hpp"

namespace potrec {

double lambda_threshold(const ScalarField& V, double C_n) {
  if (!(C_n > 0.0)) throw Error(ErrorCode::InvalidArgument, "C_n must be positive");
  return C_n * triple_norm(V);
}

double schroedinger_residual(const ScalarField& V, double lambda, const ScalarField& w, double window) {
  ScalarField r = interior_laplacian(w, window);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += (lambda * lambda - V[i]) * w[i];
  const double denom = lambda * lambda * window_l2_norm(w, window);
  return denom > 0.0 ? window_l2_norm(r, window) / denom : 0.0;
}

ScatterResult solve_correction(const ScalarField& V, double lambda, const ScalarField& u, const ScatterConfig& cfg) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (!(V.grid() == u.grid())) throw Error(ErrorCode::GridMismatch, "potential and state grids differ");

  const Grid& grid = u.grid();
  const Multiplier pv = make_pv_multiplier(lambda, grid, cfg.pv);

  const double u_norm = b_star_norm(u);
  ScatterResult result;
  ScalarField v(grid);
  double prev_step = -1.0;
  int bad_ratios = 0;
  bool converged = false;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    ScalarField next(grid);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = V[i] * (u[i] + v[i]);
    apply_multiplier_inplace(next, pv);
    const double step = b_star_norm(next - v);
    v = std::move(next);
    result.iterations = k;
    if (prev_step > 0.0) {
      const double ratio = step / prev_step;
      result.contraction_ratios.push_back(ratio);
      bad_ratios = ratio >= 1.0 ? bad_ratios + 1 : 0;
      if (bad_ratios >= 3)
        throw Error(ErrorCode::DivergentSeries,
                    "contraction ratio >= 1 for three consecutive steps at lambda=" + std::to_string(lambda));
    }
    if (step <= cfg.tol * u_norm) {
      converged = true;
      break;
    }
    prev_step = step;
  }
  if (!converged) throw Error(ErrorCode::MaxIterations, "no convergence in " + std::to_string(cfg.max_iter) + " steps");

  result.residual = schroedinger_residual(V, lambda, u + v, cfg.window);
  result.correction_ratio = u_norm > 0.0 ? b_star_norm(v) / u_norm : 0.0;
  result.v = std::move(v);
  return result;
}

double empirical_threshold(const ScatterResult& probe, double lambda) {
  if (probe.contraction_ratios.empty()) return 0.0;
  // The asymptotic factor is the settled tail of the ratio sequence.
  const auto& r = probe.contraction_ratios;
  const double tail = *std::max_element(r.begin() + static_cast<long>(r.size() / 2), r.end());
  return lambda * tail;
}

}  // namespace potrec
