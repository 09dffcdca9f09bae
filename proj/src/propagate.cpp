#include "potrec/propagate.hpp"

#include <cmath>

#include "potrec/error.hpp"
#include "potrec/norms.hpp"

namespace potrec {

SplitStepPropagator::SplitStepPropagator(const ScalarField& V, double dt)
    : dt_(dt), potential_phase_(V.size()) {
  if (V.space() != Space::Physical) throw Error(ErrorCode::WrongSpace, "potential must be a physical field");
  if (!(dt != 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidArgument, "dt must be nonzero and finite");
  half_free_ = make_multiplier(V.grid(), [dt](double xi2) { return std::polar(1.0, -0.5 * xi2 * dt); });
  const Complex minus_i_dt{0.0, -dt};
  for (std::size_t i = 0; i < V.size(); ++i) potential_phase_[i] = std::exp(minus_i_dt * V[i]);
}

void SplitStepPropagator::step(ScalarField& u) const {
  apply_multiplier_inplace(u, half_free_);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= potential_phase_[i];
  apply_multiplier_inplace(u, half_free_);
}

StepCount step_count(const PropagatorConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (!(cfg.T >= 0.0)) throw Error(ErrorCode::InvalidArgument, "T must be non-negative");
  StepCount c;
  c.steps = static_cast<int>(std::lround(cfg.T / cfg.dt));
  c.T = c.steps * cfg.dt;
  return c;
}

ScalarField initial_to_final(const ScalarField& V, const ScalarField& f, const PropagatorConfig& cfg) {
  if (!(V.grid() == f.grid())) throw Error(ErrorCode::GridMismatch, "potential and initial state grids differ");
  const StepCount c = step_count(cfg);
  const SplitStepPropagator prop(V, cfg.dt);
  ScalarField u = f;
  for (int k = 0; k < c.steps; ++k) prop.step(u);
  return u;
}

std::vector<ScalarField> trajectory(const ScalarField& V, const ScalarField& f, double dt, int steps) {
  if (!(V.grid() == f.grid())) throw Error(ErrorCode::GridMismatch, "potential and initial state grids differ");
  const SplitStepPropagator prop(V, dt);
  std::vector<ScalarField> out;
  out.reserve(steps + 1);
  out.push_back(f);
  for (int k = 0; k < steps; ++k) {
    ScalarField next = out.back();
    prop.step(next);
    out.push_back(std::move(next));
  }
  return out;
}

StationaryPhaseReport stationary_phase_probe(const ScalarField& V, double lambda, const ScalarField& w, double dt,
                                             int steps, double window, bool taper) {
  if (!(V.grid() == w.grid())) throw Error(ErrorCode::GridMismatch, "potential and state grids differ");
  const double inner = window + 0.5 * (1.0 - window);
  const double outer = window + 0.9 * (1.0 - window);
  ScalarField u = taper ? multiply(w, smooth_taper(w.grid(), inner, outer)) : w;
  const SplitStepPropagator prop(V, dt);
  const double ref = window_l2_norm(w, window);
  StationaryPhaseReport rep;
  for (int k = 1; k <= steps; ++k) {
    prop.step(u);
    const Complex phase = std::polar(1.0, -lambda * lambda * k * dt);
    ScalarField diff = u;
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= phase * w[i];
    rep.deviations.push_back(ref > 0.0 ? window_l2_norm(diff, window) / ref : 0.0);
  }
  rep.final_deviation = rep.deviations.empty() ? 0.0 : rep.deviations.back();
  return rep;
}

DuhamelReport duhamel_difference_probe(const ScalarField& V1, const ScalarField& V2, const ScalarField& f,
                                       const ScalarField& g, const PropagatorConfig& cfg) {
  const Grid& grid = f.grid();
  if (!(V1.grid() == grid && V2.grid() == grid && g.grid() == grid))
    throw Error(ErrorCode::GridMismatch, "probe inputs live on different grids");
  const StepCount c = step_count(cfg);
  DuhamelReport rep;
  rep.T = c.T;

  const ScalarField zero(grid);
  // Backward adjoint trajectory v2(t_k), k = K..0, stored by forward index.
  std::vector<ScalarField> v2(c.steps + 1);
  {
    const SplitStepPropagator back(conj(V2), -cfg.dt);
    ScalarField v = g;
    v2[c.steps] = v;
    for (int k = c.steps - 1; k >= 0; --k) {
      back.step(v);
      v2[k] = v;
    }
  }

  const ScalarField F = V1 - V2;
  const SplitStepPropagator fwd1(V1, cfg.dt);
  const SplitStepPropagator fwd2(V2, cfg.dt);
  const SplitStepPropagator free(zero, cfg.dt);
  ScalarField u1 = f, u2 = f, u0 = f;
  Complex sum{0.0, 0.0}, sum_born{0.0, 0.0};
  for (int k = 0; k <= c.steps; ++k) {
    const double w = (k == 0 || k == c.steps) ? 0.5 : 1.0;
    sum += w * inner(multiply(F, u1), v2[k]);
    sum_born += w * inner(multiply(F, u0), v2[k]);
    if (k < c.steps) {
      fwd1.step(u1);
      fwd2.step(u2);
      free.step(u0);
    }
  }
  const Complex minus_i{0.0, -1.0};
  rep.A = inner(u1, g) - inner(u2, g);
  rep.B = minus_i * cfg.dt * sum;
  rep.B_born = minus_i * cfg.dt * sum_born;
  auto rel = [](Complex a, Complex b) {
    const double s = std::abs(a) + std::abs(b);
    return s > 0.0 ? std::abs(a - b) / s : 0.0;
  };
  rep.discrepancy = rel(rep.A, rep.B);
  rep.born_discrepancy = rel(rep.A, rep.B_born);
  return rep;
}

Complex discrete_ibp_defect(const std::vector<ScalarField>& u, const std::vector<ScalarField>& v, double dt) {
  if (u.size() != v.size() || u.size() < 3) throw Error(ErrorCode::InvalidArgument, "need matching trajectories of >= 3 samples");
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  const std::size_t K = u.size() - 1;
  const double scale = std::max(linf_norm(u[K / 2]), 1e-300);
  if (linf_norm(u.front()) > 1e-12 * scale || linf_norm(u.back()) > 1e-12 * scale)
    throw Error(ErrorCode::EndpointCondition, "u must vanish at the first and last time samples");

  auto time_derivative = [&](const std::vector<ScalarField>& x, std::size_t k) {
    ScalarField d(x[k].grid());
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (k == 0)
        d[i] = (-3.0 * x[0][i] + 4.0 * x[1][i] - x[2][i]) / (2.0 * dt);
      else if (k == K)
        d[i] = (3.0 * x[K][i] - 4.0 * x[K - 1][i] + x[K - 2][i]) / (2.0 * dt);
      else
        d[i] = (x[k + 1][i] - x[k - 1][i]) / (2.0 * dt);
    }
    return d;
  };
  auto schroedinger = [&](const std::vector<ScalarField>& x, std::size_t k) {
    ScalarField out = spectral_laplacian(x[k]);
    const ScalarField dtx = time_derivative(x, k);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += Complex{0.0, 1.0} * dtx[i];
    return out;
  };

  Complex total{0.0, 0.0};
  for (std::size_t k = 0; k <= K; ++k) {
    const double w = (k == 0 || k == K) ? 0.5 * dt : dt;
    total += w * (inner(schroedinger(u, k), v[k]) - inner(u[k], schroedinger(v, k)));
  }
  return total;
}

double discrete_ibp_probe(const std::vector<ScalarField>& u, const std::vector<ScalarField>& v, double dt) {
  return std::abs(discrete_ibp_defect(u, v, dt));
}

}  // namespace potrec
