#pragma once

#include <vector>

#include "potrec/grid.hpp"

namespace potrec {

struct PropagatorConfig {
  double T = 1.0;
  double dt = 1e-3;
};

/// Strang splitting for i u_t = -Delta u + V u on the periodic grid: free
/// half-step e^{-i|xi|^2 dt/2}, potential step e^{-i V dt}, free half-step.
/// A negative dt steps backwards in time.
class SplitStepPropagator {
 public:
  SplitStepPropagator(const ScalarField& V, double dt);

  void step(ScalarField& u) const;
  double dt() const noexcept { return dt_; }

 private:
  double dt_;
  Multiplier half_free_;
  std::vector<Complex> potential_phase_;
};

/// Number of steps for T/dt (rounded; the schedule must lie within 0.5 of an
/// integer by construction of rounding) and the time actually reached.
struct StepCount {
  int steps = 0;
  double T = 0.0;
};
StepCount step_count(const PropagatorConfig& cfg);

/// u(T) for u(0) = f, i.e. the initial-to-final-state map.
ScalarField initial_to_final(const ScalarField& V, const ScalarField& f, const PropagatorConfig& cfg);

/// States at t = 0, dt, ..., steps dt.
std::vector<ScalarField> trajectory(const ScalarField& V, const ScalarField& f, double dt, int steps);

struct StationaryPhaseReport {
  /// ||U(t) w - e^{-i lambda^2 t} w|| / ||w|| on the window, after each step.
  std::vector<double> deviations;
  double final_deviation = 0.0;
};

/// Propagates a stationary state w of (Delta + lambda^2 - V) w = 0 and
/// compares it with e^{-i lambda^2 t} w on the interior window. By default w
/// is tapered to zero near the box edge first, since a stationary state is not
/// periodic; pass taper = false for periodic data such as grid modes.
StationaryPhaseReport stationary_phase_probe(const ScalarField& V, double lambda, const ScalarField& w, double dt,
                                             int steps, double window = 0.5, bool taper = true);

struct DuhamelReport {
  /// <(U1 - U2) f, g>.
  Complex A{0.0, 0.0};
  /// -i int_0^T <(V1 - V2) u1(t), v2(t)> dt, trapezoid in time.
  Complex B{0.0, 0.0};
  /// B with u1 replaced by the free evolution of f (first Born term).
  Complex B_born{0.0, 0.0};
  /// |A - B| / (|A| + |B|), 0 when both vanish.
  double discrepancy = 0.0;
  double born_discrepancy = 0.0;
  double T = 0.0;
};

/// Compares the difference of two initial-to-final maps with its Duhamel
/// representation. u1 runs forward from f under V1; v2 runs backward from g
/// at time T under conj(V2), so that
///   <U1 f, g> - <U2 f, g> = -i int_0^T int (V1 - V2) u1 conj(v2) dx dt.
DuhamelReport duhamel_difference_probe(const ScalarField& V1, const ScalarField& V2, const ScalarField& f,
                                       const ScalarField& g, const PropagatorConfig& cfg);

/// Signed discrete integration-by-parts defect
///   sum_t <(i d_t + Delta) u, v> - sum_t <u, (i d_t + Delta) v>
/// with second-order time differences (one-sided at the ends) and trapezoid
/// weights dt, spatial weight h^n. u must vanish at the first and last sample.
Complex discrete_ibp_defect(const std::vector<ScalarField>& u, const std::vector<ScalarField>& v, double dt);
/// |discrete_ibp_defect|.
double discrete_ibp_probe(const std::vector<ScalarField>& u, const std::vector<ScalarField>& v, double dt);

}  // namespace potrec
