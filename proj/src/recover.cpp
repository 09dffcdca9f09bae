#include "potrec/recover.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "potrec/error.hpp"
#include "potrec/parallel.hpp"

namespace potrec {

namespace {

constexpr double kPi = std::numbers::pi;

double dot(int n, const Point& a, const Point& b) {
  double s = 0.0;
  for (int d = 0; d < n; ++d) s += a[d] * b[d];
  return s;
}

bool is_real(const ScalarField& f) {
  return std::all_of(f.values().begin(), f.values().end(), [](const Complex& z) { return z.imag() == 0.0; });
}

}  // namespace

double EpsRule::operator()(double lambda) const { return scale * std::pow(lambda, exponent); }

Point choose_nu(int n, const Point& kappa) {
  const double k2 = dot(n, kappa, kappa);
  for (int axis = 0; axis < n; ++axis) {
    Point e{0.0, 0.0, 0.0};
    e[axis] = 1.0;
    if (k2 > 0.0) {
      const double c = kappa[axis] / k2;
      for (int d = 0; d < n; ++d) e[d] -= c * kappa[d];
    }
    const double len = std::sqrt(dot(n, e, e));
    // Parallel axes leave (almost) nothing after projection.
    if (len > 1e-6) {
      for (int d = 0; d < n; ++d) e[d] /= len;
      // One more projection pass to push kappa . nu down to rounding.
      if (k2 > 0.0) {
        const double c = dot(n, e, kappa) / k2;
        for (int d = 0; d < n; ++d) e[d] -= c * kappa[d];
        const double len2 = std::sqrt(dot(n, e, e));
        for (int d = 0; d < n; ++d) e[d] /= len2;
      }
      return e;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "no admissible nu");
}

ModePlan make_plan(int n, const Point& kappa, std::vector<double> lambdas, PairingMode mode) {
  if (n != 2 && n != 3) throw Error(ErrorCode::InvalidDimension, "plans need n in {2,3}");
  if (lambdas.empty()) throw Error(ErrorCode::InvalidArgument, "empty lambda schedule");
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] > lambdas[i - 1])) throw Error(ErrorCode::InvalidArgument, "lambda schedule must be strictly increasing");
  const double kn = std::sqrt(dot(n, kappa, kappa));
  if (lambdas.front() < 0.5 * kn) throw Error(ErrorCode::InvalidArgument, "schedule starts below |kappa|/2");
  ModePlan plan;
  plan.n = n;
  plan.kappa = kappa;
  plan.nu = choose_nu(n, kappa);
  plan.lambdas = std::move(lambdas);
  plan.eps_rule = EpsRule::standard(n);
  plan.mode = mode;
  return plan;
}

Directions directions(int n, const Point& kappa, double lambda, const Point& nu) {
  const double kn = std::sqrt(dot(n, kappa, kappa));
  if (!(lambda > 0.0) || lambda < 0.5 * kn * (1.0 - 1e-12))
    throw Error(ErrorCode::InvalidArgument, "lambda must be at least |kappa|/2");
  if (std::abs(std::sqrt(dot(n, nu, nu)) - 1.0) > 1e-12) throw Error(ErrorCode::NonUnitVector, "nu must be a unit vector");
  if (std::abs(dot(n, kappa, nu)) > 1e-12 * std::max(1.0, kn))
    throw Error(ErrorCode::InvalidArgument, "nu must be orthogonal to kappa");
  const double s = std::sqrt(std::max(0.0, 1.0 - kn * kn / (4.0 * lambda * lambda)));
  Directions out;
  for (int d = 0; d < n; ++d) {
    const double half = kappa[d] / (2.0 * lambda);
    out.omega1[d] = half + s * nu[d];
    out.omega2[d] = half - s * nu[d];
  }
  return out;
}

double gamma_modulus(const ScalarField& F, double rho) {
  if (F.space() != Space::Physical) throw Error(ErrorCode::WrongSpace, "gamma_modulus expects a physical field");
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
  const Grid& g = F.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double a = std::abs(F[i]);
    if (a == 0.0) continue;
    const Point x = g.point(i);
    const double t = rho * std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    s += (t <= kPi ? 2.0 * std::sin(0.5 * t) : 2.0) * a;
  }
  return s * g.cell_volume() * std::pow(2.0 * kPi, -0.5 * g.dim());
}

Complex fourier_at(const ScalarField& F, const Point& xi) {
  if (F.space() != Space::Physical) throw Error(ErrorCode::WrongSpace, "fourier_at expects a physical field");
  const Grid& g = F.grid();
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (F[i] == Complex{0.0, 0.0}) continue;
    const Point x = g.point(i);
    s += F[i] * std::polar(1.0, -(x[0] * xi[0] + x[1] * xi[1] + x[2] * xi[2]));
  }
  return s * g.cell_volume() * std::pow(2.0 * kPi, -0.5 * g.dim());
}

ModeEstimate recover_mode(const ScalarField& V1, const ScalarField& V2, const ModePlan& plan,
                          const ScatterConfig& solver) {
  if (!(V1.grid() == V2.grid())) throw Error(ErrorCode::GridMismatch, "potentials live on different grids");
  const Grid& grid = V1.grid();
  const int n = grid.dim();
  if (plan.n != n) throw Error(ErrorCode::InvalidDimension, "plan and grid dimensions differ");
  const ScalarField F = V1 - V2;
  ModeEstimate est;
  est.kappa = plan.kappa;
  est.nu = plan.nu;
  est.mode = plan.mode;
  for (double lambda : plan.lambdas) {
    ModeSample s;
    s.lambda = lambda;
    s.eps = plan.eps_rule(lambda);
    const Directions dirs = directions(n, plan.kappa, lambda, plan.nu);
    const SphericalDensity d1 = make_cap_density(s.eps, rotation_to(n, dirs.omega1), plan.cap_nodes);
    const SphericalDensity d2 = make_cap_density(s.eps, rotation_to(n, dirs.omega2), plan.cap_nodes);
    const ScalarField u1 = herglotz_wave(lambda, d1, grid);
    const ScalarField u2 = herglotz_wave(lambda, d2, grid);
    s.density1 = density_norms(d1);
    s.density2 = density_norms(d2);
    s.normalization = std::pow(2.0 * kPi, 0.5 * n) * s.density1.l1 * s.density2.l1;

    Complex leading{0.0, 0.0};
    for (std::size_t i = 0; i < F.size(); ++i) leading += F[i] * u1[i] * u2[i];
    s.leading = leading * grid.cell_volume();
    s.full = s.leading;

    if (plan.mode == PairingMode::Full) {
      const ScatterResult r1 = solve_correction(V1, lambda, u1, solver);
      const ScatterResult r2 = solve_correction(V2, lambda, u2, solver);
      s.residual1 = r1.residual;
      s.residual2 = r2.residual;
      Complex rem{0.0, 0.0}, full{0.0, 0.0};
      for (std::size_t i = 0; i < F.size(); ++i) {
        const Complex v1 = r1.v[i], v2 = r2.v[i];
        rem += F[i] * (u1[i] * v2 + v1 * u2[i] + v1 * v2);
        full += F[i] * (u1[i] + v1) * (u2[i] + v2);
      }
      s.remainder = rem * grid.cell_volume();
      s.full = full * grid.cell_volume();
    }
    s.estimate = (plan.mode == PairingMode::Full ? s.full : s.leading) / s.normalization;
    s.gamma = gamma_modulus(F, lambda * s.eps);
    est.samples.push_back(s);
  }
  return est;
}

EnvelopeReport error_envelope(const ModeEstimate& estimate, const ScalarField& F, Complex truth) {
  EnvelopeReport rep;
  rep.truth = truth;
  if (estimate.samples.empty()) return rep;
  const double inv_n = 1.0 / F.grid().dim();
  const ModeSample& first = estimate.samples.front();
  const double err0 = std::abs(first.estimate - truth);
  rep.constant = std::max(0.0, err0 - first.gamma) * std::pow(first.lambda, inv_n);
  for (const ModeSample& s : estimate.samples) {
    EnvelopeRow row;
    row.lambda = s.lambda;
    row.error = std::abs(s.estimate - truth);
    row.gamma = s.gamma;
    row.envelope = s.gamma + rep.constant * std::pow(s.lambda, -inv_n);
    // Rounding slack so an exact-zero error never fails against a zero envelope.
    row.under = row.error <= row.envelope * (1.0 + 1e-12) + 1e-14;
    rep.all_under = rep.all_under && row.under;
    rep.rows.push_back(row);
  }
  return rep;
}

EnvelopeReport error_envelope(const ModeEstimate& estimate, const ScalarField& F) {
  return error_envelope(estimate, F, fourier_at(F, estimate.kappa));
}

Reconstruction reconstruct(const ScalarField& V1, const ScalarField& V2, const KappaLattice& lattice,
                           const ModePlan& plan_template, const ScatterConfig& solver) {
  if (lattice.count < 1 || lattice.count % 2 == 0) throw Error(ErrorCode::InvalidArgument, "kappa lattice count must be odd");
  if (!(lattice.spacing > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa spacing must be positive");
  if (plan_template.lambdas.empty()) throw Error(ErrorCode::InvalidArgument, "empty lambda schedule");
  const Grid& grid = V1.grid();
  const int n = grid.dim();
  const double lambda = plan_template.lambdas.back();
  const int half = (lattice.count - 1) / 2;

  Reconstruction rec;
  const std::size_t total = static_cast<std::size_t>(std::pow(lattice.count, n));
  for (std::size_t idx = 0; idx < total; ++idx) {
    Point k{0.0, 0.0, 0.0};
    std::size_t rest = idx;
    for (int d = n - 1; d >= 0; --d) {
      k[d] = lattice.spacing * (static_cast<int>(rest % lattice.count) - half);
      rest /= lattice.count;
    }
    if (std::sqrt(dot(n, k, k)) > 0.5 * lambda * (1.0 + 1e-12))
      throw Error(ErrorCode::InvalidArgument, "kappa lattice exceeds the resolvable band |kappa| <= lambda_max/2");
    rec.kappas.push_back(k);
  }

  rec.estimates.assign(total, Complex{0.0, 0.0});
  parallel_for(total, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      ModePlan plan = plan_template;
      plan.kappa = rec.kappas[i];
      plan.nu = choose_nu(n, rec.kappas[i]);
      plan.lambdas = {lambda};
      rec.estimates[i] = recover_mode(V1, V2, plan, solver).samples.back().estimate;
    }
  });

  // Index of -kappa is total - 1 - idx on a symmetric lattice.
  const bool real = is_real(V1) && is_real(V2);
  std::vector<Complex> coeff(total);
  for (std::size_t i = 0; i < total; ++i) {
    const Complex mirror = std::conj(rec.estimates[total - 1 - i]);
    rec.max_asymmetry = std::max(rec.max_asymmetry, std::abs(rec.estimates[i] - mirror));
    coeff[i] = real ? 0.5 * (rec.estimates[i] + mirror) : rec.estimates[i];
  }

  const double cell = std::pow(lattice.spacing, n) * std::pow(2.0 * kPi, -0.5 * n);
  const double extent = kPi / lattice.spacing;
  rec.field = ScalarField(grid);
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const Point x = grid.point(p);
      bool inside = true;
      for (int d = 0; d < n; ++d) inside = inside && std::abs(x[d]) < extent;
      if (!inside) continue;
      Complex s{0.0, 0.0};
      for (std::size_t i = 0; i < total; ++i) {
        const Point& k = rec.kappas[i];
        s += coeff[i] * std::polar(1.0, x[0] * k[0] + x[1] * k[1] + x[2] * k[2]);
      }
      rec.field[p] = real ? Complex{(s * cell).real(), 0.0} : s * cell;
    }
  });

  const ScalarField truth = V1 - V2;
  const double tn = l2_norm(truth);
  const double en = l2_norm(rec.field - truth);
  rec.relative_l2_error = tn > 0.0 ? en / tn : en;
  return rec;
}

}  // namespace potrec
