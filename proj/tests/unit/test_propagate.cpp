#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "potrec/error.hpp"
#include "potrec/norms.hpp"
#include "potrec/potentials.hpp"
#include "potrec/herglotz.hpp"
#include "potrec/propagate.hpp"
#include "potrec/scatter.hpp"

using namespace potrec;
using testing::max_abs;
using testing::max_abs_diff;

namespace {
constexpr double kPi = std::numbers::pi;

// Free solution of i u_t = -Delta u in 2D from exp(-|x|^2 / w^2).
ScalarField free_gaussian(const Grid& g, double w, double t) {
  const Complex s = Complex(w * w, 4.0 * t);
  return sample(g, [=](const Point& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return (w * w / s) * std::exp(-r2 / s);
  });
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}
}  // namespace

TEST_SUITE("propagate") {
  TEST_CASE("a free lattice mode only picks up its phase") {
    const Grid g = make_grid(2, kPi, 64);
    const ScalarField f = lattice_mode(g, {3, -2, 0});
    const ScalarField u = initial_to_final(ScalarField(g), f, {0.7, 1e-2});
    CHECK(max_abs_diff(u, std::polar(1.0, -13.0 * 0.7) * f) <= 1e-12);
  }

  TEST_CASE("a constant potential multiplies by exp(-i V0 T)") {
    const Grid g = make_grid(2, 4.0, 64);
    std::mt19937_64 rng(51);
    const ScalarField f = testing::packet(g, 1.0, {0.5, 0, 0}, {2, 1, 0});
    const double V0 = 2.5;
    const ScalarField V = sample(g, [V0](const Point&) { return Complex(V0, 0.0); });
    const PropagatorConfig cfg{0.3, 1e-3};
    const ScalarField a = initial_to_final(V, f, cfg);
    const ScalarField b = initial_to_final(ScalarField(g), f, cfg);
    CHECK(max_abs_diff(a, std::polar(1.0, -V0 * 0.3) * b) <= 1e-12);
  }

  TEST_CASE("free Gaussian matches the closed form") {
    const Grid g = make_grid(2, 8.0, 128);
    const ScalarField u = initial_to_final(ScalarField(g), free_gaussian(g, 1.0, 0.0), {0.5, 1e-3});
    CHECK(max_abs_diff(u, free_gaussian(g, 1.0, 0.5)) <= 1e-4);
  }

  TEST_CASE("mass is conserved for a real potential") {
    const Grid g = make_grid(2, kPi, 128);
    const ScalarField V = sample_potential(PotentialSpec::gaussian(5.0, 0.3), g);
    const ScalarField f = testing::packet(g, 0.5, {0, 0, 0}, {4, 0, 0});
    const double m0 = l2_norm(f);
    const std::vector<ScalarField> traj = trajectory(V, f, 1e-3, 200);
    CHECK(traj.size() == 201);
    double drift = 0.0;
    for (const ScalarField& u : traj) drift = std::max(drift, std::abs(l2_norm(u) - m0) / m0);
    CHECK(drift <= 1e-12);
  }

  TEST_CASE("stepping back with -dt undoes the forward steps") {
    const Grid g = make_grid(2, kPi, 64);
    std::mt19937_64 rng(53);
    const ScalarField V = sample_potential(PotentialSpec::gaussian(5.0, 0.3), g);
    const ScalarField f = testing::random_field(g, rng);
    const SplitStepPropagator fwd(V, 1e-2), back(V, -1e-2);
    ScalarField u = f;
    for (int k = 0; k < 50; ++k) fwd.step(u);
    for (int k = 0; k < 50; ++k) back.step(u);
    CHECK(max_abs_diff(u, f) <= 1e-11 * max_abs(f));
  }

  TEST_CASE("Strang splitting is second order in dt") {
    const Grid g = make_grid(2, kPi, 64);
    const ScalarField V = sample_potential(PotentialSpec::gaussian(5.0, 0.5), g);
    const ScalarField f = testing::packet(g, 0.5, {0, 0, 0}, {2, 0, 0});
    const ScalarField ref = initial_to_final(V, f, {0.2, 1e-5});
    const double e1 = l2_norm(initial_to_final(V, f, {0.2, 4e-3}) - ref);
    const double e2 = l2_norm(initial_to_final(V, f, {0.2, 2e-3}) - ref);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  }

  TEST_CASE("step count and configuration errors") {
    CHECK(step_count({0.5, 1e-3}).steps == 500);
    CHECK(step_count({0.5, 1e-3}).T == doctest::Approx(0.5));
    CHECK(step_count({0.0, 1e-3}).steps == 0);
    CHECK(step_count({1.0, 0.3}).steps == 3);
    CHECK(step_count({1.0, 0.3}).T == doctest::Approx(0.9));
    CHECK_THROWS_AS(step_count({1.0, 0.0}), Error);
    CHECK_THROWS_AS(step_count({-1.0, 1e-3}), Error);
    const Grid g = make_grid(2, 1.0, 16);
    CHECK_THROWS_AS(SplitStepPropagator(ScalarField(g), 0.0), Error);
    CHECK(code_of([&] { initial_to_final(ScalarField(g), ScalarField(make_grid(2, 2.0, 16)), {}); }) ==
          ErrorCode::GridMismatch);
  }

  TEST_CASE("a free shell mode is stationary") {
    const Grid g = make_grid(2, kPi, 64);
    const ScalarField w = lattice_mode(g, {3, 4, 0});
    // Periodic data needs no taper: the scheme is exact on the mode.
    const StationaryPhaseReport exact = stationary_phase_probe(ScalarField(g), 5.0, w, 1e-4, 20, 0.5, false);
    CHECK(exact.deviations.size() == 20);
    CHECK(exact.final_deviation <= 1e-12);

    std::vector<double> finals;
    for (int N : {64, 128}) {
      const Grid h = make_grid(2, kPi, N);
      const StationaryPhaseReport r = stationary_phase_probe(ScalarField(h), 5.0, lattice_mode(h, {3, 4, 0}), 1e-4, 20);
      // With the taper on, only its edge leaks into the window, at a constant rate.
      CHECK(r.deviations[19] / r.deviations[0] == doctest::Approx(20.0).epsilon(0.1));
      finals.push_back(r.final_deviation);
    }
    CHECK(finals[0] <= 1e-4);
    CHECK(finals[1] <= 0.1 * finals[0]);
  }

  TEST_CASE("a scattering stationary state keeps its phase under the Gaussian potential") {
    const double lambda = 32.0;
    const Grid g = make_grid(2, kPi, resolving_points(kPi, lambda));
    const ScalarField V = sample_potential(PotentialSpec::gaussian(1.0, 0.3), g);
    const ScalarField u = herglotz_wave(lambda, make_cap_density(std::pow(lambda, -1.5), rotation_to(2, {0, 1, 0})), g);
    ScatterConfig cfg;
    cfg.pv.extrapolate = true;
    const ScalarField w = u + solve_correction(V, lambda, u, cfg).v;
    const StationaryPhaseReport r = stationary_phase_probe(V, lambda, w, 1e-4, 100);
    CHECK(r.final_deviation <= 1e-2);
  }

  TEST_CASE("Duhamel representation with identical and with weakly different potentials") {
    const Grid g = make_grid(2, kPi, 64);
    const ScalarField V = sample_potential(PotentialSpec::gaussian(1.0, 0.3), g);
    const ScalarField f = testing::packet(g, 0.5, {-0.5, 0, 0}, {3, 0, 0});
    const ScalarField h = testing::packet(g, 0.5, {0.5, 0, 0}, {3, 0, 0});
    const DuhamelReport same = duhamel_difference_probe(V, V, f, h, {0.2, 1e-3});
    CHECK(same.A == Complex(0.0, 0.0));
    CHECK(same.B == Complex(0.0, 0.0));
    CHECK(same.discrepancy == 0.0);

    const ScalarField V2 = sample_potential(PotentialSpec::gaussian(0.5, 0.3, {0.15, -0.1, 0.0}), g);
    const DuhamelReport r = duhamel_difference_probe(V, V2, f, h, {0.2, 1e-3});
    CHECK(std::abs(r.A) > 0.0);
    CHECK(r.discrepancy <= 1e-5);
    // The Born term only drops O(||V1||) effects.
    CHECK(r.born_discrepancy <= 0.1);
    CHECK(r.born_discrepancy >= r.discrepancy);
    CHECK(r.T == doctest::Approx(0.2));
  }

  TEST_CASE("discrete integration by parts") {
    const Grid g = make_grid(2, kPi, 32);
    const int K = 40;
    const double dt = 1.0 / K;
    auto make = [&](auto&& profile, const ScalarField& phi) {
      std::vector<ScalarField> x;
      for (int k = 0; k <= K; ++k) x.push_back(Complex(profile(k * dt)) * phi);
      return x;
    };
    const ScalarField p1 = testing::packet(g, 0.5, {0, 0, 0}, {1, 0, 0});
    const ScalarField p2 = testing::packet(g, 0.8, {0.3, 0, 0}, {0, 2, 0});
    const auto u = make([](double t) { return std::sin(kPi * t); }, p1);
    const auto v = make([](double t) { return t * (1.0 - t); }, p2);
    const std::vector<ScalarField> zero(K + 1, ScalarField(g));
    CHECK(discrete_ibp_defect(zero, v, dt) == Complex(0.0, 0.0));

    const Complex uv = discrete_ibp_defect(u, v, dt), vu = discrete_ibp_defect(v, u, dt);
    CHECK(std::abs(vu + std::conj(uv)) <= 1e-12 * (std::abs(uv) + 1e-300));
    CHECK(discrete_ibp_probe(u, v, dt) == std::abs(uv));

    // With both trajectories vanishing at the ends the discrete sums cancel exactly.
    const double scale = l2_norm(spectral_laplacian(p1)) * l2_norm(p2);
    CHECK(std::abs(uv) <= 1e-13 * scale);
    // Otherwise the defect is a second-order time-discretisation error.
    auto defect_with_open_end = [&](int steps) {
      std::vector<ScalarField> a, b;
      for (int k = 0; k <= steps; ++k) {
        const double t = k / double(steps);
        a.push_back(Complex(std::sin(kPi * t) * t) * p1);
        b.push_back(Complex(std::exp(t) * t * t) * p2);
      }
      return discrete_ibp_probe(a, b, 1.0 / steps);
    };
    const double d1 = defect_with_open_end(40), d2 = defect_with_open_end(80);
    CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.1));

    const auto bad = make([](double t) { return 1.0 + t; }, p1);
    CHECK(code_of([&] { discrete_ibp_defect(bad, v, dt); }) == ErrorCode::EndpointCondition);
    CHECK_THROWS_AS(discrete_ibp_defect(std::vector<ScalarField>(2, ScalarField(g)), std::vector<ScalarField>(2, ScalarField(g)), dt), Error);
    CHECK_THROWS_AS(discrete_ibp_defect(u, v, 0.0), Error);
  }
}
