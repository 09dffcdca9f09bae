#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "potrec/error.hpp"
#include "potrec/herglotz.hpp"
#include "potrec/norms.hpp"
#include "potrec/potentials.hpp"
#include "potrec/scatter.hpp"

using namespace potrec;
using testing::max_abs;
using testing::max_abs_diff;

namespace {
constexpr double kPi = std::numbers::pi;

Grid grid_at(double lambda) { return make_grid(2, kPi, std::max(64, resolving_points(kPi, lambda))); }

ScatterConfig extrapolated() {
  ScatterConfig cfg;
  cfg.pv.extrapolate = true;
  return cfg;
}

ScalarField wave(double lambda, const Grid& g, const Point& dir) {
  return herglotz_wave(lambda, make_cap_density(std::pow(lambda, -1.5), rotation_to(2, dir)), g);
}
}  // namespace

TEST_SUITE("scatter") {
  TEST_CASE("lambda threshold") {
    const Grid g = make_grid(2, 4.0, 64);
    CHECK(lambda_threshold(ScalarField(g)) == 0.0);
    const ScalarField ball = sample(g, [](const Point& x) {
      return std::hypot(x[0], x[1]) <= 1.0 ? Complex(1.0) : Complex(0.0);
    });
    CHECK(lambda_threshold(ball, 1.0) == doctest::Approx(1.0));
    CHECK(lambda_threshold(Complex(3.0, 0.0) * ball, 2.0) == doctest::Approx(6.0));
    CHECK_THROWS_AS(lambda_threshold(ball, 0.0), Error);
  }

  TEST_CASE("zero potential gives zero correction in one step") {
    const double lambda = 8.0;
    const Grid g = grid_at(lambda);
    const ScatterResult r = solve_correction(ScalarField(g), lambda, wave(lambda, g, {0.0, 1.0, 0.0}));
    CHECK(r.iterations == 1);
    CHECK(max_abs(r.v) == 0.0);
    CHECK(r.correction_ratio == 0.0);
  }

  TEST_CASE("Gaussian potential above threshold converges with a small residual") {
    for (double lambda : {16.0, 32.0}) {
      const Grid g = grid_at(lambda);
      const ScalarField V = sample_potential(PotentialSpec::gaussian(1.0, 0.3), g);
      const ScatterResult r = solve_correction(V, lambda, wave(lambda, g, {0.0, 1.0, 0.0}), extrapolated());
      REQUIRE_FALSE(r.contraction_ratios.empty());
      for (double q : r.contraction_ratios) CHECK(q < 1.0);
      CHECK(r.residual <= 1e-3);
      CHECK(r.contraction_ratios.size() == static_cast<std::size_t>(r.iterations - 1));
    }
  }

  TEST_CASE("correction ratio decays like 1/lambda") {
    std::vector<double> lambdas{8.0, 16.0, 32.0, 64.0}, ratios;
    for (double lambda : lambdas) {
      const Grid g = grid_at(lambda);
      const ScalarField V = sample_potential(PotentialSpec::gaussian(1.0, 0.3), g);
      ratios.push_back(solve_correction(V, lambda, wave(lambda, g, {0.0, 1.0, 0.0}), extrapolated()).correction_ratio);
    }
    CHECK(loglog_fit(lambdas, ratios).first == doctest::Approx(-1.0).epsilon(0.2));
  }

  TEST_CASE("solve_correction is linear in u") {
    const double lambda = 16.0;
    const Grid g = grid_at(lambda);
    const ScalarField V = sample_potential(PotentialSpec::gaussian(1.0, 0.3), g);
    const ScalarField u1 = wave(lambda, g, {0.0, 1.0, 0.0});
    const ScalarField u2 = wave(lambda, g, {0.6, -0.8, 0.0});
    ScatterConfig cfg = extrapolated();
    cfg.tol = 1e-14;
    const Complex c{2.0, -0.5};
    const ScalarField lhs = solve_correction(V, lambda, u1 + c * u2, cfg).v;
    const ScalarField rhs = solve_correction(V, lambda, u1, cfg).v + c * solve_correction(V, lambda, u2, cfg).v;
    CHECK(max_abs_diff(lhs, rhs) <= 1e-8 * max_abs(rhs));
  }

  TEST_CASE("residual of the iterates drops to a floor that shrinks like lambda^-2") {
    std::vector<double> floors;
    for (double lambda : {16.0, 32.0}) {
      const Grid g = grid_at(lambda);
      const ScalarField V = sample_potential(PotentialSpec::gaussian(3.0, 0.3), g);
      const ScalarField u = wave(lambda, g, {0.0, 1.0, 0.0});
      PvSettings pv;
      pv.extrapolate = true;
      ScalarField v(g);
      std::vector<double> res{schroedinger_residual(V, lambda, u)};
      for (int k = 0; k < 6; ++k) {
        v = apply_pv(lambda, multiply(V, u + v), pv);
        res.push_back(schroedinger_residual(V, lambda, u + v));
      }
      // The correction is O(1/lambda): one step reaches the floor, later steps never climb off it.
      CHECK(res[1] < 0.5 * res[0]);
      for (std::size_t k = 2; k < res.size(); ++k) CHECK(res[k] <= res[k - 1] * (1 + 1e-6));
      floors.push_back(res.back());
    }
    CHECK(floors[0] / floors[1] == doctest::Approx(4.0).epsilon(0.15));
  }

  TEST_CASE("one-step bound constant is stable across random states") {
    const double lambda = 16.0;
    const Grid g = grid_at(lambda);
    const ScalarField V = sample_potential(PotentialSpec::gaussian(1.0, 0.3), g);
    PvSettings pv;
    pv.extrapolate = true;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double lo = 1e300, hi = 0.0;
    for (int k = 0; k < 8; ++k) {
      const double a = kPi * U(rng);
      const ScalarField u = wave(lambda, g, {std::cos(a), std::sin(a), 0.0}) +
                            Complex(U(rng), U(rng)) * wave(lambda, g, {std::sin(a), -std::cos(a), 0.0});
      const double c = lambda * b_star_norm(apply_pv(lambda, multiply(V, u), pv)) / (triple_norm(V) * b_star_norm(u));
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    CHECK(hi / lo <= 3.0);
  }

  TEST_CASE("strong potential at low energy diverges") {
    const double lambda = 2.0;
    const Grid g = grid_at(lambda);
    const ScalarField V = sample_potential(PotentialSpec::gaussian(400.0, 1.0), g);
    const ScalarField u = herglotz_wave(lambda, uniform_density(2, lambda, kPi), g);
    try {
      solve_correction(V, lambda, u);
      FAIL("series converged");
    } catch (const Error& e) {
      CHECK(e.is_numerical());
    }
    ScatterConfig cfg;
    cfg.max_iter = 2;
    const ScalarField weak = sample_potential(PotentialSpec::gaussian(1.0, 0.3), g);
    try {
      solve_correction(weak, lambda, u, cfg);
      FAIL("converged in two steps");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MaxIterations);
    }
  }
}
