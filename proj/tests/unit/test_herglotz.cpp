#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "potrec/error.hpp"
#include "potrec/herglotz.hpp"
#include "potrec/norms.hpp"
#include "potrec/resolvent.hpp"

using namespace potrec;

namespace {
constexpr double kPi = std::numbers::pi;

// The default bump written out independently of the library.
double chi(double r2) { return 16.0 * r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - 16.0 * r2)) : 0.0; }

// int_{R^{n-1}} chi(eta, -|eta|^2/2) d eta by Simpson on the radial profile.
double l1_limit_oracle(int n) {
  auto g = [](double r) { return chi(r * r + 0.25 * r * r * r * r); };
  if (n == 2) return testing::simpson(g, -0.3, 0.3, 4000);
  return 2.0 * kPi * testing::simpson([&](double r) { return r * g(r); }, 0.0, 0.3, 4000);
}

Point random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> G;
  Point w{0.0, 0.0, 0.0};
  double len = 0.0;
  for (int d = 0; d < n; ++d) len += (w[d] = G(rng)) * w[d];
  for (int d = 0; d < n; ++d) w[d] /= std::sqrt(len);
  return w;
}

double angle_between(const Point& a, const Point& b) {
  const double c = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return std::acos(std::clamp(c, -1.0, 1.0));
}
}  // namespace

TEST_SUITE("herglotz") {
  TEST_CASE("global sphere rules") {
    const SphereQuadrature q2 = make_quadrature(2, 64);
    double s = 0.0, c2 = 0.0;
    for (std::size_t m = 0; m < q2.nodes.size(); ++m) {
      s += q2.weights[m];
      c2 += q2.weights[m] * q2.nodes[m][0] * q2.nodes[m][0];
    }
    CHECK(s == doctest::Approx(2.0 * kPi).epsilon(1e-15));
    CHECK(std::abs(c2 - kPi) <= 1e-12);

    const SphereQuadrature q3 = make_quadrature(3, 32);
    double s3 = 0.0, z2 = 0.0;
    for (std::size_t m = 0; m < q3.nodes.size(); ++m) {
      const Point& t = q3.nodes[m];
      CHECK(std::abs(std::sqrt(t[0] * t[0] + t[1] * t[1] + t[2] * t[2]) - 1.0) <= 1e-14);
      CHECK(q3.weights[m] > 0.0);
      s3 += q3.weights[m];
      z2 += q3.weights[m] * t[2] * t[2];
    }
    CHECK(std::abs(s3 - 4.0 * kPi) <= 1e-12);
    CHECK(std::abs(z2 - 4.0 * kPi / 3.0) <= 1e-12);
    CHECK(sphere_area(3) == doctest::Approx(4.0 * kPi));
    CHECK_THROWS_AS(make_quadrature(2, 8), Error);
  }

  TEST_CASE("Gauss-Legendre is exact for polynomials of degree 2M-1") {
    std::vector<double> x, w;
    gauss_legendre(6, -1.0, 2.0, x, w);
    for (int k = 0; k <= 11; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], k);
      const double exact = (std::pow(2.0, k + 1) - std::pow(-1.0, k + 1)) / (k + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }

  TEST_CASE("bump chi") {
    CHECK(bump_chi({0.0, 0.0, 0.0}) == 1.0);
    CHECK(bump_chi({0.3, 0.0, 0.0}) == 0.0);
    CHECK(bump_chi({0.0, 0.25, 0.0}) == 0.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-0.3, 0.3);
    for (int i = 0; i < 100; ++i) {
      const Point xi{U(rng), U(rng), U(rng)};
      const double v = bump_chi(xi);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(v == bump_chi({-xi[0], -xi[1], -xi[2]}));
      CHECK(v == doctest::Approx(chi(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2])).epsilon(1e-14));
    }
  }

  TEST_CASE("rotation_to") {
    std::mt19937_64 rng(8);
    for (int n : {2, 3}) {
      Point en{0.0, 0.0, 0.0};
      en[n - 1] = 1.0;
      const Rotation I = rotation_to(n, en);
      CHECK(angle_between(I.apply(en), en) <= 1e-12);
      Point minus = en;
      minus[n - 1] = -1.0;
      const Rotation R = rotation_to(n, minus);
      const Point r = R.apply(en);
      CHECK(std::abs(r[n - 1] + 1.0) <= 1e-12);
      CHECK(R.orthogonality_defect() <= 1e-12);
      for (int k = 0; k < 50; ++k) {
        const Point w = random_unit(n, rng);
        const Rotation Q = rotation_to(n, w);
        const Point got = Q.apply(en);
        for (int d = 0; d < n; ++d) CHECK(std::abs(got[d] - w[d]) <= 1e-12);
        CHECK(Q.orthogonality_defect() <= 1e-12);
        // Deterministic.
        const Rotation Q2 = rotation_to(n, w);
        CHECK(Q2.m == Q.m);
      }
    }
    CHECK_THROWS_AS(rotation_to(2, {1.0, 1.0, 0.0}), Error);
  }

  TEST_CASE("density values, support and resolution") {
    const double eps = 0.2;
    // Node 128 of 512 equispaced angles is e_2, the cap centre.
    const SphereQuadrature q = make_quadrature(2, 512);
    const SphericalDensity d = make_density(eps, Rotation::identity(2), q);
    CHECK(d.values[128] == doctest::Approx(1.0 / eps).epsilon(1e-14));
    const Point centre{0.0, 1.0, 0.0};
    for (std::size_t m = 0; m < q.nodes.size(); ++m) {
      CHECK(d.values[m] >= 0.0);
      if (angle_between(q.nodes[m], centre) > 2.0 * eps) CHECK(d.values[m] == 0.0);
    }
    try {
      make_density(0.05, Rotation::identity(2), make_quadrature(2, 64));
      FAIL("coarse rule accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnderresolvedCap);
    }
  }

  TEST_CASE("cap rule agrees with a fine global rule") {
    const double eps = 0.25;
    const Rotation Q = rotation_to(2, {0.6, 0.8, 0.0});
    const DensityNorms global = density_norms(make_density(eps, Q, make_quadrature(2, 16384)));
    // The default resolution sits far below the 1% design margin; refinement converges.
    const DensityNorms cap = density_norms(make_cap_density(eps, Q));
    CHECK(cap.l1 == doctest::Approx(global.l1).epsilon(1e-5));
    CHECK(cap.l2 == doctest::Approx(global.l2).epsilon(1e-5));
    const DensityNorms fine = density_norms(make_cap_density(eps, Q, 192));
    CHECK(fine.l1 == doctest::Approx(global.l1).epsilon(1e-9));
    CHECK(fine.l2 == doctest::Approx(global.l2).epsilon(1e-9));
  }

  TEST_CASE("L1 limit matches an independent Simpson oracle") {
    for (int n : {2, 3}) {
      const double oracle = l1_limit_oracle(n);
      CHECK(density_l1_limit(n) == doctest::Approx(oracle).epsilon(1e-9));
      const double l1 = density_norms(make_cap_density(0.05, Rotation::identity(n))).l1;
      CHECK(std::abs(l1 - oracle) <= 0.02 * oracle);
    }
  }

  TEST_CASE("density norms are rotation invariant and scale like eps^{-(n-1)/2}") {
    std::mt19937_64 rng(12);
    for (int n : {2, 3}) {
      const DensityNorms ref = density_norms(make_cap_density(0.1, Rotation::identity(n)));
      for (int k = 0; k < 4; ++k) {
        const DensityNorms got = density_norms(make_cap_density(0.1, rotation_to(n, random_unit(n, rng))));
        CHECK(std::abs(got.l1 - ref.l1) <= 1e-10 * ref.l1);
        CHECK(std::abs(got.l2 - ref.l2) <= 1e-10 * ref.l2);
      }
      const double s = 0.5 * (n - 1);
      const double a = ref.l2 * std::pow(0.1, s);
      const double b = density_norms(make_cap_density(0.05, Rotation::identity(n))).l2 * std::pow(0.05, s);
      CHECK(std::abs(a - b) < 0.1 * std::max(a, b));
    }
  }

  TEST_CASE("E_lambda 1 = 2 pi J0(lambda |x|) in the plane") {
    const double lambda = 8.0, L = 2.0;
    const SphericalDensity d = uniform_density(2, lambda, L);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-L, L);
    for (int k = 0; k < 40; ++k) {
      const Point x{U(rng), U(rng), 0.0};
      const double r = std::hypot(x[0], x[1]);
      const Complex got = herglotz_at(lambda, d, x);
      CHECK(std::abs(got - 2.0 * kPi * std::cyl_bessel_j(0.0, lambda * r)) <= 1e-10);
    }
  }

  TEST_CASE("synthesis on the grid") {
    const double lambda = 16.0;
    const Grid g = make_grid(2, kPi, resolving_points(kPi, lambda));
    const SphericalDensity d = make_cap_density(std::pow(lambda, -1.5), rotation_to(2, {0.6, 0.8, 0.0}));
    const ScalarField u = herglotz_wave(lambda, d, g);
    // x = 0 gives sum_m w_m f(theta_m).
    double mass = 0.0;
    for (std::size_t m = 0; m < d.values.size(); ++m) mass += d.quadrature.weights[m] * d.values[m];
    const std::size_t origin = (g.points() / 2) * g.points() + g.points() / 2;
    CHECK(std::abs(u[origin] - mass) <= 1e-12 * mass);
    for (std::size_t i : {std::size_t{0}, std::size_t{777}, g.size() - 1})
      CHECK(std::abs(u[i] - herglotz_at(lambda, d, g.point(i))) <= 1e-11 * mass);
    CHECK(helmholtz_residual(lambda, u) <= 1e-3);
    CHECK_THROWS_AS(herglotz_wave(lambda, d, make_grid(2, kPi, 64)), Error);
  }

  TEST_CASE("linearity and conjugation symmetry") {
    const double lambda = 6.0;
    const SphereQuadrature q = make_quadrature(2, 128);
    const SphericalDensity a = density_from(q, [](const Point& t) { return std::exp(t[0]); });
    const SphericalDensity b = density_from(q, [](const Point& t) { return t[1] * t[1]; });
    const SphericalDensity c = density_from(q, [](const Point& t) { return 2.0 * std::exp(t[0]) - 3.0 * t[1] * t[1]; });
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int k = 0; k < 20; ++k) {
      const Point x{U(rng), U(rng), 0.0};
      const Complex lhs = herglotz_at(lambda, c, x);
      const Complex rhs = 2.0 * herglotz_at(lambda, a, x) - 3.0 * herglotz_at(lambda, b, x);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
      const Complex minus = herglotz_at(lambda, a, {-x[0], -x[1], 0.0});
      CHECK(std::abs(minus - std::conj(herglotz_at(lambda, a, x))) <= 1e-12 * (1.0 + std::abs(minus)));
    }
  }

  TEST_CASE("rotation covariance") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int n : {2, 3}) {
      const double lambda = 10.0, eps = 0.2;
      const SphericalDensity base = make_cap_density(eps, Rotation::identity(n));
      const Rotation Q = rotation_to(n, random_unit(n, rng));
      const SphericalDensity turned = make_cap_density(eps, Q);
      for (int k = 0; k < 10; ++k) {
        Point x{0.0, 0.0, 0.0};
        for (int d = 0; d < n; ++d) x[d] = U(rng);
        const Complex a = herglotz_at(lambda, turned, Q.apply(x));
        const Complex b = herglotz_at(lambda, base, x);
        CHECK(std::abs(a - b) <= 1e-11 * (1.0 + std::abs(b)));
      }
    }
  }

  TEST_CASE("three-dimensional residual on a minimal grid") {
    const double lambda = 8.0, L = kPi / 4;
    const Grid g = make_grid(3, L, std::max(32, resolving_points(L, lambda)));
    const ScalarField u = herglotz_wave(lambda, make_cap_density(0.2, rotation_to(3, {0.0, 0.6, 0.8})), g);
    CHECK(helmholtz_residual(lambda, u) <= 1e-3);
  }
}
