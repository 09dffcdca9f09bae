#include "potrec/herglotz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "potrec/error.hpp"
#include "potrec/parallel.hpp"

namespace potrec {

namespace {

constexpr double kPi = std::numbers::pi;

double norm3(const Point& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

double bump_radial(double r) {
  if (r >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

#if defined(__GNUC__) && defined(__x86_64__) && !defined(__clang__)
#define POTREC_CLONES __attribute__((target_clones("avx2", "default")))
#else
#define POTREC_CLONES
#endif

// p += (ar + i ai) * e over one row; the hot loop of herglotz_wave.
POTREC_CLONES void accumulate_row(double* __restrict pr, double* __restrict pi, const double* __restrict er,
                                  const double* __restrict ei, double ar, double ai, int N) {
  for (int k = 0; k < N; ++k) {
    pr[k] += ar * er[k] - ai * ei[k];
    pi[k] += ar * ei[k] + ai * er[k];
  }
}

}  // namespace

Rotation Rotation::identity(int n) {
  Rotation q;
  q.n = n;
  for (int i = 0; i < n; ++i) q.m[i][i] = 1.0;
  return q;
}

Point Rotation::apply(const Point& v) const noexcept {
  Point out{0.0, 0.0, 0.0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i] += m[i][j] * v[j];
  return out;
}

Point Rotation::apply_transpose(const Point& v) const noexcept {
  Point out{0.0, 0.0, 0.0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i] += m[j][i] * v[j];
  return out;
}

double Rotation::orthogonality_defect() const noexcept {
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += m[k][i] * m[k][j];
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

void gauss_legendre(int M, double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(M, 0.0);
  weights.assign(M, 0.0);
  for (int i = 0; i < (M + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (M + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= M; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = M * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= M; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = M * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    nodes[i] = mid - half * x;
    nodes[M - 1 - i] = mid + half * x;
    weights[i] = weights[M - 1 - i] = half * w;
  }
}

double sphere_area(int n) { return n == 2 ? 2.0 * kPi : 4.0 * kPi; }

SphereQuadrature make_quadrature(int n, int M) {
  if (n != 2 && n != 3) throw Error(ErrorCode::InvalidDimension, "sphere quadrature needs n in {2,3}");
  if (M < 16) throw Error(ErrorCode::InvalidArgument, "quadrature resolution must be at least 16");
  SphereQuadrature q;
  q.n = n;
  if (n == 2) {
    q.nodes.reserve(M);
    for (int m = 0; m < M; ++m) {
      const double a = 2.0 * kPi * m / M;
      q.nodes.push_back({std::cos(a), std::sin(a), 0.0});
    }
    q.weights.assign(M, 2.0 * kPi / M);
    q.spacing = 2.0 * kPi / M;
    return q;
  }
  std::vector<double> t, wt;
  gauss_legendre(M, -1.0, 1.0, t, wt);
  for (int i = 0; i < M; ++i) {
    const double s = std::sqrt(std::max(0.0, 1.0 - t[i] * t[i]));
    for (int j = 0; j < M; ++j) {
      const double a = 2.0 * kPi * j / M;
      q.nodes.push_back({s * std::cos(a), s * std::sin(a), t[i]});
      q.weights.push_back(wt[i] * 2.0 * kPi / M);
    }
  }
  double gap = 0.0;
  for (int i = 0; i + 1 < M; ++i) gap = std::max(gap, std::acos(t[i]) - std::acos(t[i + 1]));
  q.spacing = std::max(gap, 2.0 * kPi / M);
  return q;
}

SphereQuadrature make_cap_quadrature(const Rotation& Q, double radius, int M) {
  if (!(radius > 0.0 && radius <= kPi / 2)) throw Error(ErrorCode::InvalidArgument, "cap radius must lie in (0, pi/2]");
  if (M < 4) throw Error(ErrorCode::InvalidArgument, "cap rule needs at least 4 nodes per axis");
  const int n = Q.n;
  SphereQuadrature q;
  q.n = n;
  q.is_cap = true;
  q.cap_radius = radius;
  Point en{0.0, 0.0, 0.0};
  en[n - 1] = 1.0;
  q.center = Q.apply(en);
  if (n == 2) {
    const double step = 2.0 * radius / (M - 1);
    for (int m = 0; m < M; ++m) {
      const double phi = -radius + m * step;
      q.nodes.push_back(Q.apply({std::sin(phi), std::cos(phi), 0.0}));
      q.weights.push_back((m == 0 || m == M - 1) ? 0.5 * step : step);
    }
    q.spacing = step;
    return q;
  }
  std::vector<double> phi, wphi;
  gauss_legendre(M, 0.0, radius, phi, wphi);
  for (int i = 0; i < M; ++i) {
    const double s = std::sin(phi[i]), c = std::cos(phi[i]);
    for (int j = 0; j < M; ++j) {
      const double a = 2.0 * kPi * j / M;
      q.nodes.push_back(Q.apply({s * std::cos(a), s * std::sin(a), c}));
      q.weights.push_back(wphi[i] * s * 2.0 * kPi / M);
    }
  }
  double gap = phi[0];
  for (int i = 0; i + 1 < M; ++i) gap = std::max(gap, phi[i + 1] - phi[i]);
  q.spacing = std::max(gap, 2.0 * kPi * std::sin(radius) / M);
  return q;
}

double bump_chi(const Point& xi) noexcept { return bump_radial(4.0 * norm3(xi)); }

Rotation rotation_to(int n, const Point& omega) {
  if (n != 2 && n != 3) throw Error(ErrorCode::InvalidDimension, "rotation_to needs n in {2,3}");
  double len2 = 0.0;
  for (int d = 0; d < n; ++d) len2 += omega[d] * omega[d];
  if (std::abs(std::sqrt(len2) - 1.0) > 1e-10) throw Error(ErrorCode::NonUnitVector, "direction must be a unit vector");
  Rotation q = Rotation::identity(n);
  Point v{0.0, 0.0, 0.0};
  for (int d = 0; d < n; ++d) v[d] = -omega[d];
  v[n - 1] += 1.0;
  double vv = 0.0;
  for (int d = 0; d < n; ++d) vv += v[d] * v[d];
  // omega == e_n: nothing to reflect.
  if (vv < 1e-30) return q;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) q.m[i][j] -= 2.0 * v[i] * v[j] / vv;
  // Pin the last column exactly to omega.
  for (int i = 0; i < n; ++i) q.m[i][n - 1] = omega[i];
  return q;
}

double cap_support_radius(double eps) {
  // Support of chi_eps on the sphere: sin^2(phi)/eps^2 + (1 - cos(phi))^2/eps^4 < 1/16.
  auto g = [eps](double phi) {
    const double s = std::sin(phi) / eps;
    const double c = (1.0 - std::cos(phi)) / (eps * eps);
    return s * s + c * c - 1.0 / 16.0;
  };
  double lo = 0.0, hi = std::min(kPi / 2, std::asin(std::min(1.0, eps / 4.0)) * 1.0000001);
  if (g(hi) < 0.0) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

SphericalDensity make_density(double eps, const Rotation& Q, const SphereQuadrature& quad) {
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 1]");
  if (Q.n != quad.n) throw Error(ErrorCode::InvalidDimension, "rotation and quadrature dimensions differ");
  if (Q.orthogonality_defect() > 1e-12) throw Error(ErrorCode::InvalidArgument, "Q is not orthogonal");
  if (quad.spacing > eps / kCapSpacingDivisor)
    throw Error(ErrorCode::UnderresolvedCap, "node spacing " + std::to_string(quad.spacing) + " exceeds eps/" +
                                                 std::to_string(static_cast<int>(kCapSpacingDivisor)));
  const int n = quad.n;
  const double support = cap_support_radius(eps);
  if (quad.is_cap) {
    Point en{0.0, 0.0, 0.0};
    en[n - 1] = 1.0;
    const Point c = Q.apply(en);
    // Geodesic distance from the chord; acos loses half the digits near 1.
    double chord2 = 0.0;
    for (int d = 0; d < n; ++d) chord2 += (c[d] - quad.center[d]) * (c[d] - quad.center[d]);
    const double offset = 2.0 * std::asin(std::min(1.0, 0.5 * std::sqrt(chord2)));
    if (offset + support > quad.cap_radius * (1.0 + 1e-9))
      throw Error(ErrorCode::UnderresolvedCap, "cap rule does not cover the density support");
  }
  SphericalDensity d;
  d.quadrature = quad;
  d.eps = eps;
  d.rotation = Q;
  d.values.resize(quad.nodes.size());
  const double scale = std::pow(eps, -(n - 1));
  for (std::size_t m = 0; m < quad.nodes.size(); ++m) {
    const Point t = Q.apply_transpose(quad.nodes[m]);
    Point arg{0.0, 0.0, 0.0};
    for (int k = 0; k + 1 < n; ++k) arg[k] = t[k] / eps;
    arg[n - 1] = (t[n - 1] - 1.0) / (eps * eps);
    d.values[m] = scale * bump_chi(arg);
  }
  return d;
}

SphericalDensity make_cap_density(double eps, const Rotation& Q, int M) {
  const double radius = cap_support_radius(eps);
  return make_density(eps, Q, make_cap_quadrature(Q, radius, M > 0 ? M : default_cap_nodes(Q.n)));
}

SphericalDensity density_from(const SphereQuadrature& quad, const std::function<double(const Point&)>& fn) {
  SphericalDensity d;
  d.quadrature = quad;
  d.rotation = Rotation::identity(quad.n);
  d.values.reserve(quad.nodes.size());
  for (const auto& node : quad.nodes) d.values.push_back(fn(node));
  return d;
}

SphericalDensity uniform_density(int n, double lambda, double L) {
  if (!(lambda > 0.0) || !(L > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda and L must be positive");
  const int M = std::max(16, static_cast<int>(std::ceil(lambda * L * std::sqrt(static_cast<double>(n)))) + 24);
  return density_from(make_quadrature(n, M), [](const Point&) { return 1.0; });
}

DensityNorms density_norms(const SphericalDensity& d) {
  DensityNorms r;
  const auto& w = d.quadrature.weights;
  for (std::size_t m = 0; m < w.size(); ++m) {
    r.l1 += w[m] * std::abs(d.values[m]);
    r.l2 += w[m] * d.values[m] * d.values[m];
  }
  r.l2 = std::sqrt(r.l2);
  return r;
}

double density_l1_limit(int n) {
  if (n != 2 && n != 3) throw Error(ErrorCode::InvalidDimension, "density_l1_limit needs n in {2,3}");
  // chi(eta, -|eta|^2/2) vanishes once 16 (rho^2 + rho^4/4) >= 1.
  const double edge = std::sqrt(2.0 * (std::sqrt(1.0 + 1.0 / 16.0) - 1.0));
  auto g = [](double rho) { return bump_radial(4.0 * std::sqrt(rho * rho + 0.25 * rho * rho * rho * rho)); };
  std::vector<double> x, w;
  // Composite rule: the bump is flat near its edge, so a few panels suffice.
  const int panels = 16;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    gauss_legendre(24, edge * p / panels, edge * (p + 1) / panels, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) total += w[i] * g(x[i]) * (n == 2 ? 2.0 : 2.0 * kPi * x[i]);
  }
  return total;
}

ScalarField herglotz_wave(double lambda, const SphericalDensity& d, const Grid& grid) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  if (d.quadrature.n != grid.dim()) throw Error(ErrorCode::InvalidDimension, "density and grid dimensions differ");
  const int required = 8 * static_cast<int>(std::ceil(lambda * grid.half_width() / kPi - 1e-12));
  if (grid.points() < required)
    throw Error(ErrorCode::UnderresolvedGrid,
                "N=" + std::to_string(grid.points()) + " below 8 ceil(lambda L/pi)=" + std::to_string(required));
  const int n = grid.dim(), N = grid.points();

  struct Term {
    double weight;
    Point dir;
  };
  std::vector<Term> terms;
  for (std::size_t m = 0; m < d.values.size(); ++m) {
    const double c = d.quadrature.weights[m] * d.values[m];
    if (c != 0.0) terms.push_back({c, d.quadrature.nodes[m]});
  }

  // Separable phases: e^{-i lambda x.theta} = prod_d e^{-i lambda x_d theta_d}.
  // Terms are processed in blocks whose per-axis phase tables fit in cache;
  // each output row is accumulated against the whole block at once.
  constexpr std::size_t kBlock = 64;
  const std::size_t rows = grid.size() / N;
  std::vector<double> re(grid.size(), 0.0), im(grid.size(), 0.0);
  parallel_for(rows, [&](std::size_t row_begin, std::size_t row_end) {
    // tab[(ax * kBlock + t) * N + i] = weight^[ax==0] e^{-i lambda x_i theta_ax}.
    std::vector<double> tr(3 * kBlock * N), ti(3 * kBlock * N);
    for (std::size_t b0 = 0; b0 < terms.size(); b0 += kBlock) {
      const std::size_t nb = std::min(kBlock, terms.size() - b0);
      for (int ax = 0; ax < n; ++ax)
        for (std::size_t t = 0; t < nb; ++t) {
          const Term& term = terms[b0 + t];
          const double scale = ax == 0 ? term.weight : 1.0;
          for (int i = 0; i < N; ++i) {
            const double ph = -lambda * grid.coordinate(i) * term.dir[ax];
            tr[(ax * kBlock + t) * N + i] = scale * std::cos(ph);
            ti[(ax * kBlock + t) * N + i] = scale * std::sin(ph);
          }
        }
      const int last = n - 1;
      for (std::size_t row = row_begin; row < row_end; ++row) {
        // row enumerates the leading n-1 axes, axis 0 slowest.
        int idx[2] = {0, 0};
        std::size_t rest = row;
        for (int ax = n - 2; ax >= 0; --ax) {
          idx[ax] = static_cast<int>(rest % N);
          rest /= N;
        }
        double* pr = re.data() + row * N;
        double* pi = im.data() + row * N;
        for (std::size_t t = 0; t < nb; ++t) {
          double ar = tr[t * N + idx[0]], ai = ti[t * N + idx[0]];
          if (n == 3) {
            const double br = tr[(kBlock + t) * N + idx[1]], bi = ti[(kBlock + t) * N + idx[1]];
            const double cr = ar * br - ai * bi;
            ai = ar * bi + ai * br;
            ar = cr;
          }
          accumulate_row(pr, pi, tr.data() + (last * kBlock + t) * N, ti.data() + (last * kBlock + t) * N, ar, ai, N);
        }
      }
    }
  });
  std::vector<Complex> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = {re[i], im[i]};
  return ScalarField(grid, std::move(values));
}

Complex herglotz_at(double lambda, const SphericalDensity& d, const Point& x) {
  Complex s{0.0, 0.0};
  for (std::size_t m = 0; m < d.values.size(); ++m) {
    const Point& t = d.quadrature.nodes[m];
    s += d.quadrature.weights[m] * d.values[m] * std::polar(1.0, -lambda * (x[0] * t[0] + x[1] * t[1] + x[2] * t[2]));
  }
  return s;
}

double helmholtz_residual(double lambda, const ScalarField& u, double fraction) {
  ScalarField r = interior_laplacian(u, fraction);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += lambda * lambda * u[i];
  const double denom = lambda * lambda * window_l2_norm(u, fraction);
  return denom > 0.0 ? window_l2_norm(r, fraction) / denom : 0.0;
}

}  // namespace potrec
