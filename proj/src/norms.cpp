#include "potrec/norms.hpp"

#include <algorithm>
#include <cmath>

#include "potrec/error.hpp"

namespace potrec {

namespace {

void require_physical(const ScalarField& f) {
  if (f.space() != Space::Physical) throw Error(ErrorCode::WrongSpace, "norms are taken in physical space");
}

}  // namespace

int annulus_of(double r) noexcept {
  if (r <= 1.0) return 0;
  // Smallest j with r <= 2^j.
  int j = static_cast<int>(std::ceil(std::log2(r)));
  if (std::ldexp(1.0, j - 1) >= r) --j;
  if (std::ldexp(1.0, j) < r) ++j;
  return j;
}

DyadicDecomposition::DyadicDecomposition(const Grid& grid) : grid_(grid), index_(grid.size()) {
  j_max_ = annulus_of(grid.half_width() * std::sqrt(static_cast<double>(grid.dim())));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.point(i);
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    index_[i] = static_cast<std::uint8_t>(std::min(annulus_of(r), j_max_));
  }
}

std::vector<double> DyadicDecomposition::sup_per_annulus(const ScalarField& f) const {
  require_physical(f);
  std::vector<double> sup(j_max_ + 1, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) sup[index_[i]] = std::max(sup[index_[i]], std::abs(f[i]));
  return sup;
}

std::vector<double> DyadicDecomposition::l2_per_annulus(const ScalarField& f) const {
  require_physical(f);
  std::vector<double> acc(j_max_ + 1, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) acc[index_[i]] += std::norm(f[i]);
  for (auto& a : acc) a = std::sqrt(a * grid_.cell_volume());
  return acc;
}

double triple_norm(const ScalarField& V) {
  const auto sup = DyadicDecomposition(V.grid()).sup_per_annulus(V);
  double s = 0.0;
  for (std::size_t j = 0; j < sup.size(); ++j) s += std::ldexp(sup[j], static_cast<int>(j));
  return s;
}

double b_norm(const ScalarField& f) {
  const auto l2 = DyadicDecomposition(f.grid()).l2_per_annulus(f);
  double s = 0.0;
  for (std::size_t j = 0; j < l2.size(); ++j) s += std::pow(2.0, 0.5 * j) * l2[j];
  return s;
}

double b_star_norm(const ScalarField& f) {
  const auto l2 = DyadicDecomposition(f.grid()).l2_per_annulus(f);
  double s = 0.0;
  for (std::size_t j = 0; j < l2.size(); ++j) s = std::max(s, std::pow(2.0, -0.5 * j) * l2[j]);
  return s;
}

double l1_norm(const ScalarField& f) {
  require_physical(f);
  double s = 0.0;
  for (const auto& v : f.values()) s += std::abs(v);
  return s * f.grid().cell_volume();
}

double linf_norm(const ScalarField& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s = std::max(s, std::abs(v));
  return s;
}

NormReport all_norms(const ScalarField& f) {
  require_physical(f);
  const DyadicDecomposition dyadic(f.grid());
  const auto sup = dyadic.sup_per_annulus(f);
  const auto l2 = dyadic.l2_per_annulus(f);
  NormReport r;
  for (std::size_t j = 0; j < sup.size(); ++j) {
    r.triple += std::ldexp(sup[j], static_cast<int>(j));
    r.b += std::pow(2.0, 0.5 * j) * l2[j];
    r.b_star = std::max(r.b_star, std::pow(2.0, -0.5 * j) * l2[j]);
  }
  r.l1 = l1_norm(f);
  r.l2 = l2_norm(f);
  r.linf = linf_norm(f);
  return r;
}

}  // namespace potrec
