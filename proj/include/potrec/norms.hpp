#pragma once

#include <cstdint>
#include <vector>

#include "potrec/grid.hpp"

namespace potrec {

/// Partition of the lattice into the dyadic annuli
/// D_0 = {|x| <= 1}, D_j = {2^{j-1} < |x| <= 2^j}, truncated at j_max.
class DyadicDecomposition {
 public:
  explicit DyadicDecomposition(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  int j_max() const noexcept { return j_max_; }
  /// Annulus index of each lattice point.
  const std::vector<std::uint8_t>& index() const noexcept { return index_; }

  /// max_{x in D_j} |f(x)| for j = 0..j_max.
  std::vector<double> sup_per_annulus(const ScalarField& f) const;
  /// ||f||_{L2(D_j)} for j = 0..j_max.
  std::vector<double> l2_per_annulus(const ScalarField& f) const;

 private:
  Grid grid_;
  int j_max_ = 0;
  std::vector<std::uint8_t> index_;
};

/// Annulus index of a point at distance r from the origin.
int annulus_of(double r) noexcept;

/// sum_j 2^j max_{D_j} |V|. The essential sup is replaced by the lattice max.
double triple_norm(const ScalarField& V);
/// sum_j 2^{j/2} ||f||_{L2(D_j)}.
double b_norm(const ScalarField& f);
/// max_j 2^{-j/2} ||f||_{L2(D_j)}.
double b_star_norm(const ScalarField& f);

double l1_norm(const ScalarField& f);
double linf_norm(const ScalarField& f);

struct NormReport {
  double triple = 0.0;
  double b = 0.0;
  double b_star = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

NormReport all_norms(const ScalarField& f);

}  // namespace potrec
