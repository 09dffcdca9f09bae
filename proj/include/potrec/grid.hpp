#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace potrec {

using Complex = std::complex<double>;
using Point = std::array<double, 3>;

enum class Space : std::uint8_t { Physical = 0, Frequency = 1 };

/// Periodic box [-L, L)^n with N points per axis.
///
/// Physical samples sit at x_i = -L + i h, h = 2L/N. Frequency samples sit at
/// xi_k = (pi/L) k with k = i - N/2 in [-N/2, N/2), i.e. frequency data is
/// stored centred, not in FFT order. Both lattices are flattened row-major
/// (last axis fastest).
class Grid {
 public:
  Grid() = default;

  int dim() const noexcept { return n_; }
  double half_width() const noexcept { return L_; }
  int points() const noexcept { return N_; }
  double spacing() const noexcept { return 2.0 * L_ / N_; }
  double freq_step() const noexcept;
  std::size_t size() const noexcept { return size_; }
  double cell_volume() const noexcept;
  /// Frequency-space measure (pi/L)^n.
  double freq_cell_volume() const noexcept;

  double coordinate(int i) const noexcept { return -L_ + i * spacing(); }
  double frequency(int i) const noexcept { return freq_step() * (i - N_ / 2); }

  /// Axis indices of a flat index; unused trailing entries are zero.
  std::array<int, 3> unflatten(std::size_t flat) const noexcept;
  Point point(std::size_t flat) const noexcept;
  Point frequency_point(std::size_t flat) const noexcept;

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.n_ == b.n_ && a.N_ == b.N_ && a.L_ == b.L_;
  }

 private:
  friend Grid make_grid(int n, double L, int N);
  int n_ = 0;
  double L_ = 0.0;
  int N_ = 0;
  std::size_t size_ = 0;
};

/// Throws OddN, InvalidDimension or InvalidArgument on bad input.
Grid make_grid(int n, double L, int N);

/// Smallest admissible N (even, >= 16) with N >= 8 ceil(lambda L / pi).
int resolving_points(double L, double lambda);

/// Complex samples of a function on a Grid, tagged with the space they live in.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, Space space = Space::Physical);
  ScalarField(const Grid& grid, std::vector<Complex> values, Space space = Space::Physical);

  const Grid& grid() const noexcept { return grid_; }
  Space space() const noexcept { return space_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const Complex> values() const noexcept { return values_; }
  std::span<Complex> values() noexcept { return values_; }
  const Complex& operator[](std::size_t i) const noexcept { return values_[i]; }
  Complex& operator[](std::size_t i) noexcept { return values_[i]; }

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(Complex s);

  bool all_finite() const noexcept;

 private:
  Grid grid_;
  Space space_ = Space::Physical;
  std::vector<Complex> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(Complex s, ScalarField a);
/// Pointwise product; both operands must be in physical space on one grid.
ScalarField multiply(const ScalarField& a, const ScalarField& b);
ScalarField conj(ScalarField a);

/// Samples fn at every physical lattice point.
ScalarField sample(const Grid& grid, const std::function<Complex(const Point&)>& fn);
/// The lattice mode e^{i xi . x} for integer frequency indices k (k_d in [-N/2, N/2)).
ScalarField lattice_mode(const Grid& grid, std::array<int, 3> k);

// Continuum-normalised transform: F(xi) = h^n (2pi)^{-n/2} sum_x e^{-i x.xi} f(x).
ScalarField to_frequency(const ScalarField& f);
ScalarField to_physical(const ScalarField& g);

/// Fourier multiplier stored in raw FFT order; see make_multiplier.
struct Multiplier {
  Grid grid;
  std::vector<Complex> symbol;
};

/// Tabulates symbol(|xi|^2) over the frequency lattice.
Multiplier make_multiplier(const Grid& grid, const std::function<Complex(double)>& symbol);
/// f -> F^{-1}[m F f] for a physical-space field f.
ScalarField apply_multiplier(const ScalarField& f, const Multiplier& m);
void apply_multiplier_inplace(ScalarField& f, const Multiplier& m);

/// h^n sum f.
Complex integrate(const ScalarField& f);
/// h^n sum f conj(g).
Complex inner(const ScalarField& f, const ScalarField& g);
/// Bilinear h^n sum f g (no conjugation).
Complex pair(const ScalarField& f, const ScalarField& g);
double l2_norm(const ScalarField& f);

ScalarField spectral_laplacian(const ScalarField& f);

/// Zeroes samples with ||x||_inf > fraction L.
ScalarField apply_window(const ScalarField& f, double fraction);
/// Discrete L2 norm restricted to ||x||_inf <= fraction L.
double window_l2_norm(const ScalarField& f, double fraction);

/// Smooth cutoff: 1 for ||x||_inf <= inner L, 0 for ||x||_inf >= outer L.
ScalarField smooth_taper(const Grid& grid, double inner, double outer);

/// Laplacian on the window ||x||_inf <= fraction L of a field that need not be
/// periodic. Central differences of order up to 16 (half-width limited by the
/// points between window and box edge), so nothing outside the box leaks in.
/// Zero outside the window. fraction = 1 falls back to the spectral Laplacian.
ScalarField interior_laplacian(const ScalarField& f, double fraction);

// SSFLD1 file format.
void write_field(const std::string& path, const ScalarField& f);
ScalarField read_field(const std::string& path);
std::vector<std::uint8_t> encode_field(const ScalarField& f);
ScalarField decode_field(std::span<const std::uint8_t> bytes);

}  // namespace potrec
