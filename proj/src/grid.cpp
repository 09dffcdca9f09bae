#include "potrec/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "potrec/error.hpp"
#include "potrec/parallel.hpp"

namespace potrec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr char kMagic[6] = {'S', 'S', 'F', 'L', 'D', '1'};

// FFTW planning is not thread safe; execution with the new-array interface is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, int N, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(n, N, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::size_t total = 1;
    for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(N);
    auto* scratch = fftw_alloc_complex(total);
    int dims[3] = {N, N, N};
    fftw_plan p = fftw_plan_dft(n, dims, scratch, scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(key, p);
    return p;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, p] : plans_) fftw_destroy_plan(p);
  }
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void raw_fft(std::vector<Complex>& data, const Grid& g, int sign) {
  fftw_plan p = PlanCache::instance().get(g.dim(), g.points(), sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
}

void require_physical(const ScalarField& f, const char* op) {
  if (f.space() != Space::Physical)
    throw Error(ErrorCode::WrongSpace, std::string(op) + " expects a physical-space field");
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
  if (a.space() != b.space()) throw Error(ErrorCode::WrongSpace, "fields live in different spaces");
}

// Index in raw FFT order <-> centred index i (k = i - N/2).
inline int fft_to_centred(int m, int N) { return (m + N / 2) % N; }

double inf_norm_fraction(const Grid& g, std::size_t flat) {
  const Point x = g.point(flat);
  double m = 0.0;
  for (int d = 0; d < g.dim(); ++d) m = std::max(m, std::abs(x[d]));
  return m / g.half_width();
}

// C-infinity transition: 0 at t<=0, 1 at t>=1.
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
  out.insert(out.end(), std::begin(bytes), std::end(bytes));
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw Error(ErrorCode::Io, "truncated SSFLD1 data");
  std::uint8_t bytes[sizeof(T)];
  std::memcpy(bytes, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
  pos += sizeof(T);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

double Grid::freq_step() const noexcept { return kPi / L_; }

double Grid::cell_volume() const noexcept { return std::pow(spacing(), n_); }

double Grid::freq_cell_volume() const noexcept { return std::pow(freq_step(), n_); }

std::array<int, 3> Grid::unflatten(std::size_t flat) const noexcept {
  std::array<int, 3> idx{0, 0, 0};
  for (int d = n_ - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % N_);
    flat /= N_;
  }
  return idx;
}

Point Grid::point(std::size_t flat) const noexcept {
  const auto idx = unflatten(flat);
  Point x{0.0, 0.0, 0.0};
  for (int d = 0; d < n_; ++d) x[d] = coordinate(idx[d]);
  return x;
}

Point Grid::frequency_point(std::size_t flat) const noexcept {
  const auto idx = unflatten(flat);
  Point xi{0.0, 0.0, 0.0};
  for (int d = 0; d < n_; ++d) xi[d] = frequency(idx[d]);
  return xi;
}

Grid make_grid(int n, double L, int N) {
  if (n != 2 && n != 3) throw Error(ErrorCode::InvalidDimension, "n must be 2 or 3, got " + std::to_string(n));
  if (N % 2 != 0) throw Error(ErrorCode::OddN, "N must be even, got " + std::to_string(N));
  if (N < 16) throw Error(ErrorCode::InvalidArgument, "N must be at least 16, got " + std::to_string(N));
  if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorCode::InvalidArgument, "L must be positive");
  Grid g;
  g.n_ = n;
  g.L_ = L;
  g.N_ = N;
  g.size_ = 1;
  for (int d = 0; d < n; ++d) g.size_ *= static_cast<std::size_t>(N);
  return g;
}

int resolving_points(double L, double lambda) {
  int N = 8 * static_cast<int>(std::ceil(lambda * L / kPi - 1e-12));
  N = std::max(N, 16);
  if (N % 2) ++N;
  return N;
}

ScalarField::ScalarField(const Grid& grid, Space space)
    : grid_(grid), space_(space), values_(grid.size(), Complex{0.0, 0.0}) {}

ScalarField::ScalarField(const Grid& grid, std::vector<Complex> values, Space space)
    : grid_(grid), space_(space), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw Error(ErrorCode::InvalidArgument, "value count does not match grid size");
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(Complex s) {
  for (auto& v : values_) v *= s;
  return *this;
}

bool ScalarField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(Complex s, ScalarField a) { return a *= s; }

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  require_physical(a, "multiply");
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

ScalarField conj(ScalarField a) {
  for (auto& v : a.values()) v = std::conj(v);
  return a;
}

ScalarField sample(const Grid& grid, const std::function<Complex(const Point&)>& fn) {
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = fn(grid.point(i));
  return out;
}

ScalarField lattice_mode(const Grid& grid, std::array<int, 3> k) {
  Point xi{0.0, 0.0, 0.0};
  for (int d = 0; d < grid.dim(); ++d) {
    if (k[d] < -grid.points() / 2 || k[d] >= grid.points() / 2)
      throw Error(ErrorCode::InvalidArgument, "mode index outside the frequency lattice");
    xi[d] = grid.freq_step() * k[d];
  }
  return sample(grid, [&](const Point& x) {
    return std::polar(1.0, xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2]);
  });
}

ScalarField to_frequency(const ScalarField& f) {
  require_physical(f, "to_frequency");
  const Grid& g = f.grid();
  const int n = g.dim(), N = g.points();
  std::vector<Complex> data(f.values().begin(), f.values().end());
  raw_fft(data, g, FFTW_FORWARD);
  const double scale = g.cell_volume() * std::pow(2.0 * kPi, -0.5 * n);
  std::vector<Complex> out(g.size());
  for (std::size_t m = 0; m < g.size(); ++m) {
    const auto raw = g.unflatten(m);
    std::size_t c = 0;
    int ksum = 0;
    for (int d = 0; d < n; ++d) {
      const int i = fft_to_centred(raw[d], N);
      ksum += i - N / 2;
      c = c * N + i;
    }
    // e^{-i x_0 xi_k} with x_0 = -L contributes (-1)^k.
    out[c] = (ksum % 2 == 0 ? scale : -scale) * data[m];
  }
  return ScalarField(g, std::move(out), Space::Frequency);
}

ScalarField to_physical(const ScalarField& gf) {
  if (gf.space() != Space::Frequency) throw Error(ErrorCode::WrongSpace, "to_physical expects a frequency-space field");
  const Grid& g = gf.grid();
  const int n = g.dim(), N = g.points();
  std::vector<Complex> data(g.size());
  for (std::size_t m = 0; m < g.size(); ++m) {
    const auto raw = g.unflatten(m);
    std::size_t c = 0;
    int ksum = 0;
    for (int d = 0; d < n; ++d) {
      const int i = fft_to_centred(raw[d], N);
      ksum += i - N / 2;
      c = c * N + i;
    }
    data[m] = (ksum % 2 == 0 ? 1.0 : -1.0) * gf[c];
  }
  raw_fft(data, g, FFTW_BACKWARD);
  const double scale = g.freq_cell_volume() * std::pow(2.0 * kPi, -0.5 * n);
  for (auto& v : data) v *= scale;
  return ScalarField(g, std::move(data), Space::Physical);
}

Multiplier make_multiplier(const Grid& grid, const std::function<Complex(double)>& symbol) {
  const int n = grid.dim(), N = grid.points();
  Multiplier m{grid, std::vector<Complex>(grid.size())};
  const double step = grid.freq_step();
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    const auto raw = grid.unflatten(flat);
    double xi2 = 0.0;
    for (int d = 0; d < n; ++d) {
      const int k = raw[d] < N / 2 ? raw[d] : raw[d] - N;
      xi2 += (step * k) * (step * k);
    }
    m.symbol[flat] = symbol(xi2);
  }
  return m;
}

void apply_multiplier_inplace(ScalarField& f, const Multiplier& m) {
  require_physical(f, "apply_multiplier");
  if (!(f.grid() == m.grid)) throw Error(ErrorCode::GridMismatch, "multiplier built for another grid");
  std::vector<Complex> data(f.values().begin(), f.values().end());
  raw_fft(data, f.grid(), FFTW_FORWARD);
  const double inv = 1.0 / static_cast<double>(f.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= m.symbol[i] * inv;
  raw_fft(data, f.grid(), FFTW_BACKWARD);
  std::copy(data.begin(), data.end(), f.values().begin());
}

ScalarField apply_multiplier(const ScalarField& f, const Multiplier& m) {
  ScalarField out = f;
  apply_multiplier_inplace(out, m);
  return out;
}

Complex integrate(const ScalarField& f) {
  require_physical(f, "integrate");
  Complex s{0.0, 0.0};
  for (const auto& v : f.values()) s += v;
  return s * f.grid().cell_volume();
}

Complex inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f, g);
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * std::conj(g[i]);
  return s * (f.space() == Space::Physical ? f.grid().cell_volume() : f.grid().freq_cell_volume());
}

Complex pair(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f, g);
  require_physical(f, "pair");
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * f.grid().cell_volume();
}

double l2_norm(const ScalarField& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::norm(v);
  const double w = f.space() == Space::Physical ? f.grid().cell_volume() : f.grid().freq_cell_volume();
  return std::sqrt(s * w);
}

ScalarField spectral_laplacian(const ScalarField& f) {
  const Multiplier m = make_multiplier(f.grid(), [](double xi2) { return Complex{-xi2, 0.0}; });
  return apply_multiplier(f, m);
}

ScalarField apply_window(const ScalarField& f, double fraction) {
  require_physical(f, "apply_window");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(ErrorCode::InvalidArgument, "window fraction must lie in (0, 1]");
  ScalarField out = f;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (inf_norm_fraction(f.grid(), i) > fraction) out[i] = 0.0;
  return out;
}

double window_l2_norm(const ScalarField& f, double fraction) {
  require_physical(f, "window_l2_norm");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (inf_norm_fraction(f.grid(), i) <= fraction) s += std::norm(f[i]);
  return std::sqrt(s * f.grid().cell_volume());
}

ScalarField smooth_taper(const Grid& grid, double inner, double outer) {
  if (!(inner > 0.0 && inner < outer && outer <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "taper needs 0 < inner < outer <= 1");
  std::vector<double> axis(grid.points());
  for (int i = 0; i < grid.points(); ++i) {
    const double r = std::abs(grid.coordinate(i)) / grid.half_width();
    axis[i] = 1.0 - smooth_step((r - inner) / (outer - inner));
  }
  ScalarField out(grid);
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    const auto idx = grid.unflatten(flat);
    double v = 1.0;
    for (int d = 0; d < grid.dim(); ++d) v *= axis[idx[d]];
    out[flat] = v;
  }
  return out;
}

ScalarField interior_laplacian(const ScalarField& f, double fraction) {
  require_physical(f, "interior_laplacian");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(ErrorCode::InvalidArgument, "window fraction must lie in (0, 1]");
  if (fraction >= 1.0) return spectral_laplacian(f);
  const Grid& g = f.grid();
  const int n = g.dim(), N = g.points();
  const double h = g.spacing();
  // Window indices i with |x_i| <= fraction L; the stencil must stay inside the box.
  const int lo = static_cast<int>(std::ceil((1.0 - fraction) * N / 2.0 - 1e-9));
  const int hi = static_cast<int>(std::floor((1.0 + fraction) * N / 2.0 + 1e-9));
  const int p = std::clamp(std::min(lo, N - 1 - hi), 1, 8);
  // Central weights of order 2p: c_m = 2 (-1)^{m+1} (p!)^2 / (m^2 (p-m)! (p+m)!).
  std::vector<double> c(p + 1, 0.0);
  double ratio = 1.0;
  for (int m = 1; m <= p; ++m) {
    ratio *= static_cast<double>(p - m + 1) / (p + m);
    c[m] = 2.0 * (m % 2 ? 1.0 : -1.0) * ratio / (static_cast<double>(m) * m);
    c[0] -= 2.0 * c[m];
  }
  std::array<std::size_t, 3> stride{1, 1, 1};
  for (int d = n - 2; d >= 0; --d) stride[d] = stride[d + 1] * N;

  ScalarField out(g);
  parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const auto ii = g.unflatten(idx);
      bool inside = true;
      for (int d = 0; d < n; ++d) inside = inside && ii[d] >= lo && ii[d] <= hi;
      if (!inside) continue;
      Complex s = static_cast<double>(n) * c[0] * f[idx];
      for (int d = 0; d < n; ++d)
        for (int m = 1; m <= p; ++m) {
          const int up = (ii[d] + m) % N, down = (ii[d] - m + N) % N;
          s += c[m] * (f[idx + (up - ii[d]) * static_cast<std::ptrdiff_t>(stride[d])] +
                       f[idx + (down - ii[d]) * static_cast<std::ptrdiff_t>(stride[d])]);
        }
      out[idx] = s / (h * h);
    }
  });
  return out;
}

std::vector<std::uint8_t> encode_field(const ScalarField& f) {
  std::vector<std::uint8_t> out;
  out.reserve(6 + 4 + 4 + 8 + 1 + 16 * f.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().dim()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().points()));
  put_le<double>(out, f.grid().half_width());
  out.push_back(static_cast<std::uint8_t>(f.space()));
  for (const auto& v : f.values()) {
    put_le<double>(out, v.real());
    put_le<double>(out, v.imag());
  }
  return out;
}

ScalarField decode_field(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 6 || std::memcmp(bytes.data(), kMagic, 6) != 0)
    throw Error(ErrorCode::Io, "missing SSFLD1 magic");
  std::size_t pos = 6;
  const auto n = get_le<std::uint32_t>(bytes, pos);
  const auto N = get_le<std::uint32_t>(bytes, pos);
  const auto L = get_le<double>(bytes, pos);
  if (pos >= bytes.size()) throw Error(ErrorCode::Io, "truncated SSFLD1 header");
  const std::uint8_t flag = bytes[pos++];
  if (flag > 1) throw Error(ErrorCode::Io, "bad SSFLD1 space flag");
  const Grid g = make_grid(static_cast<int>(n), L, static_cast<int>(N));
  if (bytes.size() - pos != 16 * g.size()) throw Error(ErrorCode::Io, "SSFLD1 payload length mismatch");
  std::vector<Complex> values(g.size());
  for (auto& v : values) {
    const double re = get_le<double>(bytes, pos);
    const double im = get_le<double>(bytes, pos);
    v = {re, im};
  }
  ScalarField f(g, std::move(values), static_cast<Space>(flag));
  if (!f.all_finite()) throw Error(ErrorCode::Io, "SSFLD1 payload has non-finite values");
  return f;
}

void write_field(const std::string& path, const ScalarField& f) {
  const auto bytes = encode_field(f);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "short write to " + path);
}

ScalarField read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_field(bytes);
}

}  // namespace potrec
