#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "potrec/config.hpp"
#include "potrec/potentials.hpp"
#include "potrec/propagate.hpp"
#include "potrec/recover.hpp"
#include "potrec/resolvent.hpp"
#include "potrec/scatter.hpp"

namespace potrec {

struct GridBlock {
  int n = 2;
  double L = 3.14159265358979323846;
  /// 0 picks resolving_points(L, lambda) per energy (at least 64).
  int N = 0;
};

struct DensityBlock {
  /// Cap width; 0 follows the recovery rule eps = lambda^{-(1+1/n)}.
  double eps = 0.0;
  Point direction{0.0, 1.0, 0.0};
  /// Nodes per cap axis (0 = library default).
  int nodes = 0;
  /// Uniform density f = 1 on a global rule instead of a cap.
  bool uniform = false;
};

struct ExperimentConfig {
  std::string source;
  std::string hash;
  GridBlock grid;
  PotentialSpec v1;
  PotentialSpec v2;
  std::vector<double> lambdas{8.0, 16.0, 32.0, 64.0};
  DensityBlock density;
  ScatterConfig scatter;
  double c_n = 1.0;

  PairingMode mode = PairingMode::Full;
  EpsRule eps_rule = EpsRule::standard(2);
  KappaLattice lattice{17, 2.0};
  /// Modes written to the recover CSV; empty means the whole lattice.
  std::vector<Point> kappas;
  bool reconstruct = true;
  /// Grid of the reconstruction (its own box, independent of [grid]).
  GridBlock reconstruction_grid{2, 1.5707963267948966, 256};
  /// The lattice inversion runs hundreds of modes; the leading pairing keeps it cheap.
  PairingMode reconstruction_mode = PairingMode::Leading;

  /// "shell" modulates the bump onto |xi| = lambda; "fixed" uses it as is.
  std::string probe = "shell";
  double probe_width = 0.5;

  PropagatorConfig propagation{0.5, 1e-3};
  /// "gaussian" (the packet below) or an SSFLD1 path.
  std::string initial = "gaussian";
  double initial_width = 1.0;
  Point initial_center{0.0, 0.0, 0.0};
  Point initial_momentum{0.0, 0.0, 0.0};

  std::string output_dir = "out";
  /// stationary-state: also dump u, v, w as SSFLD1.
  bool write_fields = false;
  std::uint64_t seed = 20240611;
};

/// Reads and validates every section. Unknown sections or keys are errors so
/// typos never fall back silently to defaults.
ExperimentConfig load_experiment(const Config& cfg);
ExperimentConfig load_experiment_file(const std::string& path);

/// Grid of the experiment at one energy.
Grid grid_for(const ExperimentConfig& e, double lambda);

/// Density of the herglotz and stationary-state commands at one energy.
SphericalDensity density_for(const ExperimentConfig& e, double lambda);

}  // namespace potrec
