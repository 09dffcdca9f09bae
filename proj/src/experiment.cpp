#include "potrec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "potrec/error.hpp"
#include "potrec/herglotz.hpp"

namespace potrec {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"grid", {"n", "L", "N"}},
      {"potential.v1", {"preset", "amplitude", "width", "rate", "center", "path"}},
      {"potential.v2", {"preset", "amplitude", "width", "rate", "center", "path"}},
      {"schedule", {"lambdas"}},
      {"density", {"eps", "direction", "nodes", "uniform"}},
      {"resolvent", {"eta_rule", "eta", "grid_factor", "extrapolate", "eta_list", "probe", "probe_width"}},
      {"scatter", {"tol", "max_iter", "window", "c_n"}},
      {"recover", {"mode", "eps_scale", "eps_exponent", "kappa_count", "kappa_spacing", "kappas", "reconstruct"}},
      {"reconstruction", {"L", "N", "mode"}},
      {"propagate", {"T", "dt", "initial", "initial_width", "initial_center", "initial_momentum"}},
      {"output", {"dir", "fields"}},
      {"run", {"seed"}},
  };
  return s;
}

[[noreturn]] void invalid(const Config& cfg, const std::string& section, const std::string& key, const std::string& why) {
  throw Error(ErrorCode::Config,
              cfg.source() + ":" + std::to_string(cfg.line_of(section, key)) + ": [" + section + "] " + key + ": " + why);
}

void check_increasing(const Config& cfg, const std::string& section, const std::string& key,
                      const std::vector<double>& xs) {
  if (xs.empty()) invalid(cfg, section, key, "empty schedule");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !std::isfinite(xs[i])) invalid(cfg, section, key, "entries must be positive");
    if (i > 0 && !(xs[i] > xs[i - 1])) invalid(cfg, section, key, "schedule must be strictly increasing");
  }
}

double positive(const Config& cfg, const std::string& section, const std::string& key, double fallback) {
  const double v = cfg.get_double(section, key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) invalid(cfg, section, key, "must be positive");
  return v;
}

PotentialSpec read_potential(const Config& cfg, const std::string& section) {
  if (!cfg.has_section(section)) return PotentialSpec::zero();
  const std::string preset = cfg.get_string(section, "preset", "zero");
  PotentialSpec p;
  try {
    p.kind = parse_potential_kind(preset);
  } catch (const Error&) {
    invalid(cfg, section, "preset", "unknown preset '" + preset + "'");
  }
  p.amplitude = cfg.get_double(section, "amplitude", 1.0);
  p.center = cfg.get_point(section, "center", {0.0, 0.0, 0.0});
  if (p.kind == PotentialKind::Gaussian || p.kind == PotentialKind::Bump) p.width = positive(cfg, section, "width", 1.0);
  if (p.kind == PotentialKind::Dyadic) p.rate = cfg.get_double(section, "rate", 2.0);
  if (p.kind == PotentialKind::File) {
    p.path = cfg.get_string(section, "path");
    if (!std::filesystem::exists(p.path)) invalid(cfg, section, "path", "file '" + p.path + "' does not exist");
  }
  return p;
}

int read_grid_points(const Config& cfg, const std::string& section, int fallback) {
  if (!cfg.has(section, "N")) return fallback;
  if (cfg.get_string(section, "N") == "auto") return 0;
  const int N = cfg.get_int(section, "N");
  if (N < 16 || N % 2) invalid(cfg, section, "N", "must be an even integer >= 16, or auto");
  return N;
}

PairingMode read_mode(const Config& cfg, const std::string& section, const std::string& fallback) {
  const std::string mode = cfg.get_string(section, "mode", fallback);
  if (mode == "full") return PairingMode::Full;
  if (mode != "leading") invalid(cfg, section, "mode", "expected leading or full");
  return PairingMode::Leading;
}

}  // namespace

ExperimentConfig load_experiment(const Config& cfg) {
  for (const std::string& section : cfg.sections()) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw Error(ErrorCode::Config, cfg.source() + ": unknown section [" + section + "]");
    for (const std::string& key : cfg.keys(section))
      if (!it->second.count(key)) invalid(cfg, section, key, "unknown key");
  }

  ExperimentConfig e;
  e.source = cfg.source();
  e.hash = cfg.hash();

  e.grid.n = cfg.get_int("grid", "n", 2);
  if (e.grid.n != 2 && e.grid.n != 3) invalid(cfg, "grid", "n", "must be 2 or 3");
  e.grid.L = positive(cfg, "grid", "L", e.grid.L);
  e.grid.N = read_grid_points(cfg, "grid", 0);

  e.v1 = read_potential(cfg, "potential.v1");
  e.v2 = read_potential(cfg, "potential.v2");

  if (cfg.has("schedule", "lambdas")) e.lambdas = cfg.get_list("schedule", "lambdas");
  check_increasing(cfg, "schedule", "lambdas", e.lambdas);

  e.density.eps = cfg.get_double("density", "eps", 0.0);
  if (!(e.density.eps >= 0.0 && e.density.eps <= 1.0)) invalid(cfg, "density", "eps", "must lie in [0, 1] (0 = rule)");
  Point en{0.0, 0.0, 0.0};
  en[e.grid.n - 1] = 1.0;
  e.density.direction = cfg.get_point("density", "direction", en);
  double len = 0.0;
  for (int d = 0; d < e.grid.n; ++d) len += e.density.direction[d] * e.density.direction[d];
  if (!(len > 0.0)) invalid(cfg, "density", "direction", "must be nonzero");
  for (int d = 0; d < 3; ++d) e.density.direction[d] = d < e.grid.n ? e.density.direction[d] / std::sqrt(len) : 0.0;
  e.density.nodes = cfg.get_int("density", "nodes", 0);
  if (e.density.nodes < 0) invalid(cfg, "density", "nodes", "must be non-negative");
  e.density.uniform = cfg.get_bool("density", "uniform", false);

  PvSettings& pv = e.scatter.pv;
  const std::string rule = cfg.get_string("resolvent", "eta_rule", "grid-tied");
  if (rule == "grid-tied") {
    pv.rule = EtaRule::GridTied;
  } else if (rule == "fixed") {
    pv.rule = EtaRule::Fixed;
  } else {
    invalid(cfg, "resolvent", "eta_rule", "expected grid-tied or fixed");
  }
  pv.eta = positive(cfg, "resolvent", "eta", pv.eta);
  pv.grid_factor = positive(cfg, "resolvent", "grid_factor", pv.grid_factor);
  pv.extrapolate = cfg.get_bool("resolvent", "extrapolate", true);
  if (cfg.has("resolvent", "eta_list")) {
    pv.eta_list = cfg.get_list("resolvent", "eta_list");
    if (pv.eta_list.size() != 2 || !(pv.eta_list[0] > pv.eta_list[1]) || !(pv.eta_list[1] > 0.0))
      invalid(cfg, "resolvent", "eta_list", "needs two strictly decreasing positive widths");
  }
  e.probe = cfg.get_string("resolvent", "probe", e.probe);
  if (e.probe != "shell" && e.probe != "fixed") invalid(cfg, "resolvent", "probe", "expected shell or fixed");
  e.probe_width = positive(cfg, "resolvent", "probe_width", e.probe_width);

  e.scatter.tol = positive(cfg, "scatter", "tol", e.scatter.tol);
  e.scatter.max_iter = cfg.get_int("scatter", "max_iter", e.scatter.max_iter);
  if (e.scatter.max_iter < 1) invalid(cfg, "scatter", "max_iter", "must be at least 1");
  e.scatter.window = positive(cfg, "scatter", "window", e.scatter.window);
  if (e.scatter.window >= 1.0) invalid(cfg, "scatter", "window", "must be below 1");
  e.c_n = positive(cfg, "scatter", "c_n", e.c_n);

  e.mode = read_mode(cfg, "recover", "full");
  e.reconstruction_mode = read_mode(cfg, "reconstruction", "leading");
  e.eps_rule = EpsRule::standard(e.grid.n);
  e.eps_rule.scale = positive(cfg, "recover", "eps_scale", 1.0);
  e.eps_rule.exponent = cfg.get_double("recover", "eps_exponent", e.eps_rule.exponent);
  e.lattice.count = cfg.get_int("recover", "kappa_count", e.lattice.count);
  if (e.lattice.count < 1 || e.lattice.count % 2 == 0) invalid(cfg, "recover", "kappa_count", "must be odd and positive");
  e.lattice.spacing = positive(cfg, "recover", "kappa_spacing", e.lattice.spacing);
  if (cfg.has("recover", "kappas")) {
    const std::vector<double> xs = cfg.get_list("recover", "kappas");
    if (xs.size() % e.grid.n) invalid(cfg, "recover", "kappas", "length must be a multiple of n");
    for (std::size_t i = 0; i < xs.size(); i += e.grid.n) {
      Point k{0.0, 0.0, 0.0};
      for (int d = 0; d < e.grid.n; ++d) k[d] = xs[i + d];
      e.kappas.push_back(k);
    }
  }
  e.reconstruct = cfg.get_bool("recover", "reconstruct", e.reconstruct);
  e.reconstruction_grid.n = e.grid.n;
  e.reconstruction_grid.L = positive(cfg, "reconstruction", "L", e.reconstruction_grid.L);
  e.reconstruction_grid.N = read_grid_points(cfg, "reconstruction", e.reconstruction_grid.N);

  e.propagation.T = cfg.get_double("propagate", "T", e.propagation.T);
  if (!(e.propagation.T >= 0.0)) invalid(cfg, "propagate", "T", "must be non-negative");
  e.propagation.dt = positive(cfg, "propagate", "dt", e.propagation.dt);
  e.initial = cfg.get_string("propagate", "initial", e.initial);
  if (e.initial != "gaussian" && !std::filesystem::exists(e.initial))
    invalid(cfg, "propagate", "initial", "expected gaussian or an existing SSFLD1 file");
  e.initial_width = positive(cfg, "propagate", "initial_width", e.initial_width);
  e.initial_center = cfg.get_point("propagate", "initial_center", e.initial_center);
  e.initial_momentum = cfg.get_point("propagate", "initial_momentum", e.initial_momentum);

  e.output_dir = cfg.get_string("output", "dir", e.output_dir);
  if (e.output_dir.empty()) invalid(cfg, "output", "dir", "must not be empty");
  e.write_fields = cfg.get_bool("output", "fields", e.write_fields);
  if (cfg.has("run", "seed")) {
    const double s = cfg.get_double("run", "seed");
    if (!(s >= 0.0) || s != std::floor(s)) invalid(cfg, "run", "seed", "must be a non-negative integer");
    e.seed = static_cast<std::uint64_t>(s);
  }
  return e;
}

ExperimentConfig load_experiment_file(const std::string& path) { return load_experiment(Config::load(path)); }

Grid grid_for(const ExperimentConfig& e, double lambda) {
  const int N = e.grid.N > 0 ? e.grid.N : std::max(64, resolving_points(e.grid.L, lambda));
  return make_grid(e.grid.n, e.grid.L, N);
}

SphericalDensity density_for(const ExperimentConfig& e, double lambda) {
  const int n = e.grid.n;
  if (e.density.uniform) return uniform_density(n, lambda, e.grid.L);
  const double eps = e.density.eps > 0.0 ? e.density.eps : EpsRule::standard(n)(lambda);
  return make_cap_density(eps, rotation_to(n, e.density.direction), e.density.nodes);
}

}  // namespace potrec
