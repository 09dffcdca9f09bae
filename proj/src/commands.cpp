#include "potrec/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "potrec/acceptance.hpp"
#include "potrec/error.hpp"
#include "potrec/experiment.hpp"
#include "potrec/herglotz.hpp"
#include "potrec/norms.hpp"

namespace potrec {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Artifact {
  std::string name;
  std::string bytes;
};

// Everything a command produces; committed to disk only on success.
struct Outputs {
  std::vector<Artifact> files;

  void add(std::string name, std::string bytes) { files.push_back({std::move(name), std::move(bytes)}); }
  void add_json(const std::string& name, const json& j) { add(name, j.dump(2) + "\n"); }
  void add_field(const std::string& name, const ScalarField& f) {
    const std::vector<std::uint8_t> b = encode_field(f);
    add(name, std::string(b.begin(), b.end()));
  }
};

void commit(const Outputs& outs, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory '" + dir + "': " + ec.message());
  for (const Artifact& a : outs.files) {
    const fs::path target = fs::path(dir) / a.name;
    const fs::path tmp = fs::path(dir) / (a.name + ".part");
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      os.write(a.bytes.data(), static_cast<std::streamsize>(a.bytes.size()));
      if (!os) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
    }
    fs::rename(tmp, target, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot move '" + tmp.string() + "' into place: " + ec.message());
  }
}

// CSV with a comment line carrying the command and config hash, then one
// header row whose column names include units in brackets.
class Csv {
 public:
  Csv(const std::string& command, const ExperimentConfig& e, std::vector<std::string> columns) {
    text_ = "# potrec " + command + " config_hash=" + e.hash + " schema=1\n";
    for (std::size_t i = 0; i < columns.size(); ++i) text_ += (i ? "," : "") + columns[i];
    text_ += "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += "\n";
  }
  const std::string& text() const noexcept { return text_; }

 private:
  std::string text_;
};

std::string lambda_tag(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", lambda);
  return buf;
}

json grid_json(const Grid& g) { return {{"n", g.dim()}, {"L", g.half_width()}, {"N", g.points()}}; }

json norms_json(const NormReport& r) {
  return {{"triple", r.triple}, {"b", r.b}, {"b_star", r.b_star}, {"l1", r.l1}, {"l2", r.l2}, {"linf", r.linf}};
}

json point_json(const Point& p, int n) { return std::vector<double>(p.begin(), p.begin() + n); }

json complex_json(Complex z) { return {z.real(), z.imag()}; }

// Grid without an energy: the configured N, else 128 points.
Grid plain_grid(const ExperimentConfig& e) { return make_grid(e.grid.n, e.grid.L, e.grid.N > 0 ? e.grid.N : 128); }

json header(const std::string& command, const ExperimentConfig& e) {
  return {{"command", command}, {"config", e.source}, {"config_hash", e.hash}};
}

int cmd_norms(const ExperimentConfig& e, Outputs& outs, std::ostream& out) {
  const Grid g = plain_grid(e);
  const ScalarField V1 = sample_potential(e.v1, g);
  const ScalarField V2 = sample_potential(e.v2, g);
  json j = header("norms", e);
  j["grid"] = grid_json(g);
  j["v1"] = norms_json(all_norms(V1));
  j["v2"] = norms_json(all_norms(V2));
  j["difference"] = norms_json(all_norms(V1 - V2));
  outs.add_json("norms.json", j);
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_herglotz(const ExperimentConfig& e, Outputs& outs, std::ostream& out) {
  Csv csv("herglotz", e,
          {"lambda[1/length]", "N", "eps[rad]", "density_l1", "density_l2", "b_star_norm[length^(1/2)]",
           "l2_norm[length^(n/2)]", "residual[rel]"});
  json j = header("herglotz", e);
  json rows = json::array();
  std::vector<double> bstar;
  for (double lambda : e.lambdas) {
    const Grid g = grid_for(e, lambda);
    const SphericalDensity d = density_for(e, lambda);
    const ScalarField u = herglotz_wave(lambda, d, g);
    const DensityNorms dn = density_norms(d);
    const double bs = b_star_norm(u), l2 = l2_norm(u);
    const double res = helmholtz_residual(lambda, u, e.scatter.window);
    bstar.push_back(bs);
    const std::string file = "herglotz_lambda" + lambda_tag(lambda) + ".ssfld";
    outs.add_field(file, u);
    csv.row({csv_number(lambda), std::to_string(g.points()), csv_number(d.eps), csv_number(dn.l1), csv_number(dn.l2),
             csv_number(bs), csv_number(l2), csv_number(res)});
    rows.push_back({{"lambda", lambda},
                    {"grid", grid_json(g)},
                    {"eps", d.eps},
                    {"density", {{"l1", dn.l1}, {"l2", dn.l2}, {"nodes", d.quadrature.nodes.size()}}},
                    {"norms", {{"b_star", bs}, {"l2", l2}}},
                    {"residual", res},
                    {"field", file}});
  }
  j["rows"] = rows;
  if (e.lambdas.size() >= 2) j["b_star_slope"] = loglog_fit(e.lambdas, bstar).first;
  outs.add("herglotz.csv", csv.text());
  outs.add_json("herglotz.json", j);
  out << csv.text();
  return kExitOk;
}

ScalarField probe_field(const ExperimentConfig& e, double lambda) {
  const Grid g = grid_for(e, lambda);
  const ScalarField bump = sample_potential(PotentialSpec::bump(1.0, e.probe_width), g);
  if (e.probe == "fixed") return bump;
  // Modulated onto the shell so the probe stays at the energy it tests.
  return multiply(bump, sample(g, [lambda](const Point& x) { return std::polar(1.0, lambda * x[0]); }));
}

int cmd_resolvent_probe(const ExperimentConfig& e, Outputs& outs, std::ostream& out) {
  const ResolventProbeReport rep =
      resolvent_bound_probe(e.lambdas, [&](double lambda) { return probe_field(e, lambda); }, e.scatter.pv);
  Csv csv("resolvent-probe", e, {"lambda[1/length]", "ratio[b_star/b]", "eta[1/length^2]"});
  for (const ResolventProbeRow& r : rep.rows) csv.row({csv_number(r.lambda), csv_number(r.ratio), csv_number(r.eta)});
  json j = header("resolvent-probe", e);
  j["probe"] = e.probe;
  j["slope"] = rep.slope;
  j["intercept"] = rep.intercept;
  outs.add("resolvent_probe.csv", csv.text());
  outs.add_json("resolvent_probe.json", j);
  out << csv.text();
  return kExitOk;
}

int cmd_stationary_state(const ExperimentConfig& e, Outputs& outs, std::ostream& out) {
  json j = header("stationary-state", e);
  json rows = json::array();
  Csv csv("stationary-state", e,
          {"lambda[1/length]", "iterations", "max_contraction", "residual[rel]", "correction_ratio",
           "threshold[1/length]"});
  for (double lambda : e.lambdas) {
    const Grid g = grid_for(e, lambda);
    const ScalarField V = sample_potential(e.v1, g);
    const ScalarField u = herglotz_wave(lambda, density_for(e, lambda), g);
    const ScatterResult r = solve_correction(V, lambda, u, e.scatter);
    const double threshold = lambda_threshold(V, e.c_n);
    const double q = r.contraction_ratios.empty()
                         ? 0.0
                         : *std::max_element(r.contraction_ratios.begin(), r.contraction_ratios.end());
    json row = {{"lambda", lambda},
                {"grid", grid_json(g)},
                {"iterations", r.iterations},
                {"contraction_ratios", r.contraction_ratios},
                {"residual", r.residual},
                {"correction_ratio", r.correction_ratio},
                {"threshold", threshold},
                {"empirical_threshold", empirical_threshold(r, lambda)},
                {"above_threshold", lambda > threshold}};
    if (e.write_fields) {
      const std::string tag = lambda_tag(lambda);
      outs.add_field("u_lambda" + tag + ".ssfld", u);
      outs.add_field("v_lambda" + tag + ".ssfld", r.v);
      outs.add_field("w_lambda" + tag + ".ssfld", u + r.v);
    }
    rows.push_back(row);
    csv.row({csv_number(lambda), std::to_string(r.iterations), csv_number(q), csv_number(r.residual),
             csv_number(r.correction_ratio), csv_number(threshold)});
  }
  j["rows"] = rows;
  outs.add_json("stationary_state.json", j);
  outs.add("stationary_state.csv", csv.text());
  out << csv.text();
  return kExitOk;
}

std::vector<Point> lattice_points(int n, const KappaLattice& lattice) {
  std::vector<Point> out;
  const int h = lattice.count / 2;
  if (n == 2) {
    for (int a = -h; a <= h; ++a)
      for (int b = -h; b <= h; ++b) out.push_back({a * lattice.spacing, b * lattice.spacing, 0.0});
  } else {
    for (int a = -h; a <= h; ++a)
      for (int b = -h; b <= h; ++b)
        for (int c = -h; c <= h; ++c) out.push_back({a * lattice.spacing, b * lattice.spacing, c * lattice.spacing});
  }
  return out;
}

Complex truth_at(const ExperimentConfig& e, const ScalarField& F, const Point& kappa) {
  try {
    return potential_fourier(e.v1, e.grid.n, kappa) - potential_fourier(e.v2, e.grid.n, kappa);
  } catch (const Error&) {
    return fourier_at(F, kappa);
  }
}

int cmd_recover(const ExperimentConfig& e, Outputs& outs, std::ostream& out) {
  const int n = e.grid.n;
  const std::vector<Point> kappas = e.kappas.empty() ? lattice_points(n, e.lattice) : e.kappas;
  std::vector<std::string> cols;
  for (int d = 1; d <= n; ++d) cols.push_back("kappa_" + std::to_string(d) + "[1/length]");
  for (const char* c : {"lambda[1/length]", "eps[rad]", "re_estimate[potential*length^n]",
                        "im_estimate[potential*length^n]", "re_truth[potential*length^n]",
                        "im_truth[potential*length^n]", "gamma[potential*length^n]",
                        "remainder[potential*length^n]"})
    cols.push_back(c);
  Csv csv("recover", e, cols);

  // Potentials per energy are sampled once and reused by every mode.
  std::vector<Grid> grids;
  std::vector<ScalarField> V1s, V2s;
  for (double lambda : e.lambdas) {
    grids.push_back(grid_for(e, lambda));
    V1s.push_back(sample_potential(e.v1, grids.back()));
    V2s.push_back(sample_potential(e.v2, grids.back()));
  }
  const ScalarField F = V1s.back() - V2s.back();

  json modes = json::array();
  for (const Point& kappa : kappas) {
    json samples = json::array();
    const Complex truth = truth_at(e, F, kappa);
    for (std::size_t i = 0; i < e.lambdas.size(); ++i) {
      ModePlan plan = make_plan(n, kappa, {e.lambdas[i]}, e.mode);
      plan.eps_rule = e.eps_rule;
      plan.cap_nodes = e.density.nodes;
      const ModeSample s = recover_mode(V1s[i], V2s[i], plan, e.scatter).samples.back();
      std::vector<std::string> cells;
      for (int d = 0; d < n; ++d) cells.push_back(csv_number(kappa[d]));
      for (double x : {s.lambda, s.eps, s.estimate.real(), s.estimate.imag(), truth.real(), truth.imag(), s.gamma,
                       std::abs(s.remainder)})
        cells.push_back(csv_number(x));
      csv.row(cells);
      samples.push_back({{"lambda", s.lambda},
                         {"eps", s.eps},
                         {"estimate", complex_json(s.estimate)},
                         {"leading", complex_json(s.leading)},
                         {"remainder", complex_json(s.remainder)},
                         {"full", complex_json(s.full)},
                         {"gamma", s.gamma},
                         {"error", std::abs(s.estimate - truth)},
                         {"residuals", {s.residual1, s.residual2}}});
    }
    modes.push_back({{"kappa", point_json(kappa, n)}, {"truth", complex_json(truth)}, {"samples", samples}});
  }

  json j = header("recover", e);
  j["mode"] = e.mode == PairingMode::Full ? "full" : "leading";
  j["modes"] = modes;
  if (e.reconstruct) {
    const Grid rg = make_grid(n, e.reconstruction_grid.L, e.reconstruction_grid.N > 0 ? e.reconstruction_grid.N : 256);
    ModePlan tmpl = make_plan(n, Point{0.0, 0.0, 0.0}, {e.lambdas.back()}, e.reconstruction_mode);
    tmpl.eps_rule = e.eps_rule;
    tmpl.cap_nodes = e.density.nodes;
    const Reconstruction rec =
        reconstruct(sample_potential(e.v1, rg), sample_potential(e.v2, rg), e.lattice, tmpl, e.scatter);
    outs.add_field("reconstruction.ssfld", rec.field);
    j["reconstruction"] = {{"grid", grid_json(rg)},
                           {"mode", e.reconstruction_mode == PairingMode::Full ? "full" : "leading"},
                           {"lambda", e.lambdas.back()},
                           {"lattice", {{"count", e.lattice.count}, {"spacing", e.lattice.spacing}}},
                           {"relative_l2_error", rec.relative_l2_error},
                           {"max_asymmetry", rec.max_asymmetry},
                           {"field", "reconstruction.ssfld"}};
  }
  outs.add("recover.csv", csv.text());
  outs.add_json("recover.json", j);
  out << csv.text();
  return kExitOk;
}

int cmd_propagate(const ExperimentConfig& e, Outputs& outs, std::ostream& out) {
  ScalarField f;
  if (e.initial == "gaussian") {
    const Grid g = plain_grid(e);
    const double w2 = e.initial_width * e.initial_width;
    f = sample(g, [&](const Point& x) {
      double r2 = 0.0, ph = 0.0;
      for (int d = 0; d < 3; ++d) {
        r2 += (x[d] - e.initial_center[d]) * (x[d] - e.initial_center[d]);
        ph += e.initial_momentum[d] * x[d];
      }
      return std::exp(-r2 / w2) * std::polar(1.0, ph);
    });
  } else {
    f = read_field(e.initial);
  }
  const Grid& g = f.grid();
  const ScalarField V = sample_potential(e.v1, g);
  const ScalarField u = initial_to_final(V, f, e.propagation);
  if (!u.all_finite()) throw Error(ErrorCode::DivergentSeries, "propagated state is not finite");
  const StepCount sc = step_count(e.propagation);
  const double m0 = l2_norm(f), m1 = l2_norm(u);
  json j = header("propagate", e);
  j["grid"] = grid_json(g);
  j["T"] = sc.T;
  j["dt"] = e.propagation.dt;
  j["steps"] = sc.steps;
  j["mass"] = {{"initial", m0}, {"final", m1}, {"relative_drift", std::abs(m1 - m0) / m0}};
  j["probes"] = {{"overlap_initial", complex_json(inner(f, u))},
                 {"energy_free_final", std::real(inner(u, -1.0 * spectral_laplacian(u)))}};
  j["field"] = "propagate_u.ssfld";
  outs.add_field("propagate_u.ssfld", u);
  outs.add_json("propagate.json", j);
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_verify(const ExperimentConfig& e, const std::vector<int>& only, Outputs& outs, std::ostream& out) {
  AcceptanceOptions opts;
  opts.seed = e.seed;
  opts.only = only;
  opts.on_result = [&out](const CriterionResult& r) { out << format_result(r) << "\n" << std::flush; };
  const std::vector<CriterionResult> results = run_acceptance(opts);
  // Timings stay on the console so the CSV is reproducible byte for byte.
  Csv csv("verify-estimates", e, {"id", "name", "passed", "measured", "target"});
  json rows = json::array();
  int failed = 0;
  for (const CriterionResult& r : results) {
    std::string m = r.measured;
    while (!m.empty() && m.back() == ' ') m.pop_back();
    csv.row({std::to_string(r.id), r.name, r.passed ? "1" : "0", "\"" + m + "\"", "\"" + r.target + "\""});
    rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"measured", m}, {"target", r.target},
                    {"seconds", r.seconds}});
    failed += r.passed ? 0 : 1;
  }
  json j = header("verify-estimates", e);
  j["seed"] = e.seed;
  j["criteria"] = rows;
  j["failed"] = failed;
  outs.add("verify_estimates.csv", csv.text());
  outs.add_json("verify_estimates.json", j);
  out << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
  return failed ? kExitCriteriaFailed : kExitOk;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"norms",   "herglotz",  "resolvent-probe",  "stationary-state",
                                              "recover", "propagate", "verify-estimates"};
  return names;
}

bool is_command(const std::string& name) {
  const auto& c = command_names();
  return std::find(c.begin(), c.end(), name) != c.end();
}

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x == 0.0 ? 0.0 : x);  // no "-0"
  return buf;
}

int run_command(const CommandRequest& request, std::ostream& out, std::ostream& err) {
  if (!is_command(request.command)) {
    err << "potrec: unknown command '" << request.command << "'\n";
    return kExitUnknownCommand;
  }
  try {
    Config cfg = Config::load(request.config_path);
    for (const auto& [where, value] : request.overrides) cfg.set(where.first, where.second, value);
    const ExperimentConfig e = load_experiment(cfg);

    Outputs outs;
    std::ostringstream buf;
    int status = kExitOk;
    const std::string& c = request.command;
    if (c == "norms") status = cmd_norms(e, outs, buf);
    else if (c == "herglotz") status = cmd_herglotz(e, outs, buf);
    else if (c == "resolvent-probe") status = cmd_resolvent_probe(e, outs, buf);
    else if (c == "stationary-state") status = cmd_stationary_state(e, outs, buf);
    else if (c == "recover") status = cmd_recover(e, outs, buf);
    else if (c == "propagate") status = cmd_propagate(e, outs, buf);
    else status = cmd_verify(e, request.only, outs, out);
    commit(outs, e.output_dir);
    out << buf.str();
    return status;
  } catch (const Error& ex) {
    err << "potrec " << request.command << ": " << ex.what() << "\n";
    return ex.is_numerical() ? kExitDivergence : kExitValidation;
  } catch (const std::exception& ex) {
    err << "potrec " << request.command << ": " << ex.what() << "\n";
    return kExitDivergence;
  }
}

}  // namespace potrec
