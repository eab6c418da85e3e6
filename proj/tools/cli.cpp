#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <tangleforge/tangleforge.hpp>

namespace tangleforge::cli {
namespace {

using nlohmann::ordered_json;

// Numbers are serialized with 12 significant digits: below every test
// tolerance, above float noise.
double sig12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct RoofOptions {
  int ensemble_size = 0;
  int restarts = 32;
  std::uint64_t seed = 42;
  double tolerance = 1e-9;
};

void add_roof_options(CLI::App* cmd, RoofOptions& opts) {
  cmd->add_option("--ensemble-size", opts.ensemble_size,
                  "decomposition size m (0 = max(8, 2*rank))");
  cmd->add_option("--restarts", opts.restarts, "number of random restarts")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts.seed, "master seed for the restart streams");
  cmd->add_option("--tol", opts.tolerance, "convergence tolerance");
}

RoofProblem make_problem(const DensityMatrix& target, RoofMeasure measure,
                         const RoofOptions& opts, double stop_below = 0.0) {
  RoofProblem p;
  p.target = target;
  p.measure = measure;
  p.ensemble_size = opts.ensemble_size;
  p.restarts = opts.restarts;
  p.seed = opts.seed;
  p.tolerance = opts.tolerance;
  p.stop_below = stop_below;
  return p;
}

enum class Family { none, pi_ghz_state, sigma_state, sigma_tilde_state };

struct ResolvedState {
  std::string spec;
  bool pure = false;
  PureState psi;      // valid when pure
  DensityMatrix rho;  // always valid
  Family family = Family::none;
  double family_param = 0.0;
};

std::vector<double> parse_numbers(const std::string& text, std::size_t expected,
                                  const std::vector<std::string>& keys) {
  std::vector<double> values(expected, 0.0);
  std::vector<bool> seen(expected, false);
  std::stringstream ss(text);
  std::string item;
  std::size_t position = 0;
  while (std::getline(ss, item, ',')) {
    require(!item.empty(), errc::bad_parameter, "empty parameter in state spec");
    const auto eq = item.find('=');
    std::size_t slot = position;
    std::string value_text = item;
    if (eq != std::string::npos) {
      const std::string key = item.substr(0, eq);
      const auto it = std::find(keys.begin(), keys.end(), key);
      require(it != keys.end(), errc::bad_parameter, "unknown parameter '" + key + "'");
      slot = static_cast<std::size_t>(it - keys.begin());
      value_text = item.substr(eq + 1);
    }
    require(slot < expected && !seen[slot], errc::bad_parameter,
            "bad parameter list in state spec");
    try {
      values[slot] = std::stod(value_text);
    } catch (const std::exception&) {
      fail(errc::bad_parameter, "cannot parse number '" + value_text + "'");
    }
    seen[slot] = true;
    ++position;
  }
  for (std::size_t i = 0; i < expected; ++i)
    require(seen[i], errc::bad_parameter, "missing parameter in state spec");
  return values;
}

ResolvedState resolve_state(const std::string& spec) {
  ResolvedState r;
  r.spec = spec;
  auto finish_pure = [&](PureState s) {
    r.pure = true;
    r.psi = std::move(s);
    r.rho = projector(r.psi);
  };

  if (spec == "ghz") {
    finish_pure(named_pure(StateLabel::ghz()));
  } else if (spec == "w") {
    finish_pure(named_pure(StateLabel::w()));
  } else if (spec == "psi5") {
    finish_pure(named_pure(StateLabel::psi5()));
  } else if (spec == "pi-ghz") {
    r.rho = pi_ghz();
    r.family = Family::pi_ghz_state;
  } else if (spec.rfind("sigma:", 0) == 0) {
    const double x = parse_numbers(spec.substr(6), 1, {"x"})[0];
    r.rho = sigma(x);
    r.family = Family::sigma_state;
    r.family_param = x;
  } else if (spec.rfind("sigma-tilde:", 0) == 0) {
    const double y = parse_numbers(spec.substr(12), 1, {"y"})[0];
    r.rho = sigma_tilde(y);
    r.family = Family::sigma_tilde_state;
    r.family_param = y;
  } else if (spec.rfind("j:", 0) == 0) {
    const auto v = parse_numbers(spec.substr(2), 2, {"theta1", "theta2"});
    finish_pure(named_pure(StateLabel::j(v[0], v[1])));
  } else if (spec.rfind("x-state:", 0) == 0) {
    const auto v = parse_numbers(spec.substr(8), 4, {"x", "phi1", "phi2", "phi3"});
    finish_pure(named_pure(StateLabel::x_state(v[0], v[1], v[2], v[3])));
  } else {
    const nlohmann::json j = detail::parse_file(spec);
    if (j.is_object() && j.contains("amplitudes")) {
      finish_pure(state_from_json(j));
    } else if (j.is_object() && j.contains("matrix")) {
      r.rho = density_from_json(j);
    } else {
      fail(errc::bad_file, "file is neither a state nor a density matrix");
    }
  }
  return r;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  require(file.good(), errc::bad_file, "cannot write " + out_path);
  file << text;
}

ordered_json report_to_json(const TangleReport& rep) {
  ordered_json j;
  j["tau3"] = sig12(rep.tau3);
  j["one_tangle_A"] = sig12(rep.one_tangle_A);
  j["concurrence_AB"] = sig12(rep.concurrence_AB);
  j["concurrence_AC"] = sig12(rep.concurrence_AC);
  j["negativity_A_BC"] = sig12(rep.negativity_A_BC);
  j["pi_tangle"] = sig12(rep.pi_tangle);
  return j;
}

// Decomposition whose ensemble average certifies an upper bound on the
// A|(BC) one-tangle of the family state; used to cross-check the closed-form
// value. The product realization of pi_ghz lands at 1/3, strictly below the
// closed form 5/9 -- that gap is reported, not hidden.
Ensemble one_tangle_reference_ensemble(Family family, double param) {
  switch (family) {
    case Family::pi_ghz_state:
      return reference_decomposition(RefDecomposition::Product_PiGHZ);
    case Family::sigma_state:
      return reference_decomposition(RefDecomposition::PatternB_sigma, param);
    case Family::sigma_tilde_state: {
      Ensemble e = reference_decomposition(RefDecomposition::PatternB_sigma, param);
      const std::vector<Mat> flip = {pauli_z(), identity2(), identity2()};
      for (auto& m : e.members) m.state = apply_local_operator(m.state, flip, true);
      return e;
    }
    case Family::none:
      break;
  }
  return {};
}

int cmd_measures(const std::string& spec, const RoofOptions& opts,
                 const std::string& out_path, std::ostream& out) {
  const ResolvedState st = resolve_state(spec);
  require(st.rho.dim() == 8, errc::wrong_size,
          "measures needs a 3-qubit state (for psi5 use the ems command)");

  ordered_json j;
  j["command"] = "measures";
  j["state"] = spec;
  j["kind"] = st.pure ? "pure" : "mixed";

  double tau3 = 0.0;
  bool tau3_upper = false;
  std::string method;
  if (st.pure) {
    tau3 = three_tangle_pure(st.psi);
    method = "pure-exact";
  } else if (st.family == Family::pi_ghz_state) {
    tau3 = 0.0;
    method = "analytic";
  } else if (st.family == Family::sigma_state || st.family == Family::sigma_tilde_state) {
    tau3 = tau_sigma(st.family_param);
    method = "analytic";
  } else {
    const RoofResult rr = roof_minimize(make_problem(st.rho, RoofMeasure::tau3, opts));
    tau3 = rr.value;
    tau3_upper = true;
    method = "roof-upper-bound";
  }

  const TangleReport rep = full_report(st.rho, tau3);
  j.update(report_to_json(rep));
  j["tau3_method"] = method;
  if (tau3_upper) j["tau3_upper_bound"] = true;

  if (st.family != Family::none) {
    const double closed_form = one_tangle_sigma(
        st.family == Family::pi_ghz_state ? 0.0 : st.family_param);
    const RoofResult rr = roof_minimize(make_problem(st.rho, RoofMeasure::one_tangle_A, opts));
    const Ensemble ref = one_tangle_reference_ensemble(st.family, st.family_param);
    const double ref_avg =
        ensemble_average(ref, [](const PureState& s) { return one_tangle_pure(s, 0); });
    const double upper = std::min(rr.value, ref_avg);
    j["one_tangle_closed_form"] = sig12(closed_form);
    j["one_tangle_roof_upper"] = sig12(upper);
    j["one_tangle_roof_converged"] = rr.converged;
    j["discrepancy"] = upper < closed_form - 1e-6;
    j["seed"] = opts.seed;
    j["restarts"] = opts.restarts;
  }

  emit(j.dump(2) + "\n", out_path, out);
  return 0;
}

int cmd_sigma_curve(double x_min, double x_max, int steps, bool with_roof,
                    const RoofOptions& opts, const std::string& format,
                    const std::string& out_path, std::ostream& out) {
  require(steps >= 2, errc::bad_parameter, "sweeps need at least 2 steps");
  require(x_min >= 0.0 && x_max <= 1.0 && x_min < x_max, errc::bad_parameter,
          "x range must lie in [0,1]");

  struct Row {
    double x, tau3, a1, one_tangle, slack, roof;
  };
  std::vector<Row> rows;
  double min_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < steps; ++i) {
    Row r{};
    r.x = x_min + (x_max - x_min) * i / (steps - 1);
    r.tau3 = tau_sigma(r.x);
    r.a1 = alpha_I(r.x);
    r.one_tangle = one_tangle_sigma(r.x);
    r.slack = r.one_tangle - r.tau3;
    if (with_roof)
      r.roof = roof_minimize(make_problem(sigma(r.x), RoofMeasure::tau3, opts, 1e-10)).value;
    min_slack = std::min(min_slack, r.slack);
    rows.push_back(r);
  }
  const bool monogamy_ok = min_slack >= -1e-9;

  std::string text;
  if (format == "json") {
    ordered_json j;
    j["command"] = "sigma-curve";
    auto& arr = j["rows"] = ordered_json::array();
    for (const Row& r : rows) {
      ordered_json row;
      row["x"] = sig12(r.x);
      row["tau3_analytic"] = sig12(r.tau3);
      row["alpha_I"] = sig12(r.a1);
      row["one_tangle_closed_form"] = sig12(r.one_tangle);
      row["monogamy_slack"] = sig12(r.slack);
      if (with_roof) row["tau3_roof"] = sig12(r.roof);
      arr.push_back(std::move(row));
    }
    j["audit"]["monogamy_ok"] = monogamy_ok;
    j["audit"]["min_slack"] = sig12(min_slack);
    text = j.dump(2) + "\n";
  } else {
    std::ostringstream csv;
    csv << "x,tau3_analytic,alpha_I,one_tangle_closed_form,monogamy_slack";
    if (with_roof) csv << ",tau3_roof";
    csv << "\n";
    for (const Row& r : rows) {
      csv << fmt12(r.x) << ',' << fmt12(r.tau3) << ',' << fmt12(r.a1) << ','
          << fmt12(r.one_tangle) << ',' << fmt12(r.slack);
      if (with_roof) csv << ',' << fmt12(r.roof);
      csv << "\n";
    }
    text = csv.str();
  }
  emit(text, out_path, out);
  return monogamy_ok ? 0 : 3;
}

int cmd_char_curves(int steps, int phi_grid, const std::string& format,
                    const std::string& out_path, std::ostream& out) {
  require(steps >= 2, errc::bad_parameter, "need at least 2 grid points");
  std::vector<double> grid(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) grid[static_cast<std::size_t>(i)] = double(i) / (steps - 1);

  const std::vector<CurvePoint> curve = characteristic_min_curve(grid, phi_grid);
  const std::vector<CurvePoint> envelope = lower_convex_envelope(curve);

  double max_abs_diff = 0.0;
  bool envelope_ok = true;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    max_abs_diff = std::max(max_abs_diff, std::abs(envelope[i].value - tau_sigma(curve[i].x)));
    if (envelope[i].value > curve[i].value + 1e-12) envelope_ok = false;
  }
  const bool hull_ok = max_abs_diff <= 5e-3;

  std::string text;
  if (format == "json") {
    ordered_json j;
    j["command"] = "char-curves";
    j["phi_grid"] = phi_grid;
    auto& arr = j["rows"] = ordered_json::array();
    for (std::size_t i = 0; i < curve.size(); ++i) {
      ordered_json row;
      row["x"] = sig12(curve[i].x);
      row["min_curve"] = sig12(curve[i].value);
      row["envelope"] = sig12(envelope[i].value);
      row["tau_sigma_analytic"] = sig12(tau_sigma(curve[i].x));
      row["abs_diff"] = sig12(std::abs(envelope[i].value - tau_sigma(curve[i].x)));
      arr.push_back(std::move(row));
    }
    j["summary"]["max_abs_diff"] = sig12(max_abs_diff);
    j["summary"]["hull_matches_analytic"] = hull_ok;
    text = j.dump(2) + "\n";
  } else {
    std::ostringstream csv;
    csv << "x,min_curve,envelope,tau_sigma_analytic,abs_diff\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
      const double analytic = tau_sigma(curve[i].x);
      csv << fmt12(curve[i].x) << ',' << fmt12(curve[i].value) << ','
          << fmt12(envelope[i].value) << ',' << fmt12(analytic) << ','
          << fmt12(std::abs(envelope[i].value - analytic)) << "\n";
    }
    csv << "# max_abs_diff = " << fmt12(max_abs_diff) << "\n";
    text = csv.str();
  }
  emit(text, out_path, out);
  return (hull_ok && envelope_ok) ? 0 : 3;
}

int cmd_roof(const std::string& path, const std::string& measure_name,
             const RoofOptions& opts, const std::string& out_path, std::ostream& out) {
  const DensityMatrix rho = read_density_file(path);
  const RoofMeasure measure =
      measure_name == "one-tangle" ? RoofMeasure::one_tangle_A : RoofMeasure::tau3;
  const RoofResult result = roof_minimize(make_problem(rho, measure, opts));

  const double residual =
      frobenius_distance(density_from_ensemble(result.ensemble).entries, rho.entries);

  ordered_json j;
  j["command"] = "roof";
  j["input"] = path;
  j["measure"] = measure == RoofMeasure::tau3 ? "tau3" : "one_tangle_A";
  j["value"] = sig12(result.value);
  j["upper_bound"] = true;
  j["converged"] = result.converged;
  j["iterations"] = result.iterations;
  j["ensemble_size"] = opts.ensemble_size;
  j["restarts"] = opts.restarts;
  j["seed"] = opts.seed;
  j["tolerance"] = opts.tolerance;
  j["reconstruction_residual"] = sig12(residual);
  auto& members = j["ensemble"] = ordered_json::array();
  for (const auto& m : result.ensemble.members) {
    ordered_json member;
    member["weight"] = sig12(m.weight);
    auto& amps = member["amplitudes"] = ordered_json::array();
    for (long i = 0; i < m.state.dim(); ++i)
      amps.push_back({sig12(m.state.amplitudes[i].real()), sig12(m.state.amplitudes[i].imag())});
    members.push_back(std::move(member));
  }
  emit(j.dump(2) + "\n", out_path, out);
  return 0;
}

int cmd_polyhedron(const std::string& path, const std::string& out_path, std::ostream& out) {
  DensityMatrix rho = read_density_file(path);
  require(rho.dim() == 4 || rho.dim() == 8, errc::wrong_size,
          "polyhedron test needs a dim-4 state or a 3-qubit state");
  if (rho.dim() == 8) rho = embed_ghz_subspace(rho);

  const auto weights = polyhedron_membership(rho);
  ordered_json j;
  j["command"] = "polyhedron";
  j["input"] = path;
  j["member"] = weights.has_value();
  if (weights) {
    auto& arr = j["weights"] = ordered_json::array();
    for (double w : *weights) arr.push_back(sig12(w));
    j["certifies_zero_tau3"] = true;
  }
  j["tolerance"] = 1e-8;
  emit(j.dump(2) + "\n", out_path, out);
  return 0;
}

int cmd_ems(const std::string& spec, const std::string& out_path, std::ostream& out) {
  const ResolvedState st = resolve_state(spec);
  require(st.pure, errc::bad_parameter, "ems is defined for pure states");
  ordered_json j;
  j["command"] = "ems";
  j["state"] = spec;
  j["n_qubits"] = st.psi.n_qubits;
  j["value"] = sig12(e_ms(st.psi));
  emit(j.dump(2) + "\n", out_path, out);
  return 0;
}

int cmd_bound(double xi, double x, double y, const std::string& out_path, std::ostream& out) {
  const double value = rank8_upper_bound(xi, x, y);
  ordered_json j;
  j["command"] = "bound";
  j["xi"] = sig12(xi);
  j["x"] = sig12(x);
  j["y"] = sig12(y);
  j["tau3_upper_bound"] = sig12(value);
  emit(j.dump(2) + "\n", out_path, out);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"entanglement measures, closed-form tangle families and convex-roof audits "
               "for small quantum states"};
  app.name("tangleforge");
  app.require_subcommand(1);

  std::string state_spec, input_path, out_path;
  std::string format = "csv";
  std::string measure_name = "tau3";
  RoofOptions roof_opts;
  double x_min = 0.0, x_max = 1.0;
  int steps = 101;
  int phi_grid = 24;
  bool with_roof = false;
  double xi = 0.0, bx = 0.0, by = 0.0;

  CLI::App* measures = app.add_subcommand("measures", "tangle report for a named or file state");
  measures->add_option("state", state_spec, "state spec (ghz, w, pi-ghz, sigma:x=.., "
                       "sigma-tilde:y=.., j:t1,t2, x-state:x,p1,p2,p3, psi5, or a JSON file)")
      ->required();
  add_roof_options(measures, roof_opts);
  measures->add_option("--out", out_path, "write the report to a file");

  CLI::App* sigma_curve = app.add_subcommand("sigma-curve", "sweep the sigma(x) tangle curves");
  sigma_curve->add_option("--x-min", x_min);
  sigma_curve->add_option("--x-max", x_max);
  sigma_curve->add_option("--steps", steps)->check(CLI::Range(2, 1000000));
  sigma_curve->add_flag("--with-roof", with_roof, "add a tau3_roof column (slow)");
  add_roof_options(sigma_curve, roof_opts);
  sigma_curve->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  sigma_curve->add_option("--out", out_path);

  CLI::App* char_curves =
      app.add_subcommand("char-curves", "phi-minimized characteristic curves and their hull");
  char_curves->add_option("--steps", steps)->check(CLI::Range(2, 1000000));
  char_curves->add_option("--phi-grid", phi_grid, "phi grid density per axis")
      ->check(CLI::Range(4, 256));
  char_curves->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  char_curves->add_option("--out", out_path);

  CLI::App* roof_cmd = app.add_subcommand("roof", "convex-roof minimization for a density file");
  roof_cmd->add_option("density", input_path, "density matrix JSON file")->required();
  roof_cmd->add_option("--measure", measure_name)->check(CLI::IsMember({"tau3", "one-tangle"}));
  add_roof_options(roof_cmd, roof_opts);
  roof_cmd->add_option("--out", out_path);

  CLI::App* polyhedron = app.add_subcommand("polyhedron", "zero-tangle simplex membership");
  polyhedron->add_option("density", input_path, "density matrix JSON file (dim 4 or 8)")
      ->required();
  polyhedron->add_option("--out", out_path);

  CLI::App* ems = app.add_subcommand("ems", "multipartite measure E_ms of a pure state");
  ems->add_option("state", state_spec, "state spec (ghz, w, psi5 or a state JSON file)")
      ->required();
  ems->add_option("--out", out_path);

  CLI::App* bound = app.add_subcommand("bound", "rank-8 three-tangle upper bound");
  bound->add_option("--xi", xi)->required();
  bound->add_option("--x", bx)->required();
  bound->add_option("--y", by)->required();
  bound->add_option("--out", out_path);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (measures->parsed()) return cmd_measures(state_spec, roof_opts, out_path, out);
    if (sigma_curve->parsed())
      return cmd_sigma_curve(x_min, x_max, steps, with_roof, roof_opts, format, out_path, out);
    if (char_curves->parsed()) return cmd_char_curves(steps, phi_grid, format, out_path, out);
    if (roof_cmd->parsed()) return cmd_roof(input_path, measure_name, roof_opts, out_path, out);
    if (polyhedron->parsed()) return cmd_polyhedron(input_path, out_path, out);
    if (ems->parsed()) return cmd_ems(state_spec, out_path, out);
    if (bound->parsed()) return cmd_bound(xi, bx, by, out_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no command\n";
  return 2;
}

}  // namespace tangleforge::cli
