#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include <CLI11.hpp>

#include "audit.hpp"
#include "shellhier/errors.hpp"
#include "shellhier/experiments.hpp"
#include "shellhier/io.hpp"

#ifndef SHELLHIER_VERSION
#define SHELLHIER_VERSION "0.0.0"
#endif

namespace shellhier::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kGrammar =
    "usage: shellhier <subcommand> --config <path> [--out <dir>] [--grid N] [--quad K] [--seed S]\n"
    "subcommands: surface show | material check | energy eval | isometry solve | classify |\n"
    "             match run | scaling run | equipartition run";

struct Options {
  std::string config;
  std::string out;
  std::optional<int> grid;
  std::optional<int> quad;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> beta, alpha;
  bool verbose = false;
};

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::BadConfig, what); }

void allow_keys(const json& j, const std::string& where, const std::set<std::string>& keys) {
  if (!j.is_object()) bad(where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) bad(where + ": unknown key '" + k + "'");
}

const json& require(const json& j, const std::string& key) {
  if (!j.contains(key)) bad("missing required key '" + key + "'");
  return j.at(key);
}

double number_at(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) bad(key + ": expected a number");
  return j.at(key).get<double>();
}

int int_at(const json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) bad(key + ": expected an integer");
  return j.at(key).get<int>();
}

std::vector<double> number_list(const json& j, const std::string& key) {
  const json& a = require(j, key);
  if (!a.is_array() || a.empty()) bad(key + ": expected a nonempty array of numbers");
  std::vector<double> out;
  for (const auto& x : a) {
    if (!x.is_number()) bad(key + ": expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

json number_array(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(io::number(x));
  return a;
}

// Everything a handler needs: the parsed config, the resolved echo it fills in, and the report.
struct Context {
  const Options& opts;
  json cfg;
  Report& report;

  void log(const std::string& msg) const {
    if (opts.verbose) std::cerr << "shellhier: " << msg << "\n";
  }
};

SurfacePatch load_surface(Context& c) {
  json sj = require(c.cfg, "surface");
  if (c.opts.grid) sj["grid"] = {*c.opts.grid, *c.opts.grid};
  if (c.opts.quad) sj["quad_order"] = *c.opts.quad;
  const SurfaceDescriptor d = io::surface_from_json(sj);
  SurfacePatch s = SurfacePatch::build(d);
  c.report.config_echo["surface"] = io::to_json(d);
  c.log("surface " + family_name(d.family) + " " + std::to_string(d.n1) + "x" + std::to_string(d.n2));
  return s;
}

Material load_material(Context& c) {
  const Material m = io::material_from_json(c.cfg.value("material", json::object()));
  c.report.config_echo["material"] = io::to_json(m);
  return m;
}

BoundaryCondition parse_bc(const std::string& s) {
  if (s == "free") return BoundaryCondition::Free;
  if (s == "clamped") return BoundaryCondition::Clamped;
  bad("bc: expected 'free' or 'clamped'");
}

// Fields may also name a numerical V1 mode: {"mode": k, "bc": "free", "scale": s}.
VectorField load_field(const SurfacePatch& s, const json& j) {
  if (j.is_object() && j.contains("mode")) {
    allow_keys(j, "field", {"mode", "bc", "scale"});
    const int k = int_at(j, "mode", 0);
    if (k < 0) bad("field.mode: expected a nonnegative index");
    const IsometryModes modes = solve_infinitesimal_isometries(s, k + 1, parse_bc(j.value("bc", "free")));
    return number_at(j, "scale", 1.0) * modes.modes[k];
  }
  return io::field_from_json(s, j);
}

json field_echo(const json& j) {
  if (j.is_object() && j.contains("mode")) {
    json e = j;
    e["bc"] = j.value("bc", "free");
    e["scale"] = number_at(j, "scale", 1.0);
    return e;
  }
  return j;
}

struct Recovery {
  RecoveryInputs inputs;
  std::optional<VectorField> w;  ///< von Karman correction, for the I4 target
};

Recovery load_recovery(Context& c, const SurfacePatch& s, const json& spec, json& echo) {
  const std::string regime = require(spec, "regime").get<std::string>();
  const json inputs = spec.value("inputs", json::object());
  allow_keys(inputs, "inputs", {"y", "V", "w", "beta", "tolerance"});
  Recovery r;
  RecoveryInputs& in = r.inputs;
  in.tolerance = number_at(inputs, "tolerance", in.tolerance);
  json ie = {{"tolerance", in.tolerance}};
  if (regime == "kirchhoff") {
    in.regime = Regime::Kirchhoff;
    in.beta = 2.0;
    in.y = load_field(s, require(inputs, "y"));
    ie["y"] = field_echo(inputs["y"]);
  } else if (regime == "vonkarman") {
    in.regime = Regime::VonKarman;
    in.beta = 4.0;
    in.V = load_field(s, require(inputs, "V"));
    ie["V"] = field_echo(inputs["V"]);
    const json wj = inputs.value("w", json("project"));
    if (wj.is_string() && wj.get<std::string>() == "project") {
      const StrainProjection p = vonkarman_correction(s, in.V);
      c.log("in-plane correction, relative residual " + io::format_double(p.relative_residual));
      in.w = p.w;
    } else if (!(wj.is_string() && wj.get<std::string>() == "none")) {
      in.w = load_field(s, wj);
    }
    if (in.w.valid()) r.w = in.w;
    ie["w"] = field_echo(wj);
  } else if (regime == "linear" || regime == "intermediate") {
    in.regime = regime == "linear" ? Regime::Linear : Regime::Intermediate;
    if (!inputs.contains("beta")) bad("inputs.beta: required for the " + regime + " regime");
    in.beta = number_at(inputs, "beta", 0.0);
    in.V = load_field(s, require(inputs, "V"));
    ie["V"] = field_echo(inputs["V"]);
  } else {
    bad("regime: expected kirchhoff, vonkarman, linear or intermediate");
  }
  ie["beta"] = in.beta;
  echo["regime"] = regime;
  echo["inputs"] = ie;
  return r;
}

ThinShellAnsatz load_ansatz(Context& c, const SurfacePatch& s, const Material& m, const json& j, json& echo,
                            double h) {
  if (j.is_string() && j.get<std::string>() == "identity") {
    echo = "identity";
    return ThinShellAnsatz::identity(s);
  }
  allow_keys(j, "ansatz", {"kirchhoff_love", "relaxed", "recovery"});
  if (j.contains("kirchhoff_love")) {
    echo = {{"kirchhoff_love", field_echo(j["kirchhoff_love"])}};
    return ThinShellAnsatz::kirchhoff_love(load_field(s, j["kirchhoff_love"]));
  }
  if (j.contains("relaxed")) {
    echo = {{"relaxed", field_echo(j["relaxed"])}};
    return relaxed_ansatz(s, m, load_field(s, j["relaxed"]));
  }
  if (j.contains("recovery")) {
    json e;
    const Recovery r = load_recovery(c, s, j["recovery"], e);
    echo = {{"recovery", e}};
    return build_recovery_sequence(s, m, r.inputs, h);
  }
  bad("ansatz: expected 'identity', 'kirchhoff_love', 'relaxed' or 'recovery'");
}

ShellQuadrature load_shell_quadrature(Context& c) {
  ShellQuadrature q;
  q.thickness_points = int_at(c.cfg, "thickness_points", q.thickness_points);
  if (q.thickness_points < 1 || q.thickness_points > 12) bad("thickness_points: expected 1..12");
  c.report.config_echo["thickness_points"] = q.thickness_points;
  return q;
}

FunctionalOptions load_functional_options(Context& c) {
  const json t = c.cfg.value("tolerances", json::object());
  allow_keys(t, "tolerances", {"isometry", "rotation", "constraint"});
  FunctionalOptions o;
  o.isometry_tolerance = number_at(t, "isometry", o.isometry_tolerance);
  o.rotation_tolerance = number_at(t, "rotation", o.rotation_tolerance);
  o.constraint_tolerance = number_at(t, "constraint", o.constraint_tolerance);
  c.report.config_echo["tolerances"] = {{"isometry", o.isometry_tolerance},
                                        {"rotation", o.rotation_tolerance},
                                        {"constraint", o.constraint_tolerance}};
  return o;
}

Normalization parse_normalization(const std::string& s) {
  if (s == "scaled") return Normalization::Scaled;
  if (s == "raw") return Normalization::Raw;
  bad("normalization: expected 'scaled' or 'raw'");
}

// ---- subcommands ----

void surface_show(Context& c) {
  allow_keys(c.cfg, "config", {"surface", "output_dir"});
  const SurfacePatch s = load_surface(c);
  const EllipticityReport e = ellipticity_check(s);
  c.report.results = {{"area", io::number(s.area())},
                      {"is_plate", s.is_plate()},
                      {"max_abs_curvature", io::number(s.max_abs_curvature())},
                      {"total_squared_curvature", io::number(s.total_squared_curvature())},
                      {"ellipticity", io::to_json(e)},
                      {"nodes", s.grid().size()},
                      {"quadrature_points", s.quadrature().size()}};
  Plot k1{"kappa1.dat", {}, {}}, k2{"kappa2.dat", {}, {}};
  for (int i = 0; i < s.grid().size(); ++i) {
    k1.x.push_back(i);
    k1.y.push_back(s.node_forms(i).kappa1);
    k2.x.push_back(i);
    k2.y.push_back(s.node_forms(i).kappa2);
  }
  c.report.plots = {k1, k2};
}

void material_check(Context& c) {
  allow_keys(c.cfg, "config", {"material", "samples", "seed", "output_dir"});
  const Material m = load_material(c);
  const int samples = int_at(c.cfg, "samples", 1000);
  if (samples < 1) bad("samples: expected a positive integer");
  std::uint64_t seed = c.cfg.value("seed", std::uint64_t{12345});
  if (c.opts.seed) seed = *c.opts.seed;
  c.report.config_echo["samples"] = samples;
  c.report.config_echo["seed"] = seed;
  const MaterialAudit a = audit_material(m, samples, seed);
  c.report.results = {{"samples", a.samples},
                      {"frame_indifference", io::number(a.frame_indifference)},
                      {"rotation_energy", io::number(a.rotation_energy)},
                      {"nondegeneracy", io::number(a.nondegeneracy)},
                      {"q2_mismatch", io::number(a.q2_mismatch)},
                      {"q3_hessian", io::number(a.q3_hessian)},
                      {"q3_identity", io::number(q3(m, Mat3::Identity()))},
                      {"q2_identity", io::number(q2(m, Mat2::Identity()))}};
}

void energy_eval(Context& c) {
  allow_keys(c.cfg, "config",
             {"surface", "material", "functional", "h", "ansatz", "force", "y", "V", "B", "hierarchy", "beta",
              "normalization", "tolerances", "thickness_points", "output_dir"});
  const SurfacePatch s = load_surface(c);
  const Material m = load_material(c);
  const std::string functional = c.cfg.value("functional", "thin_shell");
  json& echo = c.report.config_echo;
  echo["functional"] = functional;
  json result;
  if (functional == "thin_shell" || functional == "total") {
    const double h = number_at(c.cfg, "h", 0.0);
    if (!(h > 0.0)) bad("h: expected a positive number");
    echo["h"] = h;
    const ShellQuadrature q = load_shell_quadrature(c);
    json ae;
    const ThinShellAnsatz a = load_ansatz(c, s, m, c.cfg.value("ansatz", json("identity")), ae, h);
    echo["ansatz"] = ae;
    if (functional == "thin_shell") {
      result = io::to_json(thin_shell_energy(s, m, a, h, q));
    } else {
      const json fj = c.cfg.value("force", json::object());
      allow_keys(fj, "force", {"profile", "alpha"});
      ForceSpec f{load_field(s, fj.value("profile", json("zero"))), number_at(fj, "alpha", 0.0)};
      echo["force"] = {{"profile", field_echo(fj.value("profile", json("zero")))}, {"alpha", f.alpha}};
      result = io::to_json(total_energy(s, m, a, h, f, q));
    }
  } else if (functional == "kirchhoff") {
    const FunctionalOptions o = load_functional_options(c);
    const std::string norm = c.cfg.value("normalization", "scaled");
    echo["normalization"] = norm;
    echo["y"] = field_echo(require(c.cfg, "y"));
    result = io::to_json(kirchhoff_energy(s, m, load_field(s, c.cfg["y"]), parse_normalization(norm), o));
    result["normalization"] = norm;
  } else if (functional == "vonkarman" || functional == "linear_bending") {
    const FunctionalOptions o = load_functional_options(c);
    echo["V"] = field_echo(require(c.cfg, "V"));
    const VectorField V = load_field(s, c.cfg["V"]);
    if (functional == "vonkarman") {
      const json bj = c.cfg.value("B", json("zero"));
      echo["B"] = bj;
      result = io::to_json(vonkarman_energy(s, m, V, io::strain_from_json(s, bj), o));
    } else {
      result = io::to_json(linear_bending_energy(s, m, V, o));
    }
  } else if (functional == "conjecture") {
    const FunctionalOptions o = load_functional_options(c);
    const double beta = number_at(c.cfg, "beta", 0.0);
    echo["beta"] = beta;
    const json& hj = require(c.cfg, "hierarchy");
    if (!hj.is_array()) bad("hierarchy: expected an array of fields");
    json he = json::array();
    DisplacementHierarchy H;
    for (const auto& f : hj) {
      he.push_back(field_echo(f));
      H.push_back(load_field(s, f));
    }
    echo["hierarchy"] = he;
    result = io::to_json(conjecture_energy(s, m, H, beta, o));
  } else {
    bad("functional: expected thin_shell, total, kirchhoff, vonkarman, linear_bending or conjecture");
  }
  result["functional"] = functional;
  c.report.results = result;
}

void isometry_solve(Context& c) {
  allow_keys(c.cfg, "config",
             {"surface", "count", "bc", "fields", "hierarchy", "eps", "plate_check", "emit_modes", "output_dir"});
  const SurfacePatch s = load_surface(c);
  json& echo = c.report.config_echo;
  json& res = c.report.results;
  const int count = int_at(c.cfg, "count", 8);
  if (count < 0) bad("count: expected a nonnegative integer");
  const std::string bc = c.cfg.value("bc", "free");
  const bool emit_modes = c.cfg.value("emit_modes", false);
  echo["count"] = count;
  echo["bc"] = bc;
  echo["emit_modes"] = emit_modes;
  if (count > 0) {
    const IsometryModes modes = solve_infinitesimal_isometries(s, count, parse_bc(bc));
    json in_v1 = json::array();
    for (bool b : modes.in_v1) in_v1.push_back(b);
    res["modes"] = {{"quotients", number_array(modes.quotients)},
                    {"in_V1", in_v1},
                    {"tolerance", io::number(modes.tolerance)},
                    {"rigid_quotients", number_array(modes.rigid_quotients)}};
    if (emit_modes) {
      json fields = json::array();
      for (const auto& f : modes.modes) fields.push_back(io::to_json(f));
      res["modes"]["fields"] = fields;
    }
    Table t{{"index", "quotient", "in_V1"}, {}};
    Plot p{"quotients.dat", {}, {}};
    for (size_t k = 0; k < modes.quotients.size(); ++k) {
      t.rows.push_back({double(k), modes.quotients[k], modes.in_v1[k] ? 1.0 : 0.0});
      p.x.push_back(double(k));
      p.y.push_back(modes.quotients[k]);
    }
    c.report.tables.push_back(t);
    c.report.plots.push_back(p);
  }
  if (c.cfg.contains("fields")) {
    const json& fj = c.cfg["fields"];
    if (!fj.is_array()) bad("fields: expected an array of fields");
    const StrainForm form = assemble_strain_form(s);
    std::vector<double> q;
    json fe = json::array();
    for (const auto& f : fj) {
      fe.push_back(field_echo(f));
      q.push_back(rayleigh_quotient(form, load_field(s, f).nodal_values()));
    }
    echo["fields"] = fe;
    res["field_quotients"] = number_array(q);
  }
  if (c.cfg.contains("hierarchy")) {
    const json& hj = c.cfg["hierarchy"];
    if (!hj.is_array()) bad("hierarchy: expected an array of fields");
    IsometryOrderOptions o;
    if (c.cfg.contains("eps")) o.eps = number_list(c.cfg, "eps");
    DisplacementHierarchy H;
    json he = json::array();
    for (const auto& f : hj) {
      he.push_back(field_echo(f));
      H.push_back(load_field(s, f));
    }
    echo["hierarchy"] = he;
    const IsometryOrderReport r = isometry_order(s, H, o);
    echo["eps"] = number_array(r.eps);
    res["isometry_order"] = io::to_json(r);
    c.report.plots.push_back({"isometry_defect.dat", r.eps, r.defects});
  }
  if (c.cfg.contains("plate_check")) {
    echo["plate_check"] = field_echo(c.cfg["plate_check"]);
    res["plate_check"] = io::to_json(plate_second_order_check(s, load_field(s, c.cfg["plate_check"])));
  }
}

std::string bound_text(double x) {
  if (std::isinf(x)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

void classify(Context& c) {
  json& echo = c.report.config_echo;
  echo = json::object();
  double beta = 0.0;
  if (c.opts.alpha) {
    beta = alpha_to_beta(*c.opts.alpha);
    echo["alpha"] = *c.opts.alpha;
    c.report.results["alpha"] = *c.opts.alpha;
    std::cout << "alpha = " << bound_text(*c.opts.alpha) << " -> beta = " << bound_text(beta) << "\n";
  } else {
    beta = *c.opts.beta;
  }
  echo["beta"] = beta;
  c.report.results["beta"] = beta;
  if (c.opts.alpha && !(beta > 2.0)) {
    // beta <= 2 lies below the hierarchy of isometry orders.
    c.report.results["classification"] = nullptr;
    std::cout << "beta <= 2: no hierarchy order\n";
    return;
  }
  const ScalingOrder o = order_for_scaling(beta);
  c.report.results["classification"] = io::to_json(o);
  std::cout << "N = " << o.order << ", bracket [" << bound_text(o.beta_lower) << ", " << bound_text(o.beta_upper)
            << ")\n";
}

void match_run(Context& c) {
  allow_keys(c.cfg, "config", {"surface", "V", "eps_list", "options", "output_dir"});
  const SurfacePatch s = load_surface(c);
  json& echo = c.report.config_echo;
  echo["V"] = field_echo(require(c.cfg, "V"));
  const std::vector<double> eps = number_list(c.cfg, "eps_list");
  echo["eps_list"] = number_array(eps);
  const json oj = c.cfg.value("options", json::object());
  allow_keys(oj, "options", {"tolerance", "max_iterations", "max_halvings", "v1_tolerance"});
  MatchingOptions o;
  o.tolerance = number_at(oj, "tolerance", o.tolerance);
  o.max_iterations = int_at(oj, "max_iterations", o.max_iterations);
  o.max_halvings = int_at(oj, "max_halvings", o.max_halvings);
  o.v1_tolerance = number_at(oj, "v1_tolerance", o.v1_tolerance);
  echo["options"] = {{"tolerance", o.tolerance},
                     {"max_iterations", o.max_iterations},
                     {"max_halvings", o.max_halvings},
                     {"v1_tolerance", o.v1_tolerance}};
  const VectorField V = load_field(s, c.cfg["V"]);
  const MatchingResult r = matching_study(s, V, eps, o);
  c.report.results = io::to_json(r);
  Table t{{"eps", "defect", "iterations", "sup_norm", "c2_norm"}, {}};
  Plot p{"sup_norm.dat", {}, {}};
  for (const auto& sol : r.solutions) {
    t.rows.push_back({sol.eps, sol.defect, double(sol.iterations), sol.sup_norm, sol.c2_norm});
    p.x.push_back(sol.eps);
    p.y.push_back(sol.sup_norm);
  }
  c.report.tables.push_back(t);
  c.report.plots.push_back(p);
}

std::optional<ScalingTarget> load_target(Context& c, const SurfacePatch& s, const Material& m, const Recovery& r,
                                         const FunctionalOptions& fo) {
  if (!c.cfg.contains("target")) return std::nullopt;
  const json& tj = c.cfg["target"];
  allow_keys(tj, "target", {"functional", "normalization", "value", "tolerance"});
  const std::string f = require(tj, "functional").get<std::string>();
  json& echo = c.report.config_echo["target"];
  echo = {{"functional", f}};
  ScalingTarget t{f, r.inputs.beta, 0.0};
  if (tj.contains("value")) {
    t.value = number_at(tj, "value", 0.0);
    echo["value"] = t.value;
  } else if (f == "kirchhoff") {
    const std::string norm = tj.value("normalization", "scaled");
    echo["normalization"] = norm;
    t.value = kirchhoff_energy(s, m, r.inputs.y, parse_normalization(norm), fo).value;
  } else if (f == "vonkarman") {
    const StrainField B = r.w ? StrainField::sym_gradient(*r.w) : StrainField::zero(s);
    t.value = vonkarman_energy(s, m, r.inputs.V, B, fo).value;
  } else if (f == "linear_bending") {
    t.value = linear_bending_energy(s, m, r.inputs.V, fo).value;
  } else {
    bad("target.functional: expected kirchhoff, vonkarman or linear_bending (or an explicit value)");
  }
  return t;
}

int thread_count(Context& c) {
  const int t = c.opts.threads ? *c.opts.threads : int_at(c.cfg, "threads", 1);
  if (t < 1) bad("threads: expected a positive integer");
  return t;
}

void scaling_run(Context& c) {
  allow_keys(c.cfg, "config",
             {"surface", "material", "regime", "inputs", "h_list", "target", "tolerances", "thickness_points",
              "threads", "output_dir"});
  const SurfacePatch s = load_surface(c);
  const Material m = load_material(c);
  const FunctionalOptions fo = load_functional_options(c);
  ScalingOptions so;
  so.quad = load_shell_quadrature(c);
  so.threads = thread_count(c);
  const std::vector<double> hs = number_list(c.cfg, "h_list");
  c.report.config_echo["h_list"] = number_array(hs);
  const Recovery r = load_recovery(c, s, c.cfg, c.report.config_echo);
  const std::optional<ScalingTarget> target = load_target(c, s, m, r, fo);
  const ScalingReport rep =
      scaling_study(s, m, [&](double h) { return build_recovery_sequence(s, m, r.inputs, h); }, hs, target, so);
  c.report.results = io::to_json(rep);
  c.report.results["beta"] = r.inputs.beta;
  // Which prefactor of I2 the thickness limit selects: raw or 1/24.
  if (target && rep.limit && target->functional == "kirchhoff" && !c.cfg["target"].contains("value")) {
    const double tol = number_at(c.cfg["target"], "tolerance", 0.02);
    c.report.config_echo["target"]["tolerance"] = tol;
    const double raw = kirchhoff_energy(s, m, r.inputs.y, Normalization::Raw, fo).value;
    json modes = json::object();
    std::vector<std::string> matches;
    for (const auto& [name, value] : {std::pair{"raw", raw}, std::pair{"scaled", raw / 24.0}}) {
      const double err = std::abs(rep.limit->extrapolated - value) / std::abs(value);
      modes[name] = {{"value", io::number(value)}, {"relative_error", io::number(err)}};
      if (err <= tol) matches.push_back(name);
    }
    modes["tolerance"] = tol;
    modes["selected"] = matches.size() == 1 ? json(matches.front()) : json(nullptr);
    c.report.results["normalization"] = modes;
  }
  Table t{{"h", "E_h", "E_h_over_h_beta", "stretching", "bending"}, {}};
  Plot pe{"energy.dat", {}, {}}, ps{"scaled_energy.dat", {}, {}};
  for (const auto& row : rep.rows) {
    t.rows.push_back({row.h, row.energy, row.scaled, row.stretching, row.bending});
    pe.x.push_back(row.h);
    pe.y.push_back(row.energy);
    ps.x.push_back(row.h);
    ps.y.push_back(row.scaled);
  }
  c.report.tables.push_back(t);
  c.report.plots = {pe, ps};
}

void equipartition_run(Context& c) {
  allow_keys(c.cfg, "config",
             {"surface", "material", "regime", "inputs", "h_list", "thickness_points", "output_dir"});
  const SurfacePatch s = load_surface(c);
  const Material m = load_material(c);
  const ShellQuadrature q = load_shell_quadrature(c);
  const std::vector<double> hs = number_list(c.cfg, "h_list");
  c.report.config_echo["h_list"] = number_array(hs);
  const Recovery r = load_recovery(c, s, c.cfg, c.report.config_echo);
  json rows = json::array();
  Table t{{"h", "E_h", "E_h_over_h_beta", "stretching", "bending"}, {}};
  Plot ps{"stretching.dat", {}, {}}, pb{"bending.dat", {}, {}};
  for (double h : hs) {
    const EquipartitionReport e = equipartition_report(s, m, build_recovery_sequence(s, m, r.inputs, h), h, q);
    rows.push_back(io::to_json(e));
    t.rows.push_back({h, e.energy, e.energy / std::pow(h, r.inputs.beta), e.stretching, e.bending});
    ps.x.push_back(h);
    ps.y.push_back(e.stretching);
    pb.x.push_back(h);
    pb.y.push_back(e.bending);
  }
  c.report.results = {{"rows", rows}, {"beta", r.inputs.beta}};
  c.report.tables.push_back(t);
  c.report.plots = {ps, pb};
}

using Handler = void (*)(Context&);

int execute(const std::string& name, Handler handler, const Options& opts) {
  Report report;
  json cfg = json::object();
  fs::path out = opts.out;
  int code = 0;
  try {
    if (!opts.config.empty()) {
      cfg = io::read_json(opts.config);
      if (!cfg.is_object()) bad("config: expected a JSON object");
      // A resolved config carries its subcommand; replaying it elsewhere is an error.
      if (cfg.contains("subcommand")) {
        if (cfg["subcommand"] != name) bad("config: written for subcommand " + cfg["subcommand"].dump());
        cfg.erase("subcommand");
      }
    }
    if (out.empty()) out = cfg.value("output_dir", "out");
    report.config_echo = json{{"subcommand", name}};
    Context ctx{opts, cfg, report};
    handler(ctx);
    ctx.report.config_echo["subcommand"] = name;
  } catch (const Error& e) {
    report.results = {{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
    report.tables.clear();
    report.plots.clear();
    std::cerr << "shellhier " << name << ": " << e.what() << "\n";
    code = is_solver_failure(e.code()) ? 2 : 1;
  } catch (const json::exception& e) {
    report.results = {{"error", {{"code", "BadConfig"}, {"message", e.what()}}}};
    report.tables.clear();
    report.plots.clear();
    std::cerr << "shellhier " << name << ": " << e.what() << "\n";
    code = 1;
  } catch (const std::exception& e) {
    report.results = {{"error", {{"code", "SolverFailure"}, {"message", e.what()}}}};
    report.tables.clear();
    report.plots.clear();
    std::cerr << "shellhier " << name << ": " << e.what() << "\n";
    code = 2;
  }
  if (out.empty()) return code;
  try {
    for (const auto& p : emit_report(report, out))
      if (opts.verbose) std::cerr << "shellhier: wrote " << p.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "shellhier " << name << ": " << e.what() << "\n";
    return code == 0 ? 1 : code;
  }
  return code;
}

}  // namespace

std::vector<fs::path> emit_report(const Report& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<fs::path> written;
  if (!report.config_echo.is_null()) {
    io::write_json(dir / "config.resolved.json", report.config_echo);
    written.push_back(dir / "config.resolved.json");
  }
  const json doc = {{"schema_version", io::kSchemaVersion},
                    {"tool_version", SHELLHIER_VERSION},
                    {"config_echo", report.config_echo},
                    {"results", report.results}};
  io::write_json(dir / "report.json", doc);
  written.push_back(dir / "report.json");
  for (size_t k = 0; k < report.tables.size(); ++k) {
    const fs::path p = dir / (k == 0 ? std::string("data.csv") : "data_" + std::to_string(k) + ".csv");
    io::write_csv(p, report.tables[k].header, report.tables[k].rows);
    written.push_back(p);
  }
  for (const auto& plot : report.plots) {
    io::write_plot(dir / plot.name, plot.x, plot.y);
    written.push_back(dir / plot.name);
  }
  return written;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Thin-shell energy hierarchies: geometry, limit functionals and scaling studies", "shellhier"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SHELLHIER_VERSION);
  Options opts;

  struct Leaf {
    std::string name;
    CLI::App* app;
    Handler handler;
  };
  std::vector<Leaf> leaves;

  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opts.config, "JSON configuration file")->check(CLI::ExistingFile);
    if (needs_config) c->required();
    sub->add_option("--out", opts.out, "output directory (default: config output_dir, else ./out)");
    sub->add_option("--grid", opts.grid, "override the surface grid (N x N)")->check(CLI::Range(8, 4096));
    sub->add_option("--quad", opts.quad, "override the surface quadrature order")->check(CLI::Range(1, 12));
    sub->add_option("--seed", opts.seed, "random seed for sampled checks");
    sub->add_option("--threads", opts.threads, "concurrent study cases")->check(CLI::PositiveNumber);
    sub->add_flag("-v,--verbose", opts.verbose, "progress on stderr");
  };
  auto group = [&](const std::string& name, const std::string& verb, const std::string& help, Handler h) {
    CLI::App* top = app.add_subcommand(name, help);
    top->require_subcommand(1);
    CLI::App* leaf = top->add_subcommand(verb, help);
    common(leaf, true);
    leaves.push_back({name + " " + verb, leaf, h});
  };
  group("surface", "show", "fundamental forms, area and ellipticity of a surface", surface_show);
  group("material", "check", "sampled checks of the stored energy", material_check);
  group("energy", "eval", "evaluate a thin-shell or limit functional", energy_eval);
  group("isometry", "solve", "infinitesimal isometries, isometry order and plate checks", isometry_solve);
  group("match", "run", "exact isometries matching a first-order isometry", match_run);
  group("scaling", "run", "energy scaling study over a thickness sweep", scaling_run);
  group("equipartition", "run", "stretching and bending split over a thickness sweep", equipartition_run);

  CLI::App* cls = app.add_subcommand("classify", "regime of an energy scaling exponent");
  common(cls, false);
  auto* ob = cls->add_option("--beta", opts.beta, "energy scaling exponent");
  auto* oa = cls->add_option("--alpha", opts.alpha, "force scaling exponent");
  ob->excludes(oa);
  leaves.push_back({"classify", cls, classify});

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "shellhier: " << e.what() << "\n" << kGrammar << "\n";
    return 1;
  }
  if (cls->parsed() && !opts.beta && !opts.alpha) {
    std::cerr << "shellhier: classify needs --beta or --alpha\n" << kGrammar << "\n";
    return 1;
  }
  for (const auto& leaf : leaves)
    if (leaf.app->parsed()) {
      // classify prints to stdout and writes files only when asked.
      if (leaf.handler == classify && opts.out.empty() && opts.config.empty()) {
        Options quiet = opts;
        Report report;
        Context ctx{quiet, json::object(), report};
        try {
          classify(ctx);
        } catch (const Error& e) {
          std::cerr << "shellhier classify: " << e.what() << "\n";
          return is_solver_failure(e.code()) ? 2 : 1;
        }
        return 0;
      }
      return execute(leaf.name, leaf.handler, opts);
    }
  std::cerr << kGrammar << "\n";
  return 1;
}

}  // namespace shellhier::cli
