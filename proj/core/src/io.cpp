#include "shellhier/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "shellhier/errors.hpp"

namespace shellhier::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::BadConfig, what); }

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where + ": expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) bad(where + ": unknown key '" + k + "'");
}

double get_number(const json& j, const std::string& key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) bad(where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) bad(where + "." + key + ": expected an integer");
  return j.at(key).get<int>();
}

Vec3 get_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) bad(where + ": expected an array of 3 numbers");
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number()) bad(where + ": expected an array of 3 numbers");
    v[k] = j[k].get<double>();
  }
  return v;
}

std::array<Expression, 3> get_expressions(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) bad(where + ": expected 3 expressions");
  std::array<Expression, 3> out;
  for (int k = 0; k < 3; ++k) {
    if (j[k].is_number()) {
      out[k] = Expression::constant(j[k].get<double>());
    } else if (j[k].is_string()) {
      out[k] = Expression::parse(j[k].get<std::string>());
    } else {
      bad(where + ": expected expression strings");
    }
  }
  return out;
}

json vec(const Vec3& v) { return json::array({number(v[0]), number(v[1]), number(v[2])}); }

}  // namespace

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

SurfaceDescriptor surface_from_json(const json& j) {
  const std::string where = "surface";
  allow_keys(j, where, {"family", "params", "domain", "grid", "derivative_mode", "fd_order", "quad_order", "orientation"});
  if (!j.contains("family") || !j["family"].is_string()) bad(where + ".family: required string");
  const std::string family = j["family"];
  const json params = j.value("params", json::object());
  const std::string pw = where + ".params";
  SurfaceDescriptor d;
  if (family == "plate") {
    allow_keys(params, pw, {});
    d.family = PlateParams{};
  } else if (family == "cylinder") {
    allow_keys(params, pw, {"radius", "arc", "length"});
    CylinderParams c;
    c.radius = get_number(params, "radius", c.radius, pw);
    c.arc = get_number(params, "arc", c.arc, pw);
    c.length = get_number(params, "length", c.length, pw);
    d.family = c;
  } else if (family == "spherical_cap") {
    allow_keys(params, pw, {"radius", "polar_angle", "chart", "inner_angle"});
    SphericalCapParams c;
    c.radius = get_number(params, "radius", c.radius, pw);
    c.polar_angle = get_number(params, "polar_angle", c.polar_angle, pw);
    c.inner_angle = get_number(params, "inner_angle", c.inner_angle, pw);
    const std::string chart = params.value("chart", "square");
    if (chart == "square") {
      c.chart = CapChart::Square;
    } else if (chart == "polar") {
      c.chart = CapChart::Polar;
    } else {
      bad(pw + ".chart: expected 'square' or 'polar'");
    }
    d.family = c;
  } else if (family == "graph") {
    allow_keys(params, pw, {"a", "b", "c"});
    GraphParams g;
    g.a = get_number(params, "a", 0.0, pw);
    g.b = get_number(params, "b", 0.0, pw);
    g.c = get_number(params, "c", 0.0, pw);
    d.family = g;
  } else if (family == "revolution") {
    allow_keys(params, pw, {"major_radius", "minor_radius"});
    RevolutionParams r;
    r.major_radius = get_number(params, "major_radius", r.major_radius, pw);
    r.minor_radius = get_number(params, "minor_radius", r.minor_radius, pw);
    d.family = r;
  } else {
    throw Error(ErrorCode::BadDescriptor, "unknown surface family '" + family + "'");
  }
  if (j.contains("domain")) {
    const json& dj = j["domain"];
    allow_keys(dj, where + ".domain", {"u", "v"});
    auto pair = [&](const char* key) {
      if (!dj.contains(key) || !dj[key].is_array() || dj[key].size() != 2 || !dj[key][0].is_number() ||
          !dj[key][1].is_number())
        bad(where + ".domain." + key + ": expected [lo, hi]");
      return std::pair<double, double>(dj[key][0].get<double>(), dj[key][1].get<double>());
    };
    const auto [u0, u1] = pair("u");
    const auto [v0, v1] = pair("v");
    d.domain = Domain{u0, u1, v0, v1};
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (g.is_number_integer()) {
      d.n1 = d.n2 = g.get<int>();
    } else if (g.is_array() && g.size() == 2 && g[0].is_number_integer() && g[1].is_number_integer()) {
      d.n1 = g[0].get<int>();
      d.n2 = g[1].get<int>();
    } else {
      bad(where + ".grid: expected N or [n1, n2]");
    }
  }
  const std::string mode = j.value("derivative_mode", "analytic");
  if (mode == "analytic") {
    d.derivative_mode = DerivativeMode::Analytic;
  } else if (mode == "finite_difference") {
    d.derivative_mode = DerivativeMode::FiniteDifference;
  } else {
    bad(where + ".derivative_mode: expected 'analytic' or 'finite_difference'");
  }
  d.fd_order = get_int(j, "fd_order", d.fd_order, where);
  d.quad_order = get_int(j, "quad_order", d.quad_order, where);
  d.orientation = get_int(j, "orientation", d.orientation, where);
  return d;
}

json to_json(const SurfaceDescriptor& d) {
  json j;
  j["family"] = family_name(d.family);
  json p = json::object();
  if (const auto* c = std::get_if<CylinderParams>(&d.family)) {
    p = {{"radius", c->radius}, {"arc", c->arc}, {"length", c->length}};
  } else if (const auto* s = std::get_if<SphericalCapParams>(&d.family)) {
    p = {{"radius", s->radius},
         {"polar_angle", s->polar_angle},
         {"chart", s->chart == CapChart::Square ? "square" : "polar"},
         {"inner_angle", s->inner_angle}};
  } else if (const auto* g = std::get_if<GraphParams>(&d.family)) {
    p = {{"a", g->a}, {"b", g->b}, {"c", g->c}};
  } else if (const auto* r = std::get_if<RevolutionParams>(&d.family)) {
    p = {{"major_radius", r->major_radius}, {"minor_radius", r->minor_radius}};
  }
  j["params"] = p;
  const Domain dom = resolve_domain(d);
  j["domain"] = {{"u", {dom.u0, dom.u1}}, {"v", {dom.v0, dom.v1}}};
  j["grid"] = {d.n1, d.n2};
  j["derivative_mode"] = d.derivative_mode == DerivativeMode::Analytic ? "analytic" : "finite_difference";
  j["fd_order"] = d.fd_order;
  j["quad_order"] = d.quad_order;
  j["orientation"] = d.orientation;
  return j;
}

Material material_from_json(const json& j) {
  allow_keys(j, "material", {"mu", "lambda"});
  Material m;
  m.mu = get_number(j, "mu", m.mu, "material");
  m.lambda = get_number(j, "lambda", m.lambda, "material");
  m.validate();
  return m;
}

json to_json(const Material& m) { return {{"mu", m.mu}, {"lambda", m.lambda}}; }

VectorField field_from_json(const SurfacePatch& surface, const json& j) {
  if (j.is_string()) {
    const std::string s = j;
    if (s == "identity") return VectorField::identity(surface);
    if (s == "zero") return VectorField::zero(surface);
    bad("field: unknown keyword '" + s + "'");
  }
  if (j.is_array()) return VectorField::analytic(surface, get_expressions(j, "field"));
  allow_keys(j, "field", {"expr", "values", "rigid"});
  if (j.contains("expr")) return VectorField::analytic(surface, get_expressions(j["expr"], "field.expr"));
  if (j.contains("values")) {
    const json& v = j["values"];
    if (!v.is_array() || static_cast<int>(v.size()) != surface.grid().size())
      bad("field.values: expected one [x, y, z] per grid node");
    NodalVec x(surface.grid().size(), 3);
    for (int k = 0; k < surface.grid().size(); ++k) x.row(k) = get_vec3(v[k], "field.values").transpose();
    return VectorField::sampled(surface, std::move(x));
  }
  if (j.contains("rigid")) {
    const json& r = j["rigid"];
    allow_keys(r, "field.rigid", {"translation", "rotation"});
    const Vec3 b = r.contains("translation") ? get_vec3(r["translation"], "field.rigid.translation") : Vec3::Zero();
    const Vec3 e = r.contains("rotation") ? get_vec3(r["rotation"], "field.rigid.rotation") : Vec3::Zero();
    return VectorField::rigid(surface, b, e);
  }
  bad("field: expected 'expr', 'values' or 'rigid'");
}

json to_json(const VectorField& f) {
  if (f.expressions()) {
    const auto& e = *f.expressions();
    return {{"expr", {e[0].text(), e[1].text(), e[2].text()}}};
  }
  const NodalVec x = f.nodal_values();
  json values = json::array();
  for (int k = 0; k < x.rows(); ++k) values.push_back(vec(x.row(k).transpose()));
  return {{"values", values}};
}

StrainField strain_from_json(const SurfacePatch& surface, const json& j) {
  if (j.is_string() && j.get<std::string>() == "zero") return StrainField::zero(surface);
  if (j.is_array()) return StrainField::analytic(surface, get_expressions(j, "strain"));
  allow_keys(j, "strain", {"expr", "sym_gradient"});
  if (j.contains("expr")) return StrainField::analytic(surface, get_expressions(j["expr"], "strain.expr"));
  if (j.contains("sym_gradient")) return StrainField::sym_gradient(field_from_json(surface, j["sym_gradient"]));
  bad("strain: expected 'zero', expressions or 'sym_gradient'");
}

DisplacementHierarchy hierarchy_from_json(const SurfacePatch& surface, const json& j) {
  if (!j.is_array() || j.empty()) bad("hierarchy: expected a nonempty array of fields");
  DisplacementHierarchy H;
  for (const auto& f : j) H.push_back(field_from_json(surface, f));
  return H;
}

json to_json(const EnergyRecord& r) {
  json j = {{"value", number(r.value)},
            {"quadrature",
             {{"surface_points", r.surface_points},
              {"thickness_points", r.thickness_points},
              {"quad_order", r.quad_order}}},
            {"degenerate_gradient_points", r.degenerate_gradient_points}};
  json b = json::object();
  if (r.stretching) b["stretching"] = number(*r.stretching);
  if (r.bending) b["bending"] = number(*r.bending);
  j["breakdown"] = b;
  return j;
}

json to_json(const ConjectureRecord& r) {
  json norms = json::array();
  for (double x : r.constraint_norms) norms.push_back(number(x));
  return {{"value", number(r.value)},
          {"breakdown", {{"stretching", number(r.stretching)}, {"bending", number(r.bending)}}},
          {"order", r.order},
          {"regime", r.boundary ? "boundary" : "interior"},
          {"constraint_norms", norms}};
}

json to_json(const ScalingReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"h", number(row.h)},
                    {"E_h", number(row.energy)},
                    {"E_h_over_h_beta", number(row.scaled)},
                    {"stretching", number(row.stretching)},
                    {"bending", number(row.bending)}});
  json j = {{"rows", rows},
            {"beta_hat", number(r.beta_hat)},
            {"fit_residual", number(r.fit_residual)},
            {"fit_degenerate", r.fit_degenerate}};
  if (r.limit) {
    j["limit"] = {{"functional", r.limit->functional},
                  {"beta", number(r.limit->beta)},
                  {"extrapolated", number(r.limit->extrapolated)},
                  {"consistency", number(r.limit->consistency)},
                  {"target", number(r.limit->target)},
                  {"relative_error", number(r.limit->relative_error)}};
  }
  return j;
}

json to_json(const EquipartitionReport& r) {
  return {{"h", number(r.h)},
          {"stretching", number(r.stretching)},
          {"bending", number(r.bending)},
          {"E_h", number(r.energy)},
          {"q_stretching", number(r.q_stretching)},
          {"q_bending", number(r.q_bending)},
          {"heuristic_error", number(r.heuristic_error)}};
}

json to_json(const MatchingResult& r) {
  json sols = json::array();
  for (const auto& s : r.solutions) {
    json trace = json::array();
    for (double d : s.defect_trace) trace.push_back(number(d));
    sols.push_back({{"eps", number(s.eps)},
                    {"defect", number(s.defect)},
                    {"iterations", s.iterations},
                    {"defect_trace", trace},
                    {"sup_norm", number(s.sup_norm)},
                    {"c2_norm", number(s.c2_norm)},
                    {"projection_change", number(s.projection_change)}});
  }
  json ratios = json::array();
  for (double x : r.sup_ratios) ratios.push_back(number(x));
  return {{"solutions", sols}, {"sup_ratios", ratios}};
}

json to_json(const IsometryOrderReport& r) {
  json eps = json::array(), def = json::array();
  for (double x : r.eps) eps.push_back(number(x));
  for (double x : r.defects) def.push_back(number(x));
  return {{"order", r.order},
          {"eps", eps},
          {"defects", def},
          {"slope", number(r.slope)},
          {"fit_residual", number(r.fit_residual)},
          {"at_noise_floor", r.at_noise_floor}};
}

json to_json(const EllipticityReport& r) {
  return {{"is_elliptic", r.is_elliptic},
          {"C", number(r.constant)},
          {"min_kappa", number(r.min_kappa)},
          {"max_kappa", number(r.max_kappa)},
          {"sign", r.sign}};
}

json to_json(const PlateSecondOrderCheck& r) {
  return {{"in_V2", r.in_v2}, {"max_abs_det", number(r.max_abs_det)}, {"in_plane_strain", number(r.in_plane_strain)}};
}

json to_json(const ScalingOrder& r) {
  return {{"N", r.order}, {"beta_lower", number(r.beta_lower)}, {"beta_upper", number(r.beta_upper)}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream s;
  for (size_t i = 0; i < header.size(); ++i) s << (i ? "," : "") << header[i];
  s << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) s << (i ? "," : "") << format_double(row[i]);
    s << "\n";
  }
  write_text(path, s.str());
}

void write_plot(const std::filesystem::path& path, const std::vector<double>& x, const std::vector<double>& y) {
  std::ostringstream s;
  for (size_t i = 0; i < x.size() && i < y.size(); ++i) s << format_double(x[i]) << " " << format_double(y[i]) << "\n";
  write_text(path, s.str());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::BadConfig, path.string() + ": " + e.what());
  }
}

}  // namespace shellhier::io
