#include "shellhier/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "shellhier/errors.hpp"
#include "shellhier/field.hpp"

namespace shellhier {

namespace {

constexpr double kPi = std::numbers::pi;

struct FamilyName {
  std::string operator()(const PlateParams&) const { return "plate"; }
  std::string operator()(const CylinderParams&) const { return "cylinder"; }
  std::string operator()(const SphericalCapParams&) const { return "spherical_cap"; }
  std::string operator()(const GraphParams&) const { return "graph"; }
  std::string operator()(const RevolutionParams&) const { return "revolution"; }
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::BadDescriptor, what);
}

void validate(const SurfaceDescriptor& d) {
  require(d.n1 >= 8 && d.n2 >= 8, "grid must be at least 8x8");
  require(d.fd_order == 2 || d.fd_order == 4 || d.fd_order == 6, "fd_order must be 2, 4 or 6");
  require(d.quad_order >= 1 && d.quad_order <= 12, "quad_order must be in [1, 12]");
  require(d.orientation == 1 || d.orientation == -1, "orientation must be +1 or -1");
  if (const auto* c = std::get_if<CylinderParams>(&d.family)) {
    require(c->radius > 0.0, "cylinder radius must be positive");
    require(c->arc > 0.0 && c->arc <= 2.0 * kPi, "cylinder arc must be in (0, 2 pi]");
    require(c->length > 0.0, "cylinder length must be positive");
  } else if (const auto* s = std::get_if<SphericalCapParams>(&d.family)) {
    require(s->radius > 0.0, "cap radius must be positive");
    if (s->chart == CapChart::Square) {
      require(s->polar_angle > 0.0 && s->polar_angle < kPi / 2, "square cap chart needs polar angle in (0, pi/2)");
    } else {
      require(s->polar_angle > 0.0 && s->polar_angle < kPi, "cap polar angle must be in (0, pi)");
      require(s->inner_angle > 0.0 && s->inner_angle < s->polar_angle,
              "polar cap chart needs 0 < inner_angle < polar_angle");
    }
  } else if (const auto* r = std::get_if<RevolutionParams>(&d.family)) {
    require(r->minor_radius > 0.0 && r->major_radius > r->minor_radius,
            "revolution needs major_radius > minor_radius > 0");
  }
  if (d.domain) require(d.domain->u1 > d.domain->u0 && d.domain->v1 > d.domain->v0, "empty parameter domain");
  const bool derived_domain = std::holds_alternative<CylinderParams>(d.family) ||
                              std::holds_alternative<SphericalCapParams>(d.family);
  if (derived_domain && d.domain) {
    SurfaceDescriptor bare = d;
    bare.domain.reset();
    const Domain r = resolve_domain(bare);
    const double tol = 1e-12 * std::max({1.0, std::abs(r.u1), std::abs(r.v1)});
    require(std::abs(r.u0 - d.domain->u0) <= tol && std::abs(r.u1 - d.domain->u1) <= tol &&
                std::abs(r.v0 - d.domain->v0) <= tol && std::abs(r.v1 - d.domain->v1) <= tol,
            "domain of this family is derived from its parameters and must not be overridden");
  }
}

Mat2 inverse_sqrt(const Mat2& g) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(g);
  const Vec2 s = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

std::string family_name(const FamilyParams& family) { return std::visit(FamilyName{}, family); }

std::array<Jet, 3> chart_point(const FamilyParams& family, const Jet& u, const Jet& v) {
  if (std::holds_alternative<PlateParams>(family)) return {u, v, Jet(0.0)};
  if (const auto* c = std::get_if<CylinderParams>(&family)) {
    const double rho = c->radius;
    const Jet phi = u * Jet(1.0 / rho);
    return {rho * cos(phi), rho * sin(phi), v};
  }
  if (const auto* s = std::get_if<SphericalCapParams>(&family)) {
    const double rho = s->radius;
    if (s->chart == CapChart::Polar) {
      const Jet st = sin(u);
      return {rho * st * cos(v), rho * st * sin(v), rho * cos(u)};
    }
    const Jet x = tan(u), y = tan(v);
    const Jet inv = Jet(rho) / sqrt(x * x + y * y + Jet(1.0));
    return {x * inv, y * inv, inv};
  }
  if (const auto* g = std::get_if<GraphParams>(&family)) {
    return {u, v, 0.5 * (g->a * u * u + 2.0 * g->b * u * v + g->c * v * v)};
  }
  const auto& r = std::get<RevolutionParams>(family);
  const Jet ring = Jet(r.major_radius) + r.minor_radius * cos(v);
  return {ring * cos(u), ring * sin(u), r.minor_radius * sin(v)};
}

Domain resolve_domain(const SurfaceDescriptor& d) {
  if (const auto* c = std::get_if<CylinderParams>(&d.family)) return {0.0, c->radius * c->arc, 0.0, c->length};
  if (const auto* s = std::get_if<SphericalCapParams>(&d.family)) {
    if (s->chart == CapChart::Polar) return {s->inner_angle, s->polar_angle, 0.0, 2.0 * kPi};
    const double alpha = std::atan(std::tan(s->polar_angle) / std::sqrt(2.0));
    return {-alpha, alpha, -alpha, alpha};
  }
  if (d.domain) return *d.domain;
  if (std::holds_alternative<GraphParams>(d.family)) return {-0.5, 0.5, -0.5, 0.5};
  if (std::holds_alternative<RevolutionParams>(d.family)) return {0.0, kPi / 2, -kPi / 4, kPi / 4};
  return {0.0, 1.0, 0.0, 1.0};
}

FundamentalForms forms_from_jet(const VecJet& r, int orientation) {
  FundamentalForms f;
  f.a1 = r.du;
  f.a2 = r.dv;
  const Vec3 c = f.a1.cross(f.a2);
  const double len = c.norm();
  if (!(len > 1e-14 * std::max(1.0, f.a1.norm() * f.a2.norm())))
    throw Error(ErrorCode::DegenerateChart, "chart is not an immersion");
  f.n = (orientation >= 0 ? 1.0 : -1.0) * c / len;
  f.g << f.a1.dot(f.a1), f.a1.dot(f.a2), f.a1.dot(f.a2), f.a2.dot(f.a2);
  f.area_element = std::sqrt(f.g.determinant());
  // a_i . d_j n = -r_ij . n since a_i . n = 0.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) f.second(i, j) = -r.dd(i, j).dot(f.n);
  f.second = sym(f.second);
  f.shape = f.g.inverse() * f.second;
  for (int j = 0; j < 2; ++j) f.dn[j] = f.shape(0, j) * f.a1 + f.shape(1, j) * f.a2;
  f.ortho = inverse_sqrt(f.g);
  Eigen::SelfAdjointEigenSolver<Mat2> es(f.to_orthonormal(f.second), Eigen::EigenvaluesOnly);
  f.kappa1 = es.eigenvalues()(0);
  f.kappa2 = es.eigenvalues()(1);
  return f;
}

SurfacePatch SurfacePatch::build(const SurfaceDescriptor& descriptor) {
  validate(descriptor);
  auto data = std::make_shared<Data>();
  data->descriptor = descriptor;
  const Domain domain = resolve_domain(descriptor);
  data->grid = Grid(domain, descriptor.n1, descriptor.n2);
  data->ops = DiffOps::build(data->grid, descriptor.fd_order);
  const Grid& grid = data->grid;
  const int nn = grid.size();
  const bool analytic = descriptor.derivative_mode == DerivativeMode::Analytic;

  data->node_jets.resize(nn);
  for (int i = 0; i < grid.n1(); ++i)
    for (int j = 0; j < grid.n2(); ++j)
      data->node_jets[grid.index(i, j)] =
          pack(chart_point(descriptor.family, Jet::var_u(grid.u(i)), Jet::var_v(grid.v(j))));

  if (!analytic) {
    NodalVec x(nn, 3);
    for (int k = 0; k < nn; ++k) x.row(k) = data->node_jets[k].val.transpose();
    const DiffOps& D = data->ops;
    const NodalVec xu = D.du * x, xv = D.dv * x, xuu = D.duu * x, xuv = D.duv * x, xvv = D.dvv * x;
    for (int k = 0; k < nn; ++k) {
      VecJet& jet = data->node_jets[k];
      jet.du = xu.row(k).transpose();
      jet.dv = xv.row(k).transpose();
      jet.duu = xuu.row(k).transpose();
      jet.duv = xuv.row(k).transpose();
      jet.dvv = xvv.row(k).transpose();
    }
  }

  data->node_forms.resize(nn);
  for (int k = 0; k < nn; ++k) {
    try {
      data->node_forms[k] = forms_from_jet(data->node_jets[k], descriptor.orientation);
    } catch (const Error&) {
      throw Error(ErrorCode::DegenerateChart, "immersion check failed at node " + std::to_string(k));
    }
    const auto& f = data->node_forms[k];
    data->max_abs_kappa = std::max({data->max_abs_kappa, std::abs(f.kappa1), std::abs(f.kappa2)});
  }

  const GaussRule rule = gauss_legendre(descriptor.quad_order);
  const int q = descriptor.quad_order;
  data->quad.reserve(static_cast<size_t>(grid.n1() - 1) * (grid.n2() - 1) * q * q);
  for (int i = 0; i + 1 < grid.n1(); ++i) {
    for (int j = 0; j + 1 < grid.n2(); ++j) {
      for (int a = 0; a < q; ++a) {
        for (int b = 0; b < q; ++b) {
          QuadPoint p;
          p.u = grid.u(i) + 0.5 * (1.0 + rule.x[a]) * grid.du();
          p.v = grid.v(j) + 0.5 * (1.0 + rule.x[b]) * grid.dv();
          p.weight = 0.25 * rule.w[a] * rule.w[b] * grid.du() * grid.dv();
          p.chart = analytic ? pack(chart_point(descriptor.family, Jet::var_u(p.u), Jet::var_v(p.v)))
                             : interpolate_jets(grid, data->node_jets, p.u, p.v);
          p.forms = forms_from_jet(p.chart, descriptor.orientation);
          data->quad.push_back(std::move(p));
        }
      }
    }
  }
  CompensatedSum area, sq_curv;
  for (const auto& p : data->quad) {
    const double w = p.weight * p.forms.area_element;
    area.add(w);
    sq_curv.add(w * (p.forms.kappa1 * p.forms.kappa1 + p.forms.kappa2 * p.forms.kappa2));
  }
  data->area = area.value();
  data->total_sq_curv = sq_curv.value();

  SurfacePatch patch;
  patch.data_ = std::move(data);
  return patch;
}

NodalVec SurfacePatch::node_positions() const {
  NodalVec x(grid().size(), 3);
  for (int k = 0; k < grid().size(); ++k) x.row(k) = data_->node_jets[k].val.transpose();
  return x;
}

VecJet SurfacePatch::chart(double u, double v) const {
  if (descriptor().derivative_mode == DerivativeMode::Analytic)
    return pack(chart_point(descriptor().family, Jet::var_u(u), Jet::var_v(v)));
  return interpolate_jets(grid(), data_->node_jets, u, v);
}

FundamentalForms frames(const SurfacePatch& surface, double u, double v) {
  if (!surface.grid().domain().contains(u, v))
    throw Error(ErrorCode::OutOfDomain, "point outside the parameter domain");
  return forms_from_jet(surface.chart(u, v), surface.orientation());
}

double surface_integral(const SurfacePatch& surface, std::span<const double> values) {
  const auto& quad = surface.quadrature();
  if (values.size() != quad.size())
    throw Error(ErrorCode::BadConfig, "surface_integral: expected one value per quadrature point");
  CompensatedSum sum;
  for (size_t k = 0; k < quad.size(); ++k) sum.add(quad[k].weight * quad[k].forms.area_element * values[k]);
  return sum.value();
}

EllipticityReport ellipticity_check(const SurfacePatch& surface, double threshold) {
  EllipticityReport rep;
  rep.min_kappa = std::numeric_limits<double>::infinity();
  rep.max_kappa = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < surface.grid().size(); ++k) {
    const auto& f = surface.node_forms(k);
    rep.min_kappa = std::min(rep.min_kappa, f.kappa1);
    rep.max_kappa = std::max(rep.max_kappa, f.kappa2);
  }
  if (rep.min_kappa >= threshold) {
    rep.sign = 1;
  } else if (rep.max_kappa <= -threshold) {
    rep.sign = -1;
  }
  rep.is_elliptic = rep.sign != 0;
  if (rep.is_elliptic) {
    const double lo = std::min(std::abs(rep.min_kappa), std::abs(rep.max_kappa));
    const double hi = std::max(std::abs(rep.min_kappa), std::abs(rep.max_kappa));
    rep.constant = std::max(hi, 1.0 / lo);
  }
  return rep;
}

double tubular_volume_factor(const FundamentalForms& forms, double t) {
  return (1.0 + t * forms.kappa1) * (1.0 + t * forms.kappa2);
}

void check_tubular(const SurfacePatch& surface, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::TubularViolation, "thickness must be positive");
  if (!(h * surface.max_abs_curvature() < 1.0))
    throw Error(ErrorCode::TubularViolation, "h * max|kappa| must be below 1");
  for (const auto& q : surface.quadrature()) {
    if (!(tubular_volume_factor(q.forms, 0.5 * h) > 0.0 && tubular_volume_factor(q.forms, -0.5 * h) > 0.0))
      throw Error(ErrorCode::TubularViolation, "tubular volume factor is not positive");
  }
}

}  // namespace shellhier
