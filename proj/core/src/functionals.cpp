#include "shellhier/functionals.hpp"

#include <cmath>

#include "shellhier/errors.hpp"
#include "shellhier/experiments.hpp"
#include "shellhier/kinematics.hpp"

namespace shellhier {

ThinShellAnsatz ThinShellAnsatz::identity(const SurfacePatch& surface) {
  ThinShellAnsatz a;
  a.mid = VectorField::identity(surface);
  a.fiber.push_back([surface](double u, double v) {
    const FundamentalForms f = forms_from_jet(surface.chart(u, v), surface.orientation());
    return VecJet1(f.n, f.dn[0], f.dn[1]);
  });
  a.label = "identity";
  return a;
}

ThinShellAnsatz ThinShellAnsatz::kirchhoff_love(const VectorField& y) {
  ThinShellAnsatz a;
  a.mid = y;
  const int orientation = y.surface().orientation();
  a.fiber.push_back([y, orientation](double u, double v) {
    const NormalJet n = normal_at(y.jet(u, v), orientation);
    return VecJet1(n.n, n.dn[0], n.dn[1]);
  });
  a.label = "kirchhoff_love";
  return a;
}

ThinShellAnsatz ThinShellAnsatz::transformed(const Mat3& R, const Vec3& b) const {
  ThinShellAnsatz a;
  a.mid = mid.transformed(R, b);
  for (const auto& c : fiber)
    a.fiber.push_back([c, R](double u, double v) {
      const VecJet1 j = c(u, v);
      return VecJet1(R * j.val, R * j.du, R * j.dv);
    });
  a.label = label + " (transformed)";
  return a;
}

VecJet1 ThinShellAnsatz::coefficient(int k, double u, double v) const {
  if (k == 0) return VecJet1(mid.jet(u, v));
  if (k <= static_cast<int>(fiber.size())) return fiber[k - 1](u, v);
  return {};
}

namespace {

void check_ansatz(const ThinShellAnsatz& ansatz) {
  if (!ansatz.mid.valid()) throw Error(ErrorCode::BadConfig, "ansatz has no mid-surface field");
  if (ansatz.fiber.size() > 3) throw Error(ErrorCode::BadConfig, "ansatz t-degree must not exceed 3");
}

// Shared thickness loop: calls visit(F, u_value, weight) at every point of
// the shell quadrature, where weight already contains the 1/h normalization.
template <class Visit>
int shell_loop(const SurfacePatch& surface, const ThinShellAnsatz& ansatz, double h, const ShellQuadrature& sq,
               Visit&& visit) {
  check_ansatz(ansatz);
  check_tubular(surface, h);
  if (sq.thickness_points < 1) throw Error(ErrorCode::BadConfig, "thickness_points must be positive");
  const GaussRule rule = gauss_legendre(sq.thickness_points);
  const int degree = static_cast<int>(ansatz.fiber.size());
  int degenerate = 0;
  for (const auto& q : surface.quadrature()) {
    VecJet1 c[4];
    for (int k = 0; k <= degree; ++k) c[k] = ansatz.coefficient(k, q.u, q.v);
    const auto& f = q.forms;
    for (size_t s = 0; s < rule.x.size(); ++s) {
      const double t = 0.5 * h * rule.x[s];
      Mat3 G, U;
      G.col(0) = f.a1 + t * f.dn[0];
      G.col(1) = f.a2 + t * f.dn[1];
      G.col(2) = f.n;
      Vec3 ud = Vec3::Zero(), vd = Vec3::Zero(), td = Vec3::Zero(), val = Vec3::Zero();
      double tp = 1.0;
      for (int k = 0; k <= degree; ++k) {
        ud += tp * c[k].du;
        vd += tp * c[k].dv;
        val += tp * c[k].val;
        if (k + 1 <= degree) td += (k + 1) * tp * c[k + 1].val;
        tp *= t;
      }
      U.col(0) = ud;
      U.col(1) = vd;
      U.col(2) = td;
      const Mat3 F = U * G.inverse();
      if (F.determinant() <= 0.0) ++degenerate;
      // (1/h) * (h/2) from the t-rule, times the volume element |det G|.
      const double weight = q.weight * 0.5 * rule.w[s] * std::abs(G.determinant());
      visit(F, val, q, weight);
    }
  }
  return degenerate;
}

}  // namespace

EnergyRecord thin_shell_energy(const SurfacePatch& surface, const Material& material, const ThinShellAnsatz& ansatz,
                               double h, const ShellQuadrature& quad) {
  material.validate();
  EnergyRecord rec;
  double sum = 0.0;
  rec.degenerate_gradient_points = shell_loop(surface, ansatz, h, quad,
                                              [&](const Mat3& F, const Vec3&, const QuadPoint&, double w) {
                                                sum += w * energy_density(material, F);
                                              });
  rec.value = sum;
  rec.surface_points = static_cast<int>(surface.quadrature().size());
  rec.thickness_points = quad.thickness_points;
  rec.quad_order = surface.descriptor().quad_order;
  return rec;
}

EnergyRecord total_energy(const SurfacePatch& surface, const Material& material, const ThinShellAnsatz& ansatz, double h,
                          const ForceSpec& force, const ShellQuadrature& quad) {
  material.validate();
  if (!force.profile.valid()) throw Error(ErrorCode::BadConfig, "force profile missing");
  EnergyRecord rec;
  double energy = 0.0, work = 0.0;
  const double scale = std::pow(h, force.alpha);
  rec.degenerate_gradient_points = shell_loop(surface, ansatz, h, quad,
                                              [&](const Mat3& F, const Vec3& u, const QuadPoint& q, double w) {
                                                energy += w * energy_density(material, F);
                                                work += w * force.profile.jet(q.u, q.v).val.dot(u);
                                              });
  rec.value = energy - scale * work;
  rec.stretching = energy;
  rec.surface_points = static_cast<int>(surface.quadrature().size());
  rec.thickness_points = quad.thickness_points;
  rec.quad_order = surface.descriptor().quad_order;
  return rec;
}

EnergyRecord kirchhoff_energy(const SurfacePatch& surface, const Material& material, const VectorField& y,
                              Normalization normalization, const FunctionalOptions& options) {
  material.validate();
  const double defect = tensor_l2(surface, [&](const QuadPoint& q) -> Mat2 { return metric_at(y.jet(q.u, q.v)) - q.forms.g; });
  if (defect > options.isometry_tolerance * surface.area())
    throw Error(ErrorCode::NotAnIsometry, "metric defect " + std::to_string(defect) + " exceeds tolerance");
  const double factor = normalization == Normalization::Scaled ? 1.0 / 24.0 : 1.0;
  EnergyRecord rec;
  rec.value = factor * integrate(surface, [&](const QuadPoint& q) {
                const Mat2 d = shape_at(y.jet(q.u, q.v), surface.orientation()) - q.forms.second;
                return q2(material, q.forms.to_orthonormal(d));
              });
  rec.bending = rec.value;
  rec.surface_points = static_cast<int>(surface.quadrature().size());
  rec.quad_order = surface.descriptor().quad_order;
  return rec;
}

namespace {

struct RotationSamples {
  std::vector<RotationJet> rot;
  double relative_residual = 0.0;
};

RotationSamples rotations_at_quadrature(const SurfacePatch& surface, const VectorField& V) {
  RotationSamples out;
  const auto& quad = surface.quadrature();
  out.rot.reserve(quad.size());
  double defect = 0.0, scale = 0.0;
  for (const auto& q : quad) {
    out.rot.push_back(rotation_at(q.chart, V.jet(q.u, q.v)));
    const double w = q.weight * q.forms.area_element;
    defect += w * out.rot.back().defect_sq;
    scale += w * out.rot.back().scale_sq;
  }
  out.relative_residual = scale > 0.0 ? std::sqrt(defect / scale) : 0.0;
  return out;
}

RotationSamples checked_rotations(const SurfacePatch& surface, const VectorField& V, const FunctionalOptions& options) {
  RotationSamples rs = rotations_at_quadrature(surface, V);
  if (rs.relative_residual > options.rotation_tolerance)
    throw Error(ErrorCode::NotAnIsometry, "displacement is not an infinitesimal isometry (relative residual " +
                                              std::to_string(rs.relative_residual) + ")");
  return rs;
}

double bending_integral(const SurfacePatch& surface, const Material& material, const RotationSamples& rs) {
  const auto& quad = surface.quadrature();
  double sum = 0.0;
  for (size_t k = 0; k < quad.size(); ++k) {
    const auto& f = quad[k].forms;
    sum += quad[k].weight * f.area_element * q2(material, f.to_orthonormal(bending_at(rs.rot[k], f)));
  }
  return sum / 24.0;
}

}  // namespace

EnergyRecord vonkarman_energy(const SurfacePatch& surface, const Material& material, const VectorField& V,
                              const StrainField& B, const FunctionalOptions& options) {
  material.validate();
  const RotationSamples rs = checked_rotations(surface, V, options);
  const auto& quad = surface.quadrature();
  double stretch = 0.0;
  for (size_t k = 0; k < quad.size(); ++k) {
    const auto& q = quad[k];
    const Mat2 s = B.at(q.u, q.v) - 0.5 * rotation_square_at(rs.rot[k].w, q.forms);
    stretch += q.weight * q.forms.area_element * q2(material, q.forms.to_orthonormal(s));
  }
  EnergyRecord rec;
  rec.stretching = 0.5 * stretch;
  rec.bending = bending_integral(surface, material, rs);
  rec.value = *rec.stretching + *rec.bending;
  rec.surface_points = static_cast<int>(quad.size());
  rec.quad_order = surface.descriptor().quad_order;
  return rec;
}

EnergyRecord linear_bending_energy(const SurfacePatch& surface, const Material& material, const VectorField& V,
                                   const FunctionalOptions& options) {
  material.validate();
  const RotationSamples rs = checked_rotations(surface, V, options);
  EnergyRecord rec;
  rec.bending = bending_integral(surface, material, rs);
  rec.value = *rec.bending;
  rec.surface_points = static_cast<int>(surface.quadrature().size());
  rec.quad_order = surface.descriptor().quad_order;
  return rec;
}

ConjectureRecord conjecture_energy(const SurfacePatch& surface, const Material& material, const DisplacementHierarchy& H,
                                   double beta, const FunctionalOptions& options) {
  material.validate();
  if (H.empty()) throw Error(ErrorCode::BadConfig, "hierarchy must contain at least one field");
  const ScalingOrder so = order_for_scaling(beta);
  ConjectureRecord rec;
  rec.order = so.order;
  rec.boundary = std::abs(beta - so.beta_lower) <= 1e-12 * beta;

  const int n = static_cast<int>(H.size());
  const int k = std::min(so.order + 1, 2 * n);
  const auto& quad = surface.quadrature();
  std::vector<std::vector<Mat2>> A(quad.size());
  std::vector<double> grad_norm(n + 1, 0.0);
  for (size_t q = 0; q < quad.size(); ++q) {
    std::vector<VecJet> jets;
    for (const auto& V : H) jets.push_back(V.jet(quad[q].u, quad[q].v));
    A[q] = expansion_at(quad[q].chart, jets, k);
    const double w = quad[q].weight * quad[q].forms.area_element;
    const Mat2 E = quad[q].forms.ortho;
    grad_norm[0] += 2.0 * w;
    for (int p = 0; p < n; ++p) {
      Mat32 d;
      d.col(0) = jets[p].du;
      d.col(1) = jets[p].dv;
      grad_norm[p + 1] += w * (d * E).squaredNorm();
    }
  }
  for (auto& g : grad_norm) g = std::sqrt(g);

  for (int m = 1; m <= std::min(so.order, k); ++m) {
    double sq = 0.0;
    for (size_t q = 0; q < quad.size(); ++q)
      sq += quad[q].weight * quad[q].forms.area_element * quad[q].forms.to_orthonormal(A[q][m - 1]).squaredNorm();
    const double norm = std::sqrt(sq);
    double scale = 0.0;
    for (int p = 0; p <= m; ++p)
      if (p <= n && m - p <= n) scale += grad_norm[p] * grad_norm[m - p];
    rec.constraint_norms.push_back(norm);
    if (norm > options.constraint_tolerance * std::max(scale, 1e-300))
      throw Error(ErrorCode::InsufficientOrder, "hierarchy violates the order-" + std::to_string(m) + " constraint");
  }

  const RotationSamples rs = checked_rotations(surface, H.front(), options);
  rec.bending = bending_integral(surface, material, rs);
  if (rec.boundary && so.order + 1 <= k) {
    double stretch = 0.0;
    for (size_t q = 0; q < quad.size(); ++q)
      stretch += quad[q].weight * quad[q].forms.area_element *
                 q2(material, quad[q].forms.to_orthonormal(0.5 * A[q][so.order]));
    rec.stretching = 0.5 * stretch;
  }
  rec.value = rec.stretching + rec.bending;
  return rec;
}

VectorField averaged_displacement(const SurfacePatch& surface, const ThinShellAnsatz& ansatz, double h, double beta) {
  check_ansatz(ansatz);
  const Grid& grid = surface.grid();
  const double scale = std::pow(h, 1.0 - 0.5 * beta);
  NodalVec out(grid.size(), 3);
  for (int i = 0; i < grid.n1(); ++i) {
    for (int j = 0; j < grid.n2(); ++j) {
      const int k = grid.index(i, j);
      // Average of t^m over (-h/2, h/2): 1, 0, h^2/12, 0.
      Vec3 avg = ansatz.mid.node_jet(k).val - surface.node_chart(k).val;
      if (ansatz.fiber.size() >= 2) avg += (h * h / 12.0) * ansatz.fiber[1](grid.u(i), grid.v(j)).val;
      out.row(k) = scale * avg.transpose();
    }
  }
  return VectorField::sampled(surface, std::move(out));
}

}  // namespace shellhier
